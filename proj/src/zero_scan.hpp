#pragma once

#include <functional>
#include <optional>
#include <vector>

namespace conjpoints::detail {

enum class ZeroKind { kSignChange, kTouch, kCluster };

/// A zero feature of a sampled scalar: a sign change, a short sub-threshold
/// run without sign change, or a long sub-threshold run.  lo/hi are refined
/// locations; for isolated features t is the representative instant.
struct ZeroFeature {
  ZeroKind kind;
  double t = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

struct ZeroScanOptions {
  int first_index = 1;
  double threshold = 0.0;  ///< absolute
  int max_isolated_run = 3;
  double t_tol = 1e-10;
  /// Grid-local minima of |d| below this (absolute) are refined with `eval`
  /// and become touches when the refined minimum is under `threshold`.  A
  /// double zero can fall between samples without any of them dropping
  /// below the threshold.  0 disables the refinement.
  double touch_gate = 0.0;
};

/// Scans samples d(t_k), k >= first_index.  When `eval` is given, sign
/// changes are refined by bisection, sub-threshold boundaries by bisection
/// on |d| - threshold and touches by golden-section search on |d|; otherwise
/// linear interpolation, grid points and run midpoints are used.
std::vector<ZeroFeature> scan_zero_set(const std::vector<double>& t, const std::vector<double>& d,
                                       const ZeroScanOptions& opts,
                                       const std::function<double(double)>& eval = {});

}  // namespace conjpoints::detail
