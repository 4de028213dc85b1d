#pragma once

#include <Eigen/Dense>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "conjpoints/abstract_system.hpp"
#include "conjpoints/grid.hpp"
#include "conjpoints/sds.hpp"
#include "conjpoints/symform.hpp"
#include "conjpoints/symplectic.hpp"

namespace conjpoints {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Finite union of closed intervals inside ]a, b]; points are lo == hi.
class ClosedSetDescriptor {
 public:
  ClosedSetDescriptor() = default;
  /// Sorts and merges overlapping items; throws PreconditionError when an
  /// item has lo > hi or leaves ]a, b].
  ClosedSetDescriptor(double a, double b, std::vector<Interval> items = {});

  /// "x" for a point, "lo:hi" for an interval, items separated by ';'.
  static ClosedSetDescriptor parse(const std::string& text, double a, double b);

  double a() const { return a_; }
  double b() const { return b_; }
  const std::vector<Interval>& intervals() const { return items_; }
  bool empty() const { return items_.empty(); }
  double inf() const;
  bool contains(double t) const;
  double distance(double t) const;
  std::string to_string() const;

 private:
  double a_ = 0.0;
  double b_ = 1.0;
  std::vector<Interval> items_;
};

/// Gaps of R \ F in left-to-right order; infinite ends are +-inf.
std::vector<Interval> complement_gaps(const ClosedSetDescriptor& f);

struct SmoothScalarCurve {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  /// Optional higher derivatives.
  std::function<double(double)> second;
  std::function<double(double)> third;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  double operator()(double t) const { return value(t); }
};

/// Each gap of the complement of F carries a bump whose edge profile, at
/// distance x from the gap boundary, is exp(-delta/x) q/(1+q), q = (x/L)^4.
struct VanishingOptions {
  double edge_length = 0.05;   ///< L
  double flat_width = 1e-5;    ///< delta
  /// Bump r is scaled so that L^i sup |b^(i)| <= derivative_budget 2^-r for
  /// i = 0..3 (derivatives measured in edge-length units).
  double derivative_budget = 1.0;
};

/// f >= 0 with f^{-1}(0) = F and f < 1, smooth, flat at the boundary of F.
SmoothScalarCurve vanishing_function(const ClosedSetDescriptor& f,
                                     const VanishingOptions& opts = {});

/// rho(t) = Id + R(t) [[cos t, sin t], [sin t, -cos t]].
SymmetricForm rho_curve(const SmoothScalarCurve& r, double t);
SymmetricForm rho_derivative(const SmoothScalarCurve& r, double t);

// ---------------------------------------------------------------------------
// Extension (2 x 2 forms; the connecting paths live in fixed-inertia
// spectral coordinates)

using FormCurve = std::function<SymmetricForm(double)>;
using FrameCurve = std::function<Eigen::MatrixXd(double)>;

struct AverageExtension {
  FormCurve tau;         ///< on [a, c]; equals taubar from c on
  double a = 0.0;
  double c = 0.0;
  double eps = 0.0;      ///< tau is constant u + delta on [a, c - eps]
  SymmetricForm u;
  SymmetricForm delta;
  double sup_norm = 0.0;       ///< M = sup ||tau|| on [a, c]
  double gamma_deviation = 0.0;  ///< sup ||gamma - u||
  double radius = 0.0;           ///< distance_to_degenerate(u)
  double integral_defect = 0.0;  ///< ||Q(tau) - u (c - a)||
  int quad_cells = 0;
};

/// Averaging extension: tau on [a, c] with quadrature of tau equal to
/// u (c - a), constant on [a, c - eps], joining taubar at c.  taubar must be
/// evaluable on [c, c + 6 s] where s = taylor_step.  eps is halved from
/// eps_start until the blended curve stays in the fixed-inertia set of u
/// and eps sup||gamma - u|| / (c - a - eps) < min(r, 1); eps_min bounds the
/// search.
AverageExtension extend_average(const FormCurve& taubar, const SymmetricForm& u, double a,
                                double c, int quad_cells, double eps_start, double eps_min,
                                double taylor_step);

struct FormExtension {
  AverageExtension average;
  FormCurve sigma;      ///< on [a, b']
  std::vector<double> node_times;          ///< quadrature nodes on [a, c]
  std::vector<SymmetricForm> node_sigma;   ///< cumulative Simpson values
  double eta_times_M = 0.0;
  double radius = 0.0;  ///< distance_to_degenerate(sigmabar(c))
};

/// sigma(a) = 0, sigma = cumulative integral of the extended derivative on
/// [a, c], sigma = sigmabar on [c, b'].  quad_cells uniform cells on [a, c].
FormExtension extend_forms(const FormCurve& sigmabar, double a, double c, double b_prime,
                           int quad_cells, double eps_min);

struct LagrangianExtension {
  std::vector<Eigen::MatrixXd> frames;  ///< on the grid over [a, b]
  LagrangianFrame xi1;
  SymmetricForm P;
  int c_index = 0;
  int b_prime_index = 0;
  FormExtension forms;
  double matched_defect = 0.0;  ///< ||sigmabar'(c) - P / (c - a)|| relative
  int recharts = 0;
};

enum class ChartValueMode {
  kMatched,   ///< P chosen so that sigmabar'(c) = P / (c - a)
  kDiagonal,  ///< P = diag(1, -1)
  kScaled,    ///< P = chart_scale (c - a) diag(1, -1)
};

/// xi on the grid: chart-extended on [a, c], xibar on [c, b].  c must be a
/// grid node.
LagrangianExtension extend_lagrangian(const FrameCurve& xibar, const LagrangianFrame& xi0,
                                      const UniformGrid& grid, int c_index,
                                      ChartValueMode mode = ChartValueMode::kMatched,
                                      double chart_scale = 1.0);

// ---------------------------------------------------------------------------
// Pipeline

struct PipelineOptions {
  /// Nominal grid; lengths below are in its steps.
  int grid_N = kDefaultGridN;
  /// Every sampled stage runs on grid_N * oversample nodes.  The reduced
  /// system carries derivatives of f up to order three and needs this
  /// resolution for |d| on F to stay below zero_tol.
  int oversample = 16;
  /// Edge length and flat width of the vanishing bumps.
  double edge_steps = 50.0;
  double flat_steps = 0.5;
  double derivative_budget = 16.0;
  /// The matched chart value grows like 1 / (c - a) and leaves no admissible
  /// blending width when F starts close to a.
  ChartValueMode chart_value = ChartValueMode::kScaled;
  double chart_scale = 1.0;
  /// Sub-threshold runs up to this many nominal steps count as one instant;
  /// overrides detect.max_isolated_run.  f is flat at points of F, so d stays
  /// below zero_tol for a few nominal steps around an isolated point.
  double isolated_run_steps = 4.0;
  /// exclusion_radius defaults to 5 nominal steps here.
  DetectOptions detect;
};

struct PrescribedBundle {
  ClosedSetDescriptor F;
  SmoothScalarCurve f;
  SmoothScalarCurve R;
  double c = 0.0;
  LagrangianExtension extension;
  AbstractSystem abstract;
  AbstractIndex index;
  SympDiffSystem realized;
  MorseSturmReduction reduction;
  FundamentalSolution solution;
  ConjugateReport report;
  VanishingOptions vanishing;
  /// Step of the nominal grid (the working grid is finer by oversample).
  double nominal_step = 0.0;
};

/// Full chain; failures are rethrown as StageError naming the stage.
PrescribedBundle build_prescribed(const ClosedSetDescriptor& F, const PipelineOptions& opts = {});

/// Hausdorff distance, in grid steps, between F and the detected set
/// (instants plus clusters); 0 when both are empty and +inf when exactly one
/// is.
double detection_distance_steps(const ConjugateReport& rep, const ClosedSetDescriptor& F,
                                double step);

}  // namespace conjpoints
