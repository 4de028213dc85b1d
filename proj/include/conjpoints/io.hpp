#pragma once

#include <optional>
#include <string>

#include "conjpoints/abstract_system.hpp"
#include "conjpoints/geometry.hpp"
#include "conjpoints/prescribe.hpp"
#include "conjpoints/sds.hpp"
#include "json.hpp"

namespace conjpoints::io {

using nlohmann::json;

/// Detector settings a producer wants consumers of its system file to reuse.
struct DetectDefaults {
  std::optional<double> exclusion_radius;
  std::optional<int> max_isolated_run;
};

/// Analytic coefficient curves known by id: "flat" (A = 0, B = Id, C = 0)
/// and "oscillator" (A = 0, B = Id, C = -Id), both for any n.
SympDiffSystem analytic_system(const std::string& id, int n, const UniformGrid& grid);

/// { n, a, b, grid_N, coeff: {kind: "analytic-id", id} | {kind: "sampled",
///   samples: {A, B, C}} } with matrices as arrays of rows.  Sampled systems
/// store their grid samples; analytic ones must carry a known id.
json system_to_json(const SympDiffSystem& x, const DetectDefaults& defaults = {});
SympDiffSystem system_from_json(const json& j, DetectDefaults* defaults = nullptr);

/// ConjugateReport fields verbatim.
json report_to_json(const ConjugateReport& r);
/// Rows "t,d(t)".
std::string trace_csv(const ConjugateReport& r);

/// { n, a, b, grid_N, frames: [2n x n column-major arrays] }.
json abstract_to_json(const AbstractSystem& s);
AbstractSystem abstract_from_json(const json& j);

/// { n, g, causal, Rcurve: {a, b, grid_N, samples}, sign_calibration:
///   {omega_sign, dx_sign} }.  R is sampled on the metric's grid.
json metric_to_json(const ConformalMetric& m);
/// The metric together with the Morse-Sturm data it was built from.
std::pair<ConformalMetric, MorseSturm> metric_from_json(const json& j);

json geometry_report_to_json(const GeometryReport& r);

/// Pipeline diagnostics besides the conjugate report.
json prescribe_summary_to_json(const PrescribedBundle& b, double distance_steps, bool passed);

json matrix_to_json(const Eigen::MatrixXd& m);
Eigen::MatrixXd matrix_from_json(const json& j);

/// Throw PreconditionError on unreadable files or malformed JSON.
json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
/// Deterministic serialization (two-space indent, trailing newline).
std::string dump(const json& j);

}  // namespace conjpoints::io
