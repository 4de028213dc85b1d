#include "conjpoints/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "conjpoints/errors.hpp"

namespace conjpoints::io {

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) {
    throw PreconditionError("expected a matrix as a non-empty array of rows");
  }
  const std::size_t rows = j.size(), cols = j[0].size();
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols) throw PreconditionError("ragged matrix rows");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!j[i][c].is_number()) throw PreconditionError("matrix entries must be numbers");
      m(i, c) = j[i][c].get<double>();
    }
  }
  return m;
}

namespace {

template <class T>
T field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw PreconditionError(std::string("missing field '") + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw PreconditionError(std::string("bad field '") + key + "': " + e.what());
  }
}

UniformGrid grid_from(const json& j) {
  const int n = field<int>(j, "grid_N");
  return UniformGrid(field<double>(j, "a"), field<double>(j, "b"), n);
}

void put_grid(json& j, const UniformGrid& g) {
  j["a"] = g.a();
  j["b"] = g.b();
  j["grid_N"] = g.N();
}

std::vector<Eigen::MatrixXd> matrix_list(const json& j, std::size_t count, const char* what) {
  if (!j.is_array() || j.size() != count) {
    throw PreconditionError(std::string(what) + ": expected " + std::to_string(count) +
                            " samples");
  }
  std::vector<Eigen::MatrixXd> out;
  out.reserve(count);
  for (const auto& m : j) out.push_back(matrix_from_json(m));
  return out;
}

}  // namespace

SympDiffSystem analytic_system(const std::string& id, int n, const UniformGrid& grid) {
  if (n < 1) throw PreconditionError("analytic system: n must be positive");
  const Eigen::MatrixXd zero = Eigen::MatrixXd::Zero(n, n);
  const Eigen::MatrixXd id_n = Eigen::MatrixXd::Identity(n, n);
  if (id == "flat") {
    return SympDiffSystem::analytic(
        n, grid, [=](double) { return SpBlocks{zero, SymmetricForm(id_n), SymmetricForm(zero)}; },
        id);
  }
  if (id == "oscillator") {
    return SympDiffSystem::analytic(
        n, grid,
        [=](double) { return SpBlocks{zero, SymmetricForm(id_n), SymmetricForm(-id_n)}; }, id);
  }
  throw PreconditionError("unknown analytic system id '" + id + "'");
}

json system_to_json(const SympDiffSystem& x, const DetectDefaults& defaults) {
  json j;
  j["n"] = x.n();
  put_grid(j, x.grid());
  if (x.is_sampled()) {
    json a = json::array(), b = json::array(), c = json::array();
    for (int k = 0; k <= x.grid().N(); ++k) {
      const SpBlocks s = x.grid_coefficients(k);
      a.push_back(matrix_to_json(s.A));
      b.push_back(matrix_to_json(s.B.matrix()));
      c.push_back(matrix_to_json(s.C.matrix()));
    }
    j["coeff"] = {{"kind", "sampled"}, {"samples", {{"A", a}, {"B", b}, {"C", c}}}};
  } else {
    if (x.analytic_id().empty()) {
      throw PreconditionError("system_to_json: analytic system without an id");
    }
    j["coeff"] = {{"kind", "analytic-id"}, {"id", x.analytic_id()}};
  }
  if (defaults.exclusion_radius || defaults.max_isolated_run) {
    json d = json::object();
    if (defaults.exclusion_radius) d["exclusion_radius"] = *defaults.exclusion_radius;
    if (defaults.max_isolated_run) d["max_isolated_run"] = *defaults.max_isolated_run;
    j["detect_defaults"] = d;
  }
  return j;
}

SympDiffSystem system_from_json(const json& j, DetectDefaults* defaults) {
  const int n = field<int>(j, "n");
  const UniformGrid grid = grid_from(j);
  const json coeff = field<json>(j, "coeff");
  const std::string kind = field<std::string>(coeff, "kind");
  if (defaults) {
    *defaults = {};
    if (j.contains("detect_defaults")) {
      const json& d = j["detect_defaults"];
      if (d.contains("exclusion_radius")) defaults->exclusion_radius = field<double>(d, "exclusion_radius");
      if (d.contains("max_isolated_run")) defaults->max_isolated_run = field<int>(d, "max_isolated_run");
    }
  }
  if (kind == "analytic-id") return analytic_system(field<std::string>(coeff, "id"), n, grid);
  if (kind != "sampled") throw PreconditionError("coeff.kind must be 'analytic-id' or 'sampled'");
  const json samples = field<json>(coeff, "samples");
  const std::size_t count = grid.N() + 1;
  const auto a = matrix_list(field<json>(samples, "A"), count, "A");
  const auto b = matrix_list(field<json>(samples, "B"), count, "B");
  const auto c = matrix_list(field<json>(samples, "C"), count, "C");
  std::vector<SpBlocks> blocks;
  blocks.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    for (const auto* m : {&a[k], &b[k], &c[k]}) {
      if (m->rows() != n || m->cols() != n) throw PreconditionError("coefficient blocks must be n x n");
    }
    if ((b[k] - b[k].transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + b[k].norm()) ||
        (c[k] - c[k].transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + c[k].norm())) {
      throw PreconditionError("B and C samples must be symmetric");
    }
    blocks.push_back({a[k], SymmetricForm(b[k]), SymmetricForm(c[k])});
  }
  return SympDiffSystem::sampled(n, grid, blocks);
}

json report_to_json(const ConjugateReport& r) {
  json instants = json::array();
  for (const auto& i : r.instants) {
    instants.push_back({{"t", i.t},
                        {"multiplicity", i.multiplicity},
                        {"signature", i.signature ? json(*i.signature) : json(nullptr)},
                        {"regular", i.regular}});
  }
  json clusters = json::array();
  for (const auto& c : r.clusters) clusters.push_back({{"lo", c.lo}, {"hi", c.hi}});
  return {{"instants", instants},
          {"clusters", clusters},
          {"times", r.times},
          {"d_trace", r.d_trace},
          {"d_scale", r.d_scale},
          {"exclusion_radius", r.exclusion_radius},
          {"scan_start", r.scan_start},
          {"zero_tol", r.zero_tol},
          {"max_drift", r.max_drift},
          {"signature_convention", r.signature_convention}};
}

std::string trace_csv(const ConjugateReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << "t,d(t)\n";
  for (std::size_t k = 0; k < r.times.size(); ++k) os << r.times[k] << ',' << r.d_trace[k] << '\n';
  return os.str();
}

json abstract_to_json(const AbstractSystem& s) {
  json j;
  j["n"] = s.n();
  put_grid(j, s.grid());
  json frames = json::array();
  for (const auto& f : s.frames()) {
    frames.push_back(std::vector<double>(f.data(), f.data() + f.size()));
  }
  j["frames"] = std::move(frames);
  if (!s.provenance().empty()) j["provenance"] = s.provenance();
  return j;
}

AbstractSystem abstract_from_json(const json& j) {
  const int n = field<int>(j, "n");
  const UniformGrid grid = grid_from(j);
  const json frames = field<json>(j, "frames");
  if (!frames.is_array() || frames.size() != static_cast<std::size_t>(grid.N() + 1)) {
    throw PreconditionError("frames: expected grid_N + 1 entries");
  }
  std::vector<Eigen::MatrixXd> out;
  out.reserve(frames.size());
  for (const auto& f : frames) {
    std::vector<double> v;
    try {
      v = f.get<std::vector<double>>();
    } catch (const json::exception& e) {
      throw PreconditionError(std::string("frames: ") + e.what());
    }
    if (v.size() != static_cast<std::size_t>(2 * n * n)) {
      throw PreconditionError("frames: each frame needs 2n x n entries");
    }
    out.push_back(Eigen::Map<Eigen::MatrixXd>(v.data(), 2 * n, n));
  }
  return AbstractSystem(grid, std::move(out), j.value("provenance", std::string{}));
}

json metric_to_json(const ConformalMetric& m) {
  json samples = json::array();
  for (int k = 0; k <= m.grid.N(); ++k) samples.push_back(matrix_to_json(m.R(m.grid.time(k))));
  json rc;
  put_grid(rc, m.grid);
  rc["samples"] = std::move(samples);
  return {{"n", m.n},
          {"g", matrix_to_json(m.g.matrix())},
          {"causal", to_string(m.causal)},
          {"index_of_metric", m.index_of_metric()},
          {"Rcurve", rc},
          {"sign_calibration", {{"omega_sign", m.omega_sign()}, {"dx_sign", m.dx_sign()}}}};
}

std::pair<ConformalMetric, MorseSturm> metric_from_json(const json& j) {
  const int n = field<int>(j, "n");
  const Eigen::MatrixXd g = matrix_from_json(field<json>(j, "g"));
  if (g.rows() != n || g.cols() != n) throw PreconditionError("g must be n x n");
  const Causal causal = parse_causal(field<std::string>(j, "causal"));
  const json rc = field<json>(j, "Rcurve");
  const UniformGrid grid = grid_from(rc);
  auto r = matrix_list(field<json>(rc, "samples"), grid.N() + 1, "Rcurve.samples");
  for (const auto& m : r) {
    if (m.rows() != n || m.cols() != n) throw PreconditionError("Rcurve samples must be n x n");
  }
  const SymmetricForm gf(g);
  if (inertia(gf).n_zero != 0) throw PreconditionError("g is degenerate");
  MorseSturm ms = MorseSturm::sampled(gf, grid, std::move(r));
  ConformalMetric m = metric_from_morse_sturm(ms, causal);
  if (j.contains("sign_calibration")) {
    const json& sc = j["sign_calibration"];
    if (field<double>(sc, "omega_sign") != m.omega_sign() ||
        field<double>(sc, "dx_sign") != m.dx_sign()) {
      throw PreconditionError("sign_calibration does not match the built-in calibration");
    }
  }
  return {std::move(m), std::move(ms)};
}

json geometry_report_to_json(const GeometryReport& r) {
  auto finite_or_null = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  return {{"h", r.h},
          {"max_christoffel_on_axis", r.max_christoffel_on_axis},
          {"max_christoffel_on_axis_half", r.max_christoffel_on_axis_half},
          {"geodesic_residual", r.geodesic_residual},
          {"geodesic_residual_half", r.geodesic_residual_half},
          {"axis_order", finite_or_null(observed_order(r.max_christoffel_on_axis,
                                                        r.max_christoffel_on_axis_half))},
          {"offaxis_stencil_error", r.offaxis_stencil_error},
          {"offaxis_stencil_error_half", r.offaxis_stencil_error_half},
          {"offaxis_order", finite_or_null(r.offaxis_order)},
          {"curvature_mismatch", r.curvature_mismatch},
          {"curvature_mismatch_half", r.curvature_mismatch_half},
          {"index_of_metric", r.index_of_metric},
          {"inertia_constant", r.inertia_constant}};
}

json prescribe_summary_to_json(const PrescribedBundle& b, double distance_steps, bool passed) {
  const auto& avg = b.extension.forms.average;
  return {{"F", b.F.to_string()},
          {"a", b.F.a()},
          {"b", b.F.b()},
          {"c", b.c},
          {"nominal_step", b.nominal_step},
          {"working_grid_N", b.reduction.system.grid().N()},
          {"abstract_index", {{"nondegenerate", b.index.nondegenerate}, {"index", b.index.index}}},
          {"chart_value", matrix_to_json(b.extension.P.matrix())},
          {"blend_width", avg.eps},
          {"recharts", b.extension.recharts},
          {"max_A_residual", b.reduction.max_A_residual},
          {"max_B_defect", b.reduction.max_B_defect},
          {"max_group_defect", b.reduction.max_group_defect},
          {"max_drift", b.solution.max_drift},
          {"distance_steps", std::isfinite(distance_steps) ? json(distance_steps) : json(nullptr)},
          {"passed", passed}};
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot read '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw PreconditionError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PreconditionError("cannot write '" + path + "'");
  out << text;
  if (!out) throw PreconditionError("write to '" + path + "' failed");
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace conjpoints::io
