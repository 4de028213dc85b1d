#include "conjpoints/conjpoints.h"

#include <cmath>
#include <exception>
#include <memory>
#include <new>
#include <string>

#include "conjpoints/errors.hpp"
#include "conjpoints/geometry.hpp"
#include "conjpoints/io.hpp"
#include "conjpoints/prescribe.hpp"
#include "conjpoints/sds.hpp"

using namespace conjpoints;

struct cp_system {
  SympDiffSystem system;
  io::DetectDefaults defaults;
};

struct cp_report {
  ConjugateReport report;
};

struct cp_prescribed {
  PrescribedBundle bundle;
  io::DetectDefaults defaults;
  double distance_steps = 0.0;
  bool passed = false;
};

struct cp_metric {
  ConformalMetric metric;
  MorseSturm ms;
};

namespace {

thread_local std::string last_error;

struct ArgumentError : PreconditionError {
  using PreconditionError::PreconditionError;
};

template <class F>
cp_status guarded(F&& body) {
  try {
    last_error.clear();
    body();
    return CP_OK;
  } catch (const ArgumentError& e) {
    last_error = e.what();
    return CP_ERR_ARGUMENT;
  } catch (const PreconditionError& e) {
    last_error = e.what();
    return CP_ERR_PRECONDITION;
  } catch (const StageError& e) {
    last_error = e.what();
    return CP_ERR_STAGE;
  } catch (const NumericalError& e) {
    last_error = e.what();
    return CP_ERR_NUMERICAL;
  } catch (const UnavailableError& e) {
    last_error = e.what();
    return CP_ERR_UNAVAILABLE;
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return CP_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return CP_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return CP_ERR_INTERNAL;
  }
}

void need(bool ok, const char* what) {
  if (!ok) throw ArgumentError(what);
}

cp_status check_args(bool ok, const char* what) {
  if (ok) return CP_OK;
  last_error = what;
  return CP_ERR_ARGUMENT;
}

DetectOptions detect_options(const cp_detect_options* o, const io::DetectDefaults& d) {
  DetectOptions out;
  out.exclusion_radius = d.exclusion_radius;
  if (d.max_isolated_run) out.max_isolated_run = *d.max_isolated_run;
  if (!o) return out;
  need(o->zero_tol > 0 && o->rank_tol > 0 && o->t_tol > 0 && o->crossing_tol > 0 &&
           o->reproject_tol > 0,
       "detect options: tolerances must be positive");
  out.zero_tol = o->zero_tol;
  out.rank_tol = o->rank_tol;
  out.t_tol = o->t_tol;
  out.crossing_tol = o->crossing_tol;
  out.integration.reproject_tol = o->reproject_tol;
  if (o->exclusion_radius >= 0) out.exclusion_radius = o->exclusion_radius;
  if (o->max_isolated_run > 0) out.max_isolated_run = o->max_isolated_run;
  return out;
}

Eigen::MatrixXd row_major(const double* p, int n) {
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      p, n, n);
}

}  // namespace

extern "C" {

const char* cp_last_error(void) { return last_error.c_str(); }

const char* cp_version(void) { return "0.1.0"; }

void cp_detect_options_default(cp_detect_options* opts) {
  if (!opts) return;
  const DetectOptions d;
  opts->zero_tol = d.zero_tol;
  opts->rank_tol = d.rank_tol;
  opts->t_tol = d.t_tol;
  opts->crossing_tol = d.crossing_tol;
  opts->exclusion_radius = -1.0;
  opts->max_isolated_run = 0;
  opts->reproject_tol = d.integration.reproject_tol;
}

cp_status cp_system_analytic(const char* id, int n, double a, double b, int grid_N,
                             cp_system** out) {
  if (cp_status s = check_args(id && out, "cp_system_analytic: null argument")) return s;
  return guarded([&] {
    *out = new cp_system{io::analytic_system(id, n, UniformGrid(a, b, grid_N)), {}};
  });
}

cp_status cp_system_sampled(int n, double a, double b, int grid_N, const double* A,
                            const double* B, const double* C, cp_system** out) {
  if (cp_status s = check_args(A && B && C && out && n > 0 && grid_N > 0,
                               "cp_system_sampled: null or non-positive argument")) {
    return s;
  }
  return guarded([&] {
    const UniformGrid grid(a, b, grid_N);
    std::vector<SpBlocks> samples;
    samples.reserve(grid_N + 1);
    const std::size_t stride = static_cast<std::size_t>(n) * n;
    for (int k = 0; k <= grid_N; ++k) {
      samples.push_back({row_major(A + k * stride, n), SymmetricForm(row_major(B + k * stride, n)),
                         SymmetricForm(row_major(C + k * stride, n))});
    }
    *out = new cp_system{SympDiffSystem::sampled(n, grid, samples), {}};
  });
}

cp_status cp_morse_sturm_sampled(int n, const double* g, double a, double b, int grid_N,
                                 const double* R, cp_system** out) {
  if (cp_status s = check_args(g && R && out && n > 0 && grid_N > 0,
                               "cp_morse_sturm_sampled: null or non-positive argument")) {
    return s;
  }
  return guarded([&] {
    std::vector<Eigen::MatrixXd> r;
    r.reserve(grid_N + 1);
    const std::size_t stride = static_cast<std::size_t>(n) * n;
    for (int k = 0; k <= grid_N; ++k) r.push_back(row_major(R + k * stride, n));
    const MorseSturm ms =
        MorseSturm::sampled(SymmetricForm(row_major(g, n)), UniformGrid(a, b, grid_N), r);
    *out = new cp_system{ms.to_system(), {}};
  });
}

cp_status cp_system_load(const char* path, cp_system** out) {
  if (cp_status s = check_args(path && out, "cp_system_load: null argument")) return s;
  return guarded([&] {
    io::DetectDefaults d;
    SympDiffSystem x = io::system_from_json(io::read_json_file(path), &d);
    *out = new cp_system{std::move(x), d};
  });
}

cp_status cp_system_save(const cp_system* s, const char* path) {
  if (cp_status st = check_args(s && path, "cp_system_save: null argument")) return st;
  return guarded(
      [&] { io::write_text_file(path, io::dump(io::system_to_json(s->system, s->defaults))); });
}

cp_status cp_system_info(const cp_system* s, int* n, double* a, double* b, int* grid_N) {
  if (cp_status st = check_args(s != nullptr, "cp_system_info: null system")) return st;
  if (n) *n = s->system.n();
  if (a) *a = s->system.a();
  if (b) *b = s->system.b();
  if (grid_N) *grid_N = s->system.grid().N();
  return CP_OK;
}

void cp_system_free(cp_system* s) { delete s; }

cp_status cp_detect(const cp_system* s, const cp_detect_options* opts, cp_report** out) {
  if (cp_status st = check_args(s && out, "cp_detect: null argument")) return st;
  return guarded([&] {
    *out = new cp_report{conjugate_instants(s->system, detect_options(opts, s->defaults))};
  });
}

cp_status cp_maslov_regular(const cp_system* s, const cp_detect_options* opts, int* out) {
  if (cp_status st = check_args(s && out, "cp_maslov_regular: null argument")) return st;
  return guarded([&] { *out = maslov_regular(s->system, detect_options(opts, s->defaults)); });
}

cp_status cp_report_counts(const cp_report* r, int* instants, int* clusters) {
  if (cp_status st = check_args(r != nullptr, "cp_report_counts: null report")) return st;
  if (instants) *instants = static_cast<int>(r->report.instants.size());
  if (clusters) *clusters = static_cast<int>(r->report.clusters.size());
  return CP_OK;
}

cp_status cp_report_instant(const cp_report* r, int i, double* t, int* multiplicity,
                            int* signature, int* has_signature, int* regular) {
  if (cp_status st = check_args(r && i >= 0 && i < static_cast<int>(r->report.instants.size()),
                                "cp_report_instant: bad report or index")) {
    return st;
  }
  const ConjugateInstant& c = r->report.instants[i];
  if (t) *t = c.t;
  if (multiplicity) *multiplicity = c.multiplicity;
  if (signature) *signature = c.signature.value_or(0);
  if (has_signature) *has_signature = c.signature.has_value();
  if (regular) *regular = c.regular;
  return CP_OK;
}

cp_status cp_report_cluster(const cp_report* r, int i, double* lo, double* hi) {
  if (cp_status st = check_args(r && i >= 0 && i < static_cast<int>(r->report.clusters.size()),
                                "cp_report_cluster: bad report or index")) {
    return st;
  }
  if (lo) *lo = r->report.clusters[i].lo;
  if (hi) *hi = r->report.clusters[i].hi;
  return CP_OK;
}

cp_status cp_report_trace(const cp_report* r, int* count, const double** times, const double** d) {
  if (cp_status st = check_args(r != nullptr, "cp_report_trace: null report")) return st;
  if (count) *count = static_cast<int>(r->report.times.size());
  if (times) *times = r->report.times.data();
  if (d) *d = r->report.d_trace.data();
  return CP_OK;
}

cp_status cp_report_scalars(const cp_report* r, double* d_scale, double* exclusion_radius,
                            double* max_drift) {
  if (cp_status st = check_args(r != nullptr, "cp_report_scalars: null report")) return st;
  if (d_scale) *d_scale = r->report.d_scale;
  if (exclusion_radius) *exclusion_radius = r->report.exclusion_radius;
  if (max_drift) *max_drift = r->report.max_drift;
  return CP_OK;
}

cp_status cp_report_save_json(const cp_report* r, const char* path) {
  if (cp_status st = check_args(r && path, "cp_report_save_json: null argument")) return st;
  return guarded([&] { io::write_text_file(path, io::dump(io::report_to_json(r->report))); });
}

cp_status cp_report_save_csv(const cp_report* r, const char* path) {
  if (cp_status st = check_args(r && path, "cp_report_save_csv: null argument")) return st;
  return guarded([&] { io::write_text_file(path, io::trace_csv(r->report)); });
}

void cp_report_free(cp_report* r) { delete r; }

cp_status cp_to_morse_sturm(const cp_system* s, cp_system** out, double* max_A_residual,
                            double* max_B_defect) {
  if (cp_status st = check_args(s && out, "cp_to_morse_sturm: null argument")) return st;
  return guarded([&] {
    const MorseSturmReduction red = to_morse_sturm(s->system);
    if (max_A_residual) *max_A_residual = red.max_A_residual;
    if (max_B_defect) *max_B_defect = red.max_B_defect;
    *out = new cp_system{red.system, s->defaults};
  });
}

void cp_pipeline_options_default(cp_pipeline_options* opts) {
  if (!opts) return;
  const PipelineOptions p;
  opts->grid_N = p.grid_N;
  opts->oversample = p.oversample;
  opts->edge_steps = p.edge_steps;
  opts->flat_steps = p.flat_steps;
  opts->derivative_budget = p.derivative_budget;
  opts->isolated_run_steps = p.isolated_run_steps;
  cp_detect_options_default(&opts->detect);
}

cp_status cp_prescribe(const char* set, double a, double b, const cp_pipeline_options* opts,
                       cp_prescribed** out) {
  if (cp_status st = check_args(set && out, "cp_prescribe: null argument")) return st;
  return guarded([&] {
    const ClosedSetDescriptor F = ClosedSetDescriptor::parse(set, a, b);
    PipelineOptions p;
    if (opts) {
      need(opts->grid_N >= 64, "cp_prescribe: grid_N must be at least 64");
      need(opts->oversample >= 1, "cp_prescribe: oversample must be positive");
      need(opts->edge_steps > 0 && opts->flat_steps > 0 && opts->derivative_budget > 0 &&
               opts->isolated_run_steps > 0,
           "cp_prescribe: step counts and budget must be positive");
      p.grid_N = opts->grid_N;
      p.oversample = opts->oversample;
      p.edge_steps = opts->edge_steps;
      p.flat_steps = opts->flat_steps;
      p.derivative_budget = opts->derivative_budget;
      p.isolated_run_steps = opts->isolated_run_steps;
      p.detect = detect_options(&opts->detect, {});
    }
    auto res = std::make_unique<cp_prescribed>();
    res->bundle = build_prescribed(F, p);
    res->defaults.exclusion_radius = res->bundle.report.exclusion_radius;
    res->defaults.max_isolated_run =
        static_cast<int>(std::lround(p.isolated_run_steps * p.oversample));
    res->distance_steps =
        detection_distance_steps(res->bundle.report, F, res->bundle.nominal_step);
    res->passed = res->distance_steps <= 2.0;
    *out = res.release();
  });
}

cp_status cp_prescribed_summary(const cp_prescribed* p, double* distance_steps,
                                int* abstract_index, int* passed) {
  if (cp_status st = check_args(p != nullptr, "cp_prescribed_summary: null handle")) return st;
  if (distance_steps) *distance_steps = p->distance_steps;
  if (abstract_index) *abstract_index = p->bundle.index.nondegenerate ? p->bundle.index.index : -1;
  if (passed) *passed = p->passed;
  return CP_OK;
}

cp_status cp_prescribed_report(const cp_prescribed* p, cp_report** out) {
  if (cp_status st = check_args(p && out, "cp_prescribed_report: null argument")) return st;
  return guarded([&] { *out = new cp_report{p->bundle.report}; });
}

cp_status cp_prescribed_system(const cp_prescribed* p, cp_system** out) {
  if (cp_status st = check_args(p && out, "cp_prescribed_system: null argument")) return st;
  return guarded([&] { *out = new cp_system{p->bundle.reduction.system, p->defaults}; });
}

cp_status cp_prescribed_save_summary(const cp_prescribed* p, const char* path) {
  if (cp_status st = check_args(p && path, "cp_prescribed_save_summary: null argument")) return st;
  return guarded([&] {
    io::write_text_file(path, io::dump(io::prescribe_summary_to_json(p->bundle, p->distance_steps,
                                                                      p->passed)));
  });
}

void cp_prescribed_free(cp_prescribed* p) { delete p; }

cp_status cp_metric_from_system(const cp_system* s, cp_causal causal, cp_metric** out) {
  if (cp_status st = check_args(s && out && (causal == CP_SPACELIKE || causal == CP_TIMELIKE),
                                "cp_metric_from_system: bad argument")) {
    return st;
  }
  return guarded([&] {
    MorseSturm ms = as_morse_sturm(s->system);
    ConformalMetric m = metric_from_morse_sturm(
        ms, causal == CP_SPACELIKE ? Causal::kSpacelike : Causal::kTimelike);
    *out = new cp_metric{std::move(m), std::move(ms)};
  });
}

cp_status cp_metric_load(const char* path, cp_metric** out) {
  if (cp_status st = check_args(path && out, "cp_metric_load: null argument")) return st;
  return guarded([&] {
    auto [m, ms] = io::metric_from_json(io::read_json_file(path));
    *out = new cp_metric{std::move(m), std::move(ms)};
  });
}

cp_status cp_metric_save(const cp_metric* m, const char* path) {
  if (cp_status st = check_args(m && path, "cp_metric_save: null argument")) return st;
  return guarded([&] { io::write_text_file(path, io::dump(io::metric_to_json(m->metric))); });
}

cp_status cp_metric_index(const cp_metric* m, int* index) {
  if (cp_status st = check_args(m && index, "cp_metric_index: null argument")) return st;
  return guarded([&] { *index = m->metric.index_of_metric(); });
}

cp_status cp_verify_geometry(const cp_metric* m, double h, cp_geometry_report* out) {
  if (cp_status st = check_args(m && out && h > 0, "cp_verify_geometry: bad argument")) return st;
  return guarded([&] {
    const GeometryReport r = verify_geometry(m->metric, m->ms, m->metric.grid, h);
    *out = {r.h,
            r.max_christoffel_on_axis,
            r.max_christoffel_on_axis_half,
            r.geodesic_residual,
            r.geodesic_residual_half,
            r.offaxis_stencil_error,
            r.offaxis_stencil_error_half,
            r.offaxis_order,
            r.curvature_mismatch,
            r.curvature_mismatch_half,
            r.index_of_metric,
            r.inertia_constant ? 1 : 0};
  });
}

cp_status cp_geometry_report_save(const cp_geometry_report* r, const char* path) {
  if (cp_status st = check_args(r && path, "cp_geometry_report_save: null argument")) return st;
  return guarded([&] {
    GeometryReport g;
    g.h = r->h;
    g.max_christoffel_on_axis = r->max_christoffel_on_axis;
    g.max_christoffel_on_axis_half = r->max_christoffel_on_axis_half;
    g.geodesic_residual = r->geodesic_residual;
    g.geodesic_residual_half = r->geodesic_residual_half;
    g.offaxis_stencil_error = r->offaxis_stencil_error;
    g.offaxis_stencil_error_half = r->offaxis_stencil_error_half;
    g.offaxis_order = r->offaxis_order;
    g.curvature_mismatch = r->curvature_mismatch;
    g.curvature_mismatch_half = r->curvature_mismatch_half;
    g.index_of_metric = r->index_of_metric;
    g.inertia_constant = r->inertia_constant != 0;
    io::write_text_file(path, io::dump(io::geometry_report_to_json(g)));
  });
}

void cp_metric_free(cp_metric* m) { delete m; }

}  // extern "C"
