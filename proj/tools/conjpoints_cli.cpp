// Command-line front end over the C interface.
// Exit codes: 0 success, 1 verification failed, 2 bad input, 3 pipeline or
// numerical failure.

#include <cstdio>
#include <filesystem>
#include <string>

#include "CLI11.hpp"
#include "conjpoints/conjpoints.h"

namespace {

constexpr int kExitVerify = 1;
constexpr int kExitInput = 2;
constexpr int kExitPipeline = 3;

int exit_code(cp_status s) {
  switch (s) {
    case CP_OK:
      return 0;
    case CP_ERR_ARGUMENT:
    case CP_ERR_PRECONDITION:
      return kExitInput;
    default:
      return kExitPipeline;
  }
}

struct Failure {
  int code;
};

void check(cp_status s, const char* what) {
  if (s == CP_OK) return;
  std::fprintf(stderr, "conjpoints: %s: %s\n", what, cp_last_error());
  throw Failure{exit_code(s)};
}

struct Tolerances {
  cp_detect_options detect{};
  Tolerances() { cp_detect_options_default(&detect); }

  void attach(CLI::App* cmd) {
    cmd->add_option("--tol-zero", detect.zero_tol, "Zero tolerance on d / max|d|");
    cmd->add_option("--rank-tol", detect.rank_tol, "Rank tolerance for multiplicities");
    cmd->add_option("--t-tol", detect.t_tol, "Bisection tolerance on instants");
    cmd->add_option("--symp-tol", detect.reproject_tol, "Drift that triggers reprojection");
  }
};

template <class T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() { Free(p); }
};

using System = Handle<cp_system, cp_system_free>;
using Report = Handle<cp_report, cp_report_free>;
using Prescribed = Handle<cp_prescribed, cp_prescribed_free>;
using Metric = Handle<cp_metric, cp_metric_free>;

cp_causal causal_of(const std::string& s) { return s == "timelike" ? CP_TIMELIKE : CP_SPACELIKE; }

void print_report(const cp_report* r) {
  int ni = 0, nc = 0;
  check(cp_report_counts(r, &ni, &nc), "report");
  for (int i = 0; i < ni; ++i) {
    double t;
    int mult, sig, has_sig, regular;
    check(cp_report_instant(r, i, &t, &mult, &sig, &has_sig, &regular), "report");
    if (has_sig) {
      std::printf("instant t=%.10g multiplicity=%d signature=%d regular=%d\n", t, mult, sig,
                  regular);
    } else {
      std::printf("instant t=%.10g multiplicity=%d signature=n/a\n", t, mult);
    }
  }
  for (int i = 0; i < nc; ++i) {
    double lo, hi;
    check(cp_report_cluster(r, i, &lo, &hi), "report");
    std::printf("cluster [%.10g, %.10g]\n", lo, hi);
  }
  if (ni == 0 && nc == 0) std::printf("no conjugate instants\n");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conjugate instants of symplectic differential systems"};
  app.require_subcommand(1);

  // prescribe
  auto* prescribe = app.add_subcommand("prescribe", "Build a system whose conjugate set is F");
  std::vector<double> interval{0.0, 1.0};
  std::string set;
  int grid_N = 4096;
  std::string out_dir = ".";
  std::string causal = "spacelike";
  Tolerances ptol;
  prescribe->add_option("--interval", interval, "Interval A B")->expected(2);
  prescribe->add_option("--set", set, "Closed set F, e.g. \"1.0;1.5:2.0\"")->required();
  prescribe->add_option("--grid", grid_N, "Nominal grid steps");
  prescribe->add_option("--out", out_dir, "Output directory");
  prescribe->add_option("--causal", causal, "Metric variant")
      ->check(CLI::IsMember({"spacelike", "timelike"}));
  ptol.attach(prescribe);

  // detect
  auto* detect = app.add_subcommand("detect", "Conjugate instants of a system file");
  std::string in_path, out_path, csv_path;
  Tolerances dtol;
  detect->add_option("--in", in_path, "System JSON")->required();
  detect->add_option("--out", out_path, "Report JSON");
  detect->add_option("--csv", csv_path, "d(t) trace CSV");
  dtol.attach(detect);

  // reduce
  auto* reduce = app.add_subcommand("reduce", "Reduce a system file to Morse-Sturm form");
  reduce->add_option("--in", in_path, "System JSON")->required();
  reduce->add_option("--out", out_path, "Morse-Sturm system JSON")->required();

  // metric
  auto* metric = app.add_subcommand("metric", "Conformally flat metric of a Morse-Sturm system");
  metric->add_option("--in", in_path, "Morse-Sturm system JSON")->required();
  metric->add_option("--out", out_path, "Metric JSON")->required();
  metric->add_option("--causal", causal, "Metric variant")
      ->check(CLI::IsMember({"spacelike", "timelike"}));

  // verify-geometry
  auto* verify = app.add_subcommand("verify-geometry", "Geodesic and curvature checks of a metric");
  double fd_step = 1e-3;
  verify->add_option("--in", in_path, "Metric JSON")->required();
  verify->add_option("--out", out_path, "Geometry report JSON");
  verify->add_option("--fd-step", fd_step, "Finite-difference step h")
      ->check(CLI::PositiveNumber);

  // trace
  auto* trace = app.add_subcommand("trace", "Write d(t) of a system file as CSV");
  Tolerances ttol;
  trace->add_option("--in", in_path, "System JSON")->required();
  trace->add_option("--out", out_path, "CSV path")->required();
  ttol.attach(trace);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*prescribe) {
      cp_pipeline_options opts;
      cp_pipeline_options_default(&opts);
      opts.grid_N = grid_N;
      opts.detect = ptol.detect;
      Prescribed p;
      check(cp_prescribe(set.c_str(), interval[0], interval[1], &opts, &p.p), "prescribe");
      std::error_code ec;
      std::filesystem::create_directories(out_dir, ec);
      if (ec) {
        std::fprintf(stderr, "conjpoints: cannot create '%s'\n", out_dir.c_str());
        return kExitInput;
      }
      const std::filesystem::path dir(out_dir);
      System ms;
      check(cp_prescribed_system(p.p, &ms.p), "prescribe");
      check(cp_system_save(ms.p, (dir / "system.json").c_str()), "write system");
      Metric m;
      check(cp_metric_from_system(ms.p, causal_of(causal), &m.p), "metric");
      check(cp_metric_save(m.p, (dir / "metric.json").c_str()), "write metric");
      Report r;
      check(cp_prescribed_report(p.p, &r.p), "prescribe");
      check(cp_report_save_json(r.p, (dir / "report.json").c_str()), "write report");
      check(cp_report_save_csv(r.p, (dir / "trace.csv").c_str()), "write trace");
      check(cp_prescribed_save_summary(p.p, (dir / "summary.json").c_str()), "write summary");
      double dist;
      int index, passed;
      check(cp_prescribed_summary(p.p, &dist, &index, &passed), "prescribe");
      print_report(r.p);
      std::printf("abstract index %d, distance to F %.3g grid steps: %s\n", index, dist,
                  passed ? "PASS" : "FAIL");
      return passed ? 0 : kExitVerify;
    }
    if (*detect) {
      System s;
      check(cp_system_load(in_path.c_str(), &s.p), "read system");
      Report r;
      check(cp_detect(s.p, &dtol.detect, &r.p), "detect");
      if (!out_path.empty()) check(cp_report_save_json(r.p, out_path.c_str()), "write report");
      if (!csv_path.empty()) check(cp_report_save_csv(r.p, csv_path.c_str()), "write trace");
      print_report(r.p);
      return 0;
    }
    if (*reduce) {
      System s, ms;
      check(cp_system_load(in_path.c_str(), &s.p), "read system");
      double a_res = 0.0, b_def = 0.0;
      check(cp_to_morse_sturm(s.p, &ms.p, &a_res, &b_def), "reduce");
      check(cp_system_save(ms.p, out_path.c_str()), "write system");
      std::printf("residual A %.3g, B defect %.3g\n", a_res, b_def);
      return 0;
    }
    if (*metric) {
      System s;
      check(cp_system_load(in_path.c_str(), &s.p), "read system");
      Metric m;
      check(cp_metric_from_system(s.p, causal_of(causal), &m.p), "metric");
      check(cp_metric_save(m.p, out_path.c_str()), "write metric");
      int index = 0;
      check(cp_metric_index(m.p, &index), "metric");
      std::printf("metric index %d\n", index);
      return 0;
    }
    if (*verify) {
      Metric m;
      check(cp_metric_load(in_path.c_str(), &m.p), "read metric");
      cp_geometry_report g;
      check(cp_verify_geometry(m.p, fd_step, &g), "verify-geometry");
      if (!out_path.empty()) check(cp_geometry_report_save(&g, out_path.c_str()), "write report");
      const bool ok = g.max_christoffel_on_axis <= 1e-4 && g.geodesic_residual <= 1e-4 &&
                      g.curvature_mismatch <= 1e-3 && g.inertia_constant;
      std::printf(
          "christoffel on axis %.3g, geodesic residual %.3g, curvature mismatch %.3g, "
          "index %d: %s\n",
          g.max_christoffel_on_axis, g.geodesic_residual, g.curvature_mismatch, g.index_of_metric,
          ok ? "PASS" : "FAIL");
      return ok ? 0 : kExitVerify;
    }
    if (*trace) {
      System s;
      check(cp_system_load(in_path.c_str(), &s.p), "read system");
      Report r;
      check(cp_detect(s.p, &ttol.detect, &r.p), "detect");
      check(cp_report_save_csv(r.p, out_path.c_str()), "write trace");
      return 0;
    }
  } catch (const Failure& f) {
    return f.code;
  }
  return kExitInput;
}
