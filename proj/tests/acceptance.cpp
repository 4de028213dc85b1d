// Acceptance run: one PASS/FAIL line per criterion, exit status 1 when any
// criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "conjpoints/abstract_system.hpp"
#include "conjpoints/geometry.hpp"
#include "conjpoints/prescribe.hpp"
#include "conjpoints/sds.hpp"
#include "support.hpp"

using namespace conjpoints;
using conjpoints::testing::constant_morse_sturm;
using conjpoints::testing::random_system;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Fixture {
  std::string set;
  double a, b;
  PrescribedBundle bundle;
  double seconds = 0.0;
};

int failures = 0;

void verdict(int id, bool ok, const std::string& detail) {
  std::printf("C%d %s  %s\n", id, ok ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

bool same_instants(const ConjugateReport& x, const ConjugateReport& y, double t_tol) {
  if (x.instants.size() != y.instants.size() || x.clusters.size() != y.clusters.size()) {
    return false;
  }
  for (std::size_t i = 0; i < x.instants.size(); ++i) {
    if (std::abs(x.instants[i].t - y.instants[i].t) > t_tol) return false;
    if (x.instants[i].multiplicity != y.instants[i].multiplicity) return false;
  }
  return true;
}

}  // namespace

int main() {
  const PipelineOptions popts;
  std::vector<Fixture> fixtures = {
      {"3.141592653589793", 0.0, 4.0, {}},
      {"1.0;1.5:2.0", 0.0, 2.5, {}},
      {"0.1:0.2;0.3:0.4;0.7:1.0", 0.0, 1.0, {}},
  };
  for (auto& fx : fixtures) {
    const auto t0 = Clock::now();
    fx.bundle = build_prescribed(ClosedSetDescriptor::parse(fx.set, fx.a, fx.b), popts);
    fx.seconds = seconds_since(t0);
  }

  // C1: oscillator oracle.
  {
    const auto t0 = Clock::now();
    const SympDiffSystem x = constant_morse_sturm(1, -1.0, 0.0, 3.5, 4096);
    const ConjugateReport r = conjugate_instants(x);
    const double secs = seconds_since(t0);
    const bool one = r.instants.size() == 1 && r.clusters.empty();
    const double err = one ? std::abs(r.instants[0].t - M_PI) : INFINITY;
    verdict(1, one && err <= 1e-6 && r.instants[0].multiplicity == 1 && secs < 1.0,
            "|t - pi| = " + fmt("%.2e", err) + ", " + fmt("%.3f s", secs));
  }

  // C2: flat oracle, d(t) = t.
  {
    const SympDiffSystem x = constant_morse_sturm(1, 0.0, 0.0, 1.0, 4096);
    const ConjugateReport r = conjugate_instants(x);
    double err = 0.0;
    for (std::size_t k = 0; k < r.times.size(); ++k) {
      err = std::max(err, std::abs(r.d_trace[k] - r.times[k]));
    }
    verdict(2, r.instants.empty() && r.clusters.empty() && err <= 1e-10,
            "max |d(t) - t| = " + fmt("%.2e", err));
  }

  // C3: prescribed conjugate sets end to end.
  {
    bool ok = true;
    std::string detail;
    for (const auto& fx : fixtures) {
      const auto& B = fx.bundle;
      const double dist = detection_distance_steps(B.report, B.F, B.nominal_step);
      const bool idx = B.index.nondegenerate && B.index.index == 1;
      const Nondegeneracy nd = check_nondegenerate(B.reduction.system);
      const bool fine = dist <= 2.0 && idx && nd.nondegenerate && nd.index == 1 &&
                        fx.seconds < 10.0;
      ok = ok && fine;
      detail += "[" + fx.set + "] dist " + fmt("%.2f", dist) + " steps, index " +
                std::to_string(B.index.index) + "/" + std::to_string(nd.index) + ", " +
                fmt("%.1f s", fx.seconds) + "; ";
    }
    verdict(3, ok, detail);
  }

  // C4: rho identities on the working grid of every fixture.
  {
    double e0 = 0.0, e1 = 0.0;
    for (const auto& fx : fixtures) {
      const auto& B = fx.bundle;
      const UniformGrid& g = B.realized.grid();
      for (int k = 0; k <= g.N(); ++k) {
        const double t = g.time(k), r = B.R(t), dr = B.R.derivative(t);
        const double det = rho_curve(B.R, t).matrix().determinant();
        const double det1 = rho_derivative(B.R, t).matrix().determinant();
        e0 = std::max(e0, std::abs(det - (1.0 - r * r)));
        e1 = std::max(e1, std::abs(det1 + (r * r + dr * dr)) / (1.0 + r * r + dr * dr));
      }
    }
    verdict(4, e0 <= 1e-12 && e1 <= 1e-12,
            "det rho " + fmt("%.2e", e0) + ", det rho' (relative) " + fmt("%.2e", e1));
  }

  // C5: isomorphism invariance under the Morse-Sturm reduction, n = 2.
  {
    int agree = 0;
    double a_res = 0.0, b_def = 0.0;
    for (int i = 0; i < 50; ++i) {
      const SympDiffSystem x = random_system(2, i % 3 == 0 ? 1 : 0, 1000 + i);
      const MorseSturmReduction red = to_morse_sturm(x);
      a_res = std::max(a_res, red.max_A_residual);
      b_def = std::max(b_def, red.max_B_defect);
      DetectOptions o;
      if (same_instants(conjugate_instants(x, o), conjugate_instants(red.system, o), 1e-5)) {
        ++agree;
      }
    }
    verdict(5, agree == 50 && a_res <= 1e-8 && b_def <= 1e-8,
            std::to_string(agree) + "/50 agree, |A~| " + fmt("%.2e", a_res) + ", B defect " +
                fmt("%.2e", b_def));
  }

  // C6: push-forward law on every fixture.
  std::vector<std::pair<std::string, SympDiffSystem>> systems = {
      {"oscillator", constant_morse_sturm(1, -1.0, 0.0, 3.5, 4096)},
      {"flat", constant_morse_sturm(1, 0.0, 0.0, 1.0, 4096)},
      {"random n=2", random_system(2, 0, 7)},
  };
  {
    double worst = 0.0;
    std::string detail;
    for (const auto& [name, x] : systems) {
      const double e = pushforward_law_defect(x, fundamental_matrix(x));
      worst = std::max(worst, e);
      detail += name + " " + fmt("%.1e", e) + ", ";
    }
    for (const auto& fx : fixtures) {
      const double e = pushforward_law_defect(fx.bundle.reduction.system, fx.bundle.solution);
      worst = std::max(worst, e);
      detail += "[" + fx.set + "] " + fmt("%.1e", e) + ", ";
    }
    verdict(6, worst <= 1e-6, detail + "max " + fmt("%.2e", worst));
  }

  // C7: symplectic drift.
  {
    double worst = 0.0;
    for (const auto& [name, x] : systems) worst = std::max(worst, fundamental_matrix(x).max_drift);
    for (const auto& fx : fixtures) worst = std::max(worst, fx.bundle.solution.max_drift);
    verdict(7, worst <= 1e-8, "max drift " + fmt("%.2e", worst));
  }

  // C8: geometry round trip, both causal variants.
  {
    bool ok = true;
    std::string detail;
    for (const auto& fx : fixtures) {
      const auto& B = fx.bundle;
      const MorseSturm ms = B.reduction.ms;
      const int g_index = inertia(ms.g).n_minus;
      for (Causal c : {Causal::kSpacelike, Causal::kTimelike}) {
        const ConformalMetric m = metric_from_morse_sturm(ms, c);
        const GeometryReport g = verify_geometry(m, ms, ms.grid);
        const double axis_order =
            observed_order(g.max_christoffel_on_axis, g.max_christoffel_on_axis_half);
        const double geo_order = observed_order(g.geodesic_residual, g.geodesic_residual_half);
        const int want = c == Causal::kSpacelike ? 1 : g_index + 1;
        const bool fine = g.max_christoffel_on_axis <= 1e-4 && axis_order >= 1.9 &&
                          geo_order >= 1.9 && g.curvature_mismatch <= 1e-3 &&
                          g.index_of_metric == want && g.inertia_constant;
        ok = ok && fine;
        detail += "[" + fx.set + " " + to_string(c) + "] axis " +
                  fmt("%.1e", g.max_christoffel_on_axis) + " curv " +
                  fmt("%.1e", g.curvature_mismatch) + " index " +
                  std::to_string(g.index_of_metric) + "; ";
      }
    }
    verdict(8, ok, detail);
  }

  // C9: n = 1 isolation.
  {
    int simple = 0, total = 0;
    for (int i = 0; i < 50; ++i) {
      const SympDiffSystem x = random_system(1, i % 2, 5000 + i);
      const ConjugateReport r = conjugate_instants(x);
      bool ok = r.clusters.empty();
      const double h = x.grid().step();
      const FundamentalSolution sol = fundamental_matrix(x);
      for (const auto& inst : r.instants) {
        ++total;
        const double dl = conjugate_determinant(fundamental_at(x, sol, inst.t - 2 * h));
        const double dr = conjugate_determinant(fundamental_at(x, sol, inst.t + 2 * h));
        ok = ok && inst.multiplicity == 1 && inst.regular && dl * dr < 0.0;
      }
      if (ok) ++simple;
    }
    verdict(9, simple == 50 && total > 0,
            std::to_string(simple) + "/50 systems with only simple sign changes (" +
                std::to_string(total) + " zeros)");
  }

  // C10: vanishing function.
  {
    bool ok = true;
    std::string detail;
    for (const auto& fx : fixtures) {
      const auto& B = fx.bundle;
      const UniformGrid nominal(fx.a, fx.b, popts.grid_N);
      double on_f = 0.0, off_f = INFINITY;
      for (int k = 0; k <= nominal.N(); ++k) {
        const double t = nominal.time(k);
        if (B.F.contains(t)) on_f = std::max(on_f, std::abs(B.f(t)));
        if (B.F.distance(t) >= 10.0 * B.nominal_step) off_f = std::min(off_f, B.f(t));
      }
      // Central differences of orders 1..3 on the working grid, in edge-length units.
      const UniformGrid& w = B.realized.grid();
      const double h = w.step(), len = B.vanishing.edge_length;
      std::vector<double> s(w.N() + 1);
      for (int k = 0; k <= w.N(); ++k) s[k] = B.f(w.time(k));
      double d1 = 0.0, d2 = 0.0, d3 = 0.0;
      for (int k = 2; k + 2 <= w.N(); ++k) {
        d1 = std::max(d1, std::abs(s[k + 1] - s[k - 1]) / (2 * h) * len);
        d2 = std::max(d2, std::abs(s[k + 1] - 2 * s[k] + s[k - 1]) / (h * h) * len * len);
        d3 = std::max(d3, std::abs(s[k + 2] - 2 * s[k + 1] + 2 * s[k - 1] - s[k - 2]) /
                              (2 * h * h * h) * len * len * len);
      }
      const double bound = B.vanishing.derivative_budget;
      const bool fine = on_f < 1e-12 && off_f >= 10.0 * popts.detect.zero_tol && d1 <= bound &&
                        d2 <= bound && d3 <= bound;
      ok = ok && fine;
      detail += "[" + fx.set + "] on F " + fmt("%.0e", on_f) + ", min off F " +
                fmt("%.1e", off_f) + ", L^i|f^(i)| " + fmt("%.2f", d1) + "/" + fmt("%.2f", d2) +
                "/" + fmt("%.2f", d3) + "; ";
    }
    verdict(10, ok, detail);
  }

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
