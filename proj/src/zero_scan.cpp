#include "zero_scan.hpp"

#include <algorithm>
#include <cmath>

namespace conjpoints::detail {

namespace {

/// Bisection for a sign change of f on [lo, hi] given f(lo) f(hi) < 0.
double bisect(const std::function<double(double)>& f, double lo, double hi, double flo,
              double t_tol) {
  for (int it = 0; it < 200 && hi - lo > t_tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Golden-section minimum of g on [lo, hi].
double golden_min(const std::function<double(double)>& g, double lo, double hi, double t_tol) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
  double g1 = g(x1), g2 = g(x2);
  for (int it = 0; it < 200 && hi - lo > t_tol; ++it) {
    if (g1 < g2) {
      hi = x2;
      x2 = x1;
      g2 = g1;
      x1 = hi - r * (hi - lo);
      g1 = g(x1);
    } else {
      lo = x1;
      x1 = x2;
      g1 = g2;
      x2 = lo + r * (hi - lo);
      g2 = g(x2);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

std::vector<ZeroFeature> scan_zero_set(const std::vector<double>& t, const std::vector<double>& d,
                                       const ZeroScanOptions& opts,
                                       const std::function<double(double)>& eval) {
  std::vector<ZeroFeature> out;
  const int last = static_cast<int>(d.size()) - 1;
  const double thr = opts.threshold;
  auto small = [&](int k) { return std::abs(d[k]) < thr; };
  auto above = [&](double s) { return std::abs(eval(s)) - thr; };

  // Boundary of the sub-threshold set between grid points k_out (above) and
  // k_in (below).
  auto boundary = [&](int k_out, int k_in) {
    if (!eval) return t[k_in];
    return bisect(above, t[k_out], t[k_in], std::abs(d[k_out]) - thr, opts.t_tol);
  };

  int k = std::max(opts.first_index, 0);
  while (k <= last) {
    if (small(k)) {
      const int k0 = k;
      while (k + 1 <= last && small(k + 1)) ++k;
      const int k1 = k;
      const bool has_left = k0 - 1 >= 0;
      const bool has_right = k1 + 1 <= last;
      const double lo = has_left ? boundary(k0 - 1, k0) : t[k0];
      const double hi = has_right ? boundary(k1 + 1, k1) : t[k1];
      if (k1 - k0 + 1 > opts.max_isolated_run) {
        out.push_back({ZeroKind::kCluster, 0.5 * (lo + hi), lo, hi});
      } else if (has_left && has_right && (d[k0 - 1] > 0) != (d[k1 + 1] > 0)) {
        double tz;
        if (eval) {
          tz = bisect(eval, t[k0 - 1], t[k1 + 1], d[k0 - 1], opts.t_tol);
        } else {
          // Zero of the chord through the bracketing samples.
          const double da = d[k0 - 1];
          const double db = d[k1 + 1];
          tz = t[k0 - 1] + (t[k1 + 1] - t[k0 - 1]) * da / (da - db);
        }
        out.push_back({ZeroKind::kSignChange, tz, tz, tz});
      } else {
        const double tm = eval ? golden_min([&](double s) { return std::abs(eval(s)); }, lo, hi,
                                            opts.t_tol)
                               : 0.5 * (lo + hi);
        out.push_back({ZeroKind::kTouch, tm, lo, hi});
      }
      ++k;
      continue;
    }
    if (eval && opts.touch_gate > 0.0 && k > opts.first_index && k + 1 <= last &&
        std::abs(d[k]) < opts.touch_gate && std::abs(d[k]) <= std::abs(d[k - 1]) &&
        std::abs(d[k]) < std::abs(d[k + 1]) && (d[k - 1] > 0) == (d[k] > 0) &&
        (d[k + 1] > 0) == (d[k] > 0)) {
      const double tm = golden_min([&](double s) { return std::abs(eval(s)); }, t[k - 1],
                                   t[k + 1], opts.t_tol);
      const double dm = eval(tm);
      if (std::abs(dm) < thr || (dm > 0) != (d[k] > 0)) {
        out.push_back({ZeroKind::kTouch, tm, tm, tm});
        ++k;
        continue;
      }
    }
    if (k + 1 <= last && !small(k + 1) && (d[k] > 0) != (d[k + 1] > 0)) {
      double tz;
      if (eval) {
        tz = bisect(eval, t[k], t[k + 1], d[k], opts.t_tol);
      } else {
        tz = t[k] + (t[k + 1] - t[k]) * d[k] / (d[k] - d[k + 1]);
      }
      out.push_back({ZeroKind::kSignChange, tz, tz, tz});
    }
    ++k;
  }
  return out;
}

}  // namespace conjpoints::detail
