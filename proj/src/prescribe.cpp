#include "conjpoints/prescribe.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <sstream>

#include "conjpoints/errors.hpp"

namespace conjpoints {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\n\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\n\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& s) {
  const std::string t = trim(s);
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw PreconditionError("set descriptor: not a number: '" + t + "'");
  }
  if (used != t.size() || !std::isfinite(v)) {
    throw PreconditionError("set descriptor: not a number: '" + t + "'");
  }
  return v;
}

}  // namespace

ClosedSetDescriptor::ClosedSetDescriptor(double a, double b, std::vector<Interval> items)
    : a_(a), b_(b) {
  if (!(a < b)) throw PreconditionError("set descriptor: need a < b");
  for (const auto& it : items) {
    if (!(it.lo <= it.hi)) throw PreconditionError("set descriptor: interval with lo > hi");
    if (!(it.lo > a) || it.hi > b) {
      throw PreconditionError("set descriptor: F must lie in ]a, b] with inf F > a");
    }
  }
  std::sort(items.begin(), items.end(),
            [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
  for (const auto& it : items) {
    if (!items_.empty() && it.lo <= items_.back().hi) {
      items_.back().hi = std::max(items_.back().hi, it.hi);
    } else {
      items_.push_back(it);
    }
  }
}

ClosedSetDescriptor ClosedSetDescriptor::parse(const std::string& text, double a, double b) {
  std::vector<Interval> items;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (trim(item).empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos) {
      const double x = parse_number(item);
      items.push_back({x, x});
    } else {
      items.push_back({parse_number(item.substr(0, colon)), parse_number(item.substr(colon + 1))});
    }
  }
  return ClosedSetDescriptor(a, b, std::move(items));
}

double ClosedSetDescriptor::inf() const {
  if (items_.empty()) throw PreconditionError("set descriptor: inf of the empty set");
  return items_.front().lo;
}

bool ClosedSetDescriptor::contains(double t) const {
  for (const auto& it : items_) {
    if (t >= it.lo && t <= it.hi) return true;
  }
  return false;
}

double ClosedSetDescriptor::distance(double t) const {
  double d = kInf;
  for (const auto& it : items_) {
    if (t < it.lo) {
      d = std::min(d, it.lo - t);
    } else if (t > it.hi) {
      d = std::min(d, t - it.hi);
    } else {
      return 0.0;
    }
  }
  return d;
}

std::string ClosedSetDescriptor::to_string() const {
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < items_.size(); ++i) {
    if (i) os << ';';
    if (items_[i].lo == items_[i].hi) {
      os << items_[i].lo;
    } else {
      os << items_[i].lo << ':' << items_[i].hi;
    }
  }
  return os.str();
}

std::vector<Interval> complement_gaps(const ClosedSetDescriptor& f) {
  std::vector<Interval> gaps;
  double left = -kInf;
  for (const auto& it : f.intervals()) {
    gaps.push_back({left, it.lo});
    left = it.hi;
  }
  gaps.push_back({left, kInf});
  return gaps;
}

// ---------------------------------------------------------------------------
// Vanishing function

namespace {

/// Value and first three derivatives of a scalar function.
struct Jet {
  double d[4] = {0.0, 0.0, 0.0, 0.0};
};

Jet operator*(const Jet& u, const Jet& v) {
  Jet r;
  r.d[0] = u.d[0] * v.d[0];
  r.d[1] = u.d[1] * v.d[0] + u.d[0] * v.d[1];
  r.d[2] = u.d[2] * v.d[0] + 2.0 * u.d[1] * v.d[1] + u.d[0] * v.d[2];
  r.d[3] = u.d[3] * v.d[0] + 3.0 * u.d[2] * v.d[1] + 3.0 * u.d[1] * v.d[2] + u.d[0] * v.d[3];
  return r;
}

Jet jet_exp(const Jet& u) {
  const double e = std::exp(u.d[0]);
  return {{e, e * u.d[1], e * (u.d[2] + u.d[1] * u.d[1]),
           e * (u.d[3] + 3.0 * u.d[1] * u.d[2] + u.d[1] * u.d[1] * u.d[1])}};
}

Jet jet_reciprocal(const Jet& u) {
  const double v = u.d[0], v1 = u.d[1], v2 = u.d[2], v3 = u.d[3];
  return {{1.0 / v, -v1 / (v * v), (2.0 * v1 * v1 - v * v2) / (v * v * v),
           (-6.0 * v1 * v1 * v1 + 6.0 * v * v1 * v2 - v * v * v3) / (v * v * v * v)}};
}

/// Edge profile in the distance x > 0 to the boundary of the gap:
/// exp(-delta/x) q / (1 + q), q = (x/L)^4.  Flat at x = 0, close to
/// (x/L)^4 once x >> delta, saturating at 1 for x >> L.
Jet edge_jet(double x, double delta, double len) {
  Jet flat_exp{{-delta / x, delta / (x * x), -2.0 * delta / (x * x * x),
                6.0 * delta / (x * x * x * x)}};
  const double l4 = std::pow(len, 4);
  Jet one_plus_q{{1.0 + std::pow(x, 4) / l4, 4.0 * x * x * x / l4, 12.0 * x * x / l4,
                  24.0 * x / l4}};
  Jet sat = jet_reciprocal(one_plus_q);
  for (double& v : sat.d) v = -v;
  sat.d[0] += 1.0;
  return jet_exp(flat_exp) * sat;
}

struct Bump {
  Interval gap;
  double delta = 0.0;
  double len = 1.0;
  double amp = 1.0;

  Jet jet(double t) const {
    if (!(t > gap.lo && t < gap.hi)) return {};
    Jet j{{1.0, 0.0, 0.0, 0.0}};
    if (std::isfinite(gap.lo)) j = j * edge_jet(t - gap.lo, delta, len);
    if (std::isfinite(gap.hi)) {
      Jet r = edge_jet(gap.hi - t, delta, len);
      r.d[1] = -r.d[1];
      r.d[3] = -r.d[3];
      j = j * r;
    }
    for (double& v : j.d) v *= amp;
    return j;
  }
};

/// max over orders i = 0..3 of len^i sup |b^(i)| on the gap, clipped to a
/// window around [a, b].
double derivative_sup(Bump b, double a, double bb) {
  b.amp = 1.0;
  const double span = bb - a;
  const double lo = std::max(b.gap.lo, a - span);
  const double hi = std::min(b.gap.hi, bb + span);
  const int samples = 20000;
  double m = 0.0;
  for (int i = 1; i < samples; ++i) {
    const Jet j = b.jet(lo + (hi - lo) * i / samples);
    double scale = 1.0;
    for (double v : j.d) {
      m = std::max(m, scale * std::abs(v));
      scale *= b.len;
    }
  }
  return m;
}

}  // namespace

SmoothScalarCurve vanishing_function(const ClosedSetDescriptor& f, const VanishingOptions& opts) {
  if (!(opts.edge_length > 0.0) || !(opts.flat_width > 0.0) ||
      !(opts.derivative_budget > 0.0)) {
    throw PreconditionError("vanishing_function: edge length, flat width and budget must be positive");
  }
  auto bumps = std::make_shared<std::vector<Bump>>();
  const auto gaps = complement_gaps(f);
  for (std::size_t r = 0; r < gaps.size(); ++r) {
    Bump bump{gaps[r], opts.flat_width, opts.edge_length, 1.0};
    const double cap = std::ldexp(1.0, -static_cast<int>(r + 1));
    if (!std::isfinite(gaps[r].lo) && !std::isfinite(gaps[r].hi)) {
      bump.amp = cap;  // F empty: a positive constant
    } else {
      bump.amp = cap * std::min(1.0, opts.derivative_budget / derivative_sup(bump, f.a(), f.b()));
    }
    bumps->push_back(bump);
  }
  auto eval = [bumps](double t, int order) {
    double s = 0.0;
    for (const auto& b : *bumps) {
      if (!std::isfinite(b.gap.lo) && !std::isfinite(b.gap.hi)) {
        s += order == 0 ? b.amp : 0.0;
      } else {
        s += b.jet(t).d[order];
      }
    }
    return s;
  };
  SmoothScalarCurve out;
  out.value = [eval](double t) { return eval(t, 0); };
  out.derivative = [eval](double t) { return eval(t, 1); };
  out.second = [eval](double t) { return eval(t, 2); };
  out.third = [eval](double t) { return eval(t, 3); };
  return out;
}

SymmetricForm rho_curve(const SmoothScalarCurve& r, double t) {
  const double rt = r(t);
  if (!(rt > 0.0)) throw PreconditionError("rho_curve: R(t) must be positive");
  const double c = std::cos(t), s = std::sin(t);
  Eigen::Matrix2d m;
  m << 1.0 + rt * c, rt * s, rt * s, 1.0 - rt * c;
  return SymmetricForm(m);
}

SymmetricForm rho_derivative(const SmoothScalarCurve& r, double t) {
  const double rt = r(t);
  if (!(rt > 0.0)) throw PreconditionError("rho_curve: R(t) must be positive");
  const double dr = r.derivative(t);
  const double c = std::cos(t), s = std::sin(t);
  Eigen::Matrix2d m;
  m << dr * c - rt * s, dr * s + rt * c, dr * s + rt * c, -dr * c + rt * s;
  return SymmetricForm(m);
}

// ---------------------------------------------------------------------------
// Pipeline

namespace {

template <class Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

}  // namespace

PrescribedBundle build_prescribed(const ClosedSetDescriptor& F, const PipelineOptions& opts) {
  if (opts.grid_N < 64) throw PreconditionError("build_prescribed: grid_N must be >= 64");
  if (opts.oversample < 1) throw PreconditionError("build_prescribed: oversample must be >= 1");
  PrescribedBundle out;
  out.F = F;
  const double a = F.a(), b = F.b();
  const UniformGrid grid(a, b, opts.grid_N * opts.oversample);
  out.nominal_step = (b - a) / opts.grid_N;

  out.vanishing.edge_length = opts.edge_steps * out.nominal_step;
  out.vanishing.flat_width = opts.flat_steps * out.nominal_step;
  out.vanishing.derivative_budget = opts.derivative_budget;
  out.f = stage("vanishing_function", [&] { return vanishing_function(F, out.vanishing); });
  {
    const SmoothScalarCurve f = out.f;
    out.R.value = [f](double t) { return 1.0 - f(t); };
    out.R.derivative = [f](double t) { return -f.derivative(t); };
  }

  const double target_c = F.empty() ? 0.5 * (a + b) : 0.5 * (a + F.inf());
  const int c_index = std::max(1, grid.nearest(target_c));
  out.c = grid.time(c_index);

  const LagrangianFrame l0 = LagrangianFrame::vertical(2);
  const LagrangianFrame horizontal = LagrangianFrame::horizontal(2);
  const SmoothScalarCurve rcurve = out.R;
  FrameCurve xibar = [rcurve, l0, horizontal](double t) -> Eigen::MatrixXd {
    return chart_inverse(l0, horizontal, rho_curve(rcurve, t)).columns();
  };

  out.extension = stage("extend_lagrangian", [&] {
    return extend_lagrangian(xibar, l0, grid, c_index, opts.chart_value, opts.chart_scale);
  });
  out.abstract = stage("abstract_system", [&] {
    return AbstractSystem(grid, out.extension.frames, "prescribed F = {" + F.to_string() + "}");
  });
  out.index = stage("abstract_index", [&] { return abstract_index(out.abstract); });
  out.realized = stage("realize_system", [&] { return realize_system(out.abstract); });
  out.reduction = stage("to_morse_sturm", [&] { return to_morse_sturm(out.realized); });
  out.solution = stage("fundamental_matrix", [&] {
    return fundamental_matrix(out.reduction.system, opts.detect.integration);
  });
  DetectOptions detect = opts.detect;
  if (!detect.exclusion_radius) detect.exclusion_radius = 5.0 * out.nominal_step;
  detect.max_isolated_run = static_cast<int>(std::lround(opts.isolated_run_steps * opts.oversample));
  out.report = stage("conjugate_instants", [&] {
    return conjugate_instants(out.reduction.system, out.solution, detect);
  });
  return out;
}

double detection_distance_steps(const ConjugateReport& rep, const ClosedSetDescriptor& F,
                                double step) {
  std::vector<Interval> detected;
  for (const auto& i : rep.instants) detected.push_back({i.t, i.t});
  for (const auto& c : rep.clusters) detected.push_back({c.lo, c.hi});
  if (detected.empty() && F.empty()) return 0.0;
  if (detected.empty() || F.empty()) return kInf;

  auto dist_to = [](const std::vector<Interval>& set, double t) {
    double d = kInf;
    for (const auto& it : set) {
      d = std::min(d, t < it.lo ? it.lo - t : (t > it.hi ? t - it.hi : 0.0));
    }
    return d;
  };
  // For unions of intervals the one-sided Hausdorff distance is attained at
  // an interval endpoint or where the other set has a gap midpoint; endpoints
  // of both sets and the midpoints of the other set's gaps cover it.
  auto one_sided = [&](const std::vector<Interval>& from, const std::vector<Interval>& to) {
    std::vector<double> probes;
    for (const auto& it : from) {
      probes.push_back(it.lo);
      probes.push_back(it.hi);
    }
    for (std::size_t i = 0; i + 1 < to.size(); ++i) {
      const double mid = 0.5 * (to[i].hi + to[i + 1].lo);
      for (const auto& it : from) {
        if (mid >= it.lo && mid <= it.hi) probes.push_back(mid);
      }
    }
    double m = 0.0;
    for (double p : probes) m = std::max(m, dist_to(to, p));
    return m;
  };
  std::sort(detected.begin(), detected.end(),
            [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
  const double h = std::max(one_sided(detected, F.intervals()), one_sided(F.intervals(), detected));
  return h / step;
}

}  // namespace conjpoints
