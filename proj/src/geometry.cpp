#include "conjpoints/geometry.hpp"

#include <cmath>
#include <limits>
#include <memory>
#include <random>

#include "conjpoints/errors.hpp"

namespace conjpoints {

const char* to_string(Causal c) { return c == Causal::kSpacelike ? "spacelike" : "timelike"; }

Causal parse_causal(const std::string& s) {
  if (s == "spacelike") return Causal::kSpacelike;
  if (s == "timelike") return Causal::kTimelike;
  throw PreconditionError("causal must be 'spacelike' or 'timelike', got '" + s + "'");
}

namespace {

double max_abs(const Eigen::MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

Eigen::MatrixXd r_derivative(const ConformalMetric& m, double t) {
  if (m.dR) return m.dR(t);
  const double e = 1e-3;
  return (8.0 * (m.R(t + e) - m.R(t - e)) - (m.R(t + 2 * e) - m.R(t - 2 * e))) / (12.0 * e);
}

}  // namespace

double ConformalMetric::omega(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd v = x.head(n);
  return omega_sign() * v.dot(g.matrix() * R(x(n)) * v);
}

Eigen::VectorXd ConformalMetric::omega_gradient(const Eigen::VectorXd& x) const {
  const Eigen::VectorXd v = x.head(n);
  const Eigen::MatrixXd gr = g.matrix() * R(x(n));
  Eigen::VectorXd out(n + 1);
  out.head(n) = omega_sign() * (gr + gr.transpose()) * v;
  out(n) = omega_sign() * v.dot(g.matrix() * r_derivative(*this, x(n)) * v);
  return out;
}

Eigen::MatrixXd ConformalMetric::flat() const {
  Eigen::MatrixXd g0 = Eigen::MatrixXd::Zero(n + 1, n + 1);
  g0.topLeftCorner(n, n) = g.matrix();
  g0(n, n) = dx_sign();
  return g0;
}

Eigen::MatrixXd ConformalMetric::metric(const Eigen::VectorXd& x) const {
  return std::exp(omega(x)) * flat();
}

int ConformalMetric::index_of_metric() const { return inertia(SymmetricForm(flat())).n_minus; }

Eigen::VectorXd ConformalMetric::axis_point(double t) const {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n + 1);
  x(n) = t;
  return x;
}

ConformalMetric metric_from_morse_sturm(const MorseSturm& ms, Causal causal) {
  ConformalMetric m;
  m.n = ms.n();
  m.g = ms.g;
  m.R = ms.R;
  m.grid = ms.grid;
  m.causal = causal;
  if (ms.R_samples) {
    auto interp = std::make_shared<MatrixInterpolant>(ms.grid, *ms.R_samples);
    m.dR = [interp](double t) { return interp->derivative(t); };
  }
  return m;
}

Christoffel christoffel(const ConformalMetric& m, const Eigen::VectorXd& x, double h) {
  if (!(h > 0.0)) throw PreconditionError("christoffel: h must be positive");
  const int d = m.n + 1;
  const Eigen::MatrixXd gx = m.metric(x);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(gx);
  if (!lu.isInvertible() || !std::isfinite(gx.norm())) {
    throw NumericalError("christoffel: metric is numerically degenerate");
  }
  const Eigen::MatrixXd ginv = lu.inverse();
  // dg[l](i, j) = d_l g_ij
  std::vector<Eigen::MatrixXd> dg(d);
  for (int l = 0; l < d; ++l) {
    Eigen::VectorXd xp = x, xm = x;
    xp(l) += h;
    xm(l) -= h;
    dg[l] = (m.metric(xp) - m.metric(xm)) / (2.0 * h);
  }
  Christoffel out(d, Eigen::MatrixXd::Zero(d, d));
  for (int k = 0; k < d; ++k) {
    for (int i = 0; i < d; ++i) {
      for (int j = i; j < d; ++j) {
        double s = 0.0;
        for (int l = 0; l < d; ++l) {
          s += ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        }
        out[k](i, j) = out[k](j, i) = 0.5 * s;
      }
    }
  }
  return out;
}

Christoffel christoffel_exact(const ConformalMetric& m, const Eigen::VectorXd& x) {
  const int d = m.n + 1;
  const Eigen::VectorXd dw = m.omega_gradient(x);
  const Eigen::MatrixXd g0 = m.flat();
  const Eigen::VectorXd raised = g0.inverse() * dw;
  Christoffel out(d, Eigen::MatrixXd::Zero(d, d));
  for (int k = 0; k < d; ++k) {
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) {
        out[k](i, j) =
            0.5 * ((k == i ? dw(j) : 0.0) + (k == j ? dw(i) : 0.0) - g0(i, j) * raised(k));
      }
    }
  }
  return out;
}

double christoffel_sup(const Christoffel& c) {
  double s = 0.0;
  for (const auto& m : c) s = std::max(s, max_abs(m));
  return s;
}

double christoffel_distance(const Christoffel& a, const Christoffel& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s = std::max(s, max_abs(a[k] - b[k]));
  return s;
}

double geodesic_residual(const ConformalMetric& m, const UniformGrid& grid, double h) {
  double worst = 0.0;
  for (int k = 0; k <= grid.N(); ++k) {
    const Christoffel c = christoffel(m, m.axis_point(grid.time(k)), h);
    for (const auto& ck : c) worst = std::max(worst, std::abs(ck(m.n, m.n)));
  }
  return worst;
}

double max_christoffel_on_axis(const ConformalMetric& m, const UniformGrid& grid, double h) {
  double worst = 0.0;
  for (int k = 0; k <= grid.N(); ++k) {
    worst = std::max(worst, christoffel_sup(christoffel(m, m.axis_point(grid.time(k)), h)));
  }
  return worst;
}

JacobiRoundTrip jacobi_roundtrip(const ConformalMetric& m, const MorseSturm& ms,
                                 const UniformGrid& grid, double h) {
  const int n = m.n;
  const double s = m.omega_sign();
  const Eigen::MatrixXd ginv = m.g.matrix().inverse();
  auto omega_back = [&](const Eigen::VectorXd& x) {
    return std::log(m.metric(x)(n, n) / m.dx_sign());
  };
  std::vector<Eigen::MatrixXd> rec;
  rec.reserve(grid.N() + 1);
  double worst = 0.0, scale = 0.0;
  for (int k = 0; k <= grid.N(); ++k) {
    const Eigen::VectorXd x0 = m.axis_point(grid.time(k));
    const double w0 = omega_back(x0);
    Eigen::MatrixXd hess(n, n);
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd xp = x0, xm = x0;
      xp(i) += h;
      xm(i) -= h;
      hess(i, i) = (omega_back(xp) - 2.0 * w0 + omega_back(xm)) / (h * h);
      for (int j = 0; j < i; ++j) {
        Eigen::VectorXd pp = x0, pm = x0, mp = x0, mm = x0;
        pp(i) += h, pp(j) += h;
        pm(i) += h, pm(j) -= h;
        mp(i) -= h, mp(j) += h;
        mm(i) -= h, mm(j) -= h;
        hess(i, j) = hess(j, i) =
            (omega_back(pp) - omega_back(pm) - omega_back(mp) + omega_back(mm)) / (4.0 * h * h);
      }
    }
    rec.push_back(ginv * hess / (2.0 * s));
    const Eigen::MatrixXd r = ms.R(grid.time(k));
    worst = std::max(worst, max_abs(rec.back() - r));
    scale = std::max(scale, max_abs(r));
  }
  JacobiRoundTrip out;
  out.abs_mismatch = worst;
  out.mismatch = scale > 0.0 ? worst / scale : worst;
  out.recovered = MorseSturm::sampled(m.g, grid, std::move(rec));
  return out;
}

double observed_order(double e_h, double e_half, double floor) {
  if (e_h <= floor && e_half <= floor) return std::numeric_limits<double>::infinity();
  if (e_half <= 0.0) return std::numeric_limits<double>::infinity();
  return std::log2(e_h / e_half);
}

namespace {

/// Normal offset r with |Omega| <= 0.1 for |x_i| <= r, capped at 0.1.
double normal_radius(const ConformalMetric& m, const UniformGrid& grid) {
  double sup = 0.0;
  for (int k = 0; k <= grid.N(); ++k) sup = std::max(sup, max_abs(m.g.matrix() * m.R(grid.time(k))));
  const double n2 = static_cast<double>(m.n) * m.n;
  return sup > 0.0 ? std::min(0.1, std::sqrt(0.1 / (n2 * sup))) : 0.1;
}

double offaxis_error(const ConformalMetric& m, const UniformGrid& grid, double r, double h) {
  double worst = 0.0;
  constexpr int kProbes = 7;
  for (int p = 1; p <= kProbes; ++p) {
    Eigen::VectorXd x = m.axis_point(grid.a() + (grid.b() - grid.a()) * p / (kProbes + 1));
    x.head(m.n).setConstant(r);
    worst = std::max(worst, christoffel_distance(christoffel(m, x, h), christoffel_exact(m, x)));
  }
  return worst;
}

}  // namespace

GeometryReport verify_geometry(const ConformalMetric& m, const MorseSturm& ms,
                               const UniformGrid& grid, double h, int inertia_samples) {
  GeometryReport rep;
  rep.h = h;
  rep.max_christoffel_on_axis = max_christoffel_on_axis(m, grid, h);
  rep.max_christoffel_on_axis_half = max_christoffel_on_axis(m, grid, h / 2);
  rep.geodesic_residual = geodesic_residual(m, grid, h);
  rep.geodesic_residual_half = geodesic_residual(m, grid, h / 2);
  const double r = normal_radius(m, grid);
  rep.offaxis_stencil_error = offaxis_error(m, grid, r, h);
  rep.offaxis_stencil_error_half = offaxis_error(m, grid, r, h / 2);
  rep.offaxis_order = observed_order(rep.offaxis_stencil_error, rep.offaxis_stencil_error_half);
  rep.curvature_mismatch = jacobi_roundtrip(m, ms, grid, h).mismatch;
  rep.curvature_mismatch_half = jacobi_roundtrip(m, ms, grid, h / 2).mismatch;
  rep.index_of_metric = m.index_of_metric();

  std::mt19937_64 rng(20260);
  std::uniform_real_distribution<double> unit(-1.0, 1.0), along(grid.a(), grid.b());
  const Inertia expected = inertia(SymmetricForm(m.flat()));
  rep.inertia_constant = true;
  for (int i = 0; i < inertia_samples; ++i) {
    Eigen::VectorXd x(m.n + 1);
    for (int j = 0; j < m.n; ++j) x(j) = r * unit(rng);
    x(m.n) = along(rng);
    if (!(inertia(SymmetricForm(m.metric(x))) == expected)) rep.inertia_constant = false;
  }
  return rep;
}

}  // namespace conjpoints
