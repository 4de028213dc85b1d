#include <cmath>

#include "conjpoints/errors.hpp"
#include "conjpoints/prescribe.hpp"

namespace conjpoints {

namespace {

double flat(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }

/// Smooth step: 0 for x <= 0, 1 for x >= 1, flat to all orders at both ends.
double smooth_step(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double p = flat(x), q = flat(1.0 - x);
  return p / (p + q);
}

double spectral_norm(const SymmetricForm& s) { return s.eigenvalues().cwiseAbs().maxCoeff(); }

bool same_inertia_nondegenerate(const SymmetricForm& s, const Inertia& in) {
  const Inertia si = inertia(s);
  return si.n_zero == 0 && si == in;
}

/// Derivative of a form curve by a fourth-order stencil: central when
/// t - 2 ds >= lo, forward otherwise.
SymmetricForm form_derivative(const FormCurve& s, double t, double ds, double lo) {
  if (t - 2.0 * ds >= lo) {
    return SymmetricForm((8.0 * (s(t + ds).matrix() - s(t - ds).matrix()) -
                          (s(t + 2.0 * ds).matrix() - s(t - 2.0 * ds).matrix())) /
                         (12.0 * ds));
  }
  return SymmetricForm((-25.0 * s(t).matrix() + 48.0 * s(t + ds).matrix() -
                        36.0 * s(t + 2.0 * ds).matrix() + 16.0 * s(t + 3.0 * ds).matrix() -
                        3.0 * s(t + 4.0 * ds).matrix()) /
                       (12.0 * ds));
}

/// Composite Simpson with midpoints over `cells` uniform cells of [a, c].
template <class T, class Fn>
T simpson(Fn&& g, double a, double c, int cells, T zero) {
  const double h = (c - a) / cells;
  T acc = zero;
  for (int k = 0; k < cells; ++k) {
    const double t = a + k * h;
    acc = acc + (g(t) + 4.0 * g(t + 0.5 * h) + g(t + h)) * (h / 6.0);
  }
  return acc;
}

}  // namespace

AverageExtension extend_average(const FormCurve& taubar, const SymmetricForm& u, double a,
                                double c, int quad_cells, double eps_start, double eps_min,
                                double taylor_step) {
  if (u.dim() != 2) throw PreconditionError("extend_average: implemented for 2 x 2 forms");
  if (!(a < c) || quad_cells < 2) throw PreconditionError("extend_average: need a < c");
  const Inertia in = inertia(u);
  if (in.n_zero != 0) throw PreconditionError("extend_average: u is degenerate");
  const SymmetricForm tau_c = taubar(c);
  if (!same_inertia_nondegenerate(tau_c, in)) {
    throw PreconditionError("extend_average: taubar(c) is not in the inertia class of u");
  }
  const FixedInertiaCoords2 coords(in);

  // Cubic Taylor polynomial of taubar at c in spectral coordinates, from a
  // degree-6 fit through seven forward samples.
  Eigen::Matrix<double, 7, 7> vand;
  Eigen::Matrix<double, 7, 3> vals;
  double hint = 0.0;
  for (int j = 0; j < 7; ++j) {
    const Eigen::Vector3d k = coords.to_coords(taubar(c + j * taylor_step), hint);
    hint = k(2);
    vals.row(j) = k.transpose();
    for (int p = 0; p < 7; ++p) vand(j, p) = std::pow(static_cast<double>(j), p);
  }
  Eigen::Matrix<double, 7, 3> poly = vand.fullPivLu().solve(vals);
  for (int p = 0; p < 7; ++p) poly.row(p) /= std::pow(taylor_step, p);
  const Eigen::Vector3d k_u = coords.to_coords(u, vals(0, 2));

  auto taylor = [poly, c](double t) {
    const double x = t - c;
    return Eigen::Vector3d(poly.row(0).transpose() + x * poly.row(1).transpose() +
                           x * x * poly.row(2).transpose() + x * x * x * poly.row(3).transpose());
  };

  const double r = distance_to_degenerate(u);
  for (double eps = std::min(eps_start, 0.5 * (c - a)); eps >= eps_min; eps *= 0.5) {
    auto gamma = [=](double t) {
      const double s = smooth_step((t - (c - eps)) / eps);
      return coords.from_coords(k_u + s * (taylor(t) - k_u));
    };
    auto phi1 = [=](double t) { return 1.0 - smooth_step((t - (c - eps)) / (0.5 * eps)); };

    const double q1 = simpson(phi1, a, c, quad_cells, 0.0);
    const SymmetricForm q2 = simpson(
        [&](double t) { return t <= c - eps ? SymmetricForm::Zero(2) : (gamma(t) - u) * (1.0 - phi1(t)); },
        a, c, quad_cells, SymmetricForm::Zero(2));
    const SymmetricForm delta = q2 * (-1.0 / q1);
    const SymmetricForm base = u + delta;

    AverageExtension ext;
    ext.a = a;
    ext.c = c;
    ext.eps = eps;
    ext.u = u;
    ext.delta = delta;
    ext.radius = r;
    ext.quad_cells = quad_cells;
    ext.tau = [=](double t) {
      if (t >= c) return taubar(t);
      if (t <= c - eps) return base;
      const double p1 = phi1(t);
      return base * p1 + gamma(t) * (1.0 - p1);
    };

    // Deviation of gamma, sup norm and membership on a dense sample.
    bool inside = same_inertia_nondegenerate(base, in);
    const int dense = 4 * quad_cells;
    for (int k = 0; k <= dense && inside; ++k) {
      const double t = a + (c - a) * k / dense;
      const SymmetricForm tau = ext.tau(t);
      inside = same_inertia_nondegenerate(tau, in);
      ext.sup_norm = std::max(ext.sup_norm, spectral_norm(tau));
      if (t > c - eps) {
        ext.gamma_deviation = std::max(ext.gamma_deviation, spectral_norm(gamma(t) - u));
      }
    }
    if (!inside) continue;
    if (eps / (c - a - eps) * ext.gamma_deviation >= std::min(r, 1.0)) continue;
    const SymmetricForm total = simpson(ext.tau, a, c, quad_cells, SymmetricForm::Zero(2));
    ext.integral_defect = spectral_norm(total - u * (c - a));
    return ext;
  }
  throw NumericalError("extend_average: no admissible eps above " + std::to_string(eps_min));
}

FormExtension extend_forms(const FormCurve& sigmabar, double a, double c, double b_prime,
                           int quad_cells, double eps_min) {
  if (!(a < c && c < b_prime)) throw PreconditionError("extend_forms: need a < c < b'");
  const double ds = 1e-3 * (b_prime - c);
  FormCurve taubar = [sigmabar, ds, c](double t) { return form_derivative(sigmabar, t, ds, c); };
  const SymmetricForm sc = sigmabar(c);
  const Inertia in = inertia(sc);
  if (in.n_zero != 0 || !(inertia(taubar(c)) == in)) {
    throw PreconditionError("extend_forms: sigmabar(c) and sigmabar'(c) differ in inertia");
  }
  FormExtension out;
  out.radius = distance_to_degenerate(sc);
  const SymmetricForm u = sc * (1.0 / (c - a));
  const double taylor_step = std::min((b_prime - c) / 6.0, 0.01 * (c - a));

  double eps = 0.25 * (c - a);
  for (;;) {
    out.average = extend_average(taubar, u, a, c, quad_cells, eps, eps_min, taylor_step);
    out.eta_times_M = out.average.eps * out.average.sup_norm;
    if (out.eta_times_M < out.radius) break;
    eps = 0.5 * out.average.eps;
    if (eps < eps_min) throw NumericalError("extend_forms: no eta with eta M < r");
  }

  const double h = (c - a) / quad_cells;
  const FormCurve tau = out.average.tau;
  out.node_times.reserve(quad_cells + 1);
  out.node_sigma.reserve(quad_cells + 1);
  out.node_times.push_back(a);
  out.node_sigma.push_back(SymmetricForm::Zero(2));
  for (int k = 0; k < quad_cells; ++k) {
    const double t = a + k * h;
    const SymmetricForm step =
        (tau(t) + tau(t + 0.5 * h) * 4.0 + tau(t + h)) * (h / 6.0);
    out.node_times.push_back(k + 1 == quad_cells ? c : a + (k + 1) * h);
    out.node_sigma.push_back(out.node_sigma.back() + step);
  }
  const auto nodes = out.node_sigma;
  out.sigma = [=](double t) {
    if (t >= c) return sigmabar(t);
    const int k = std::clamp(static_cast<int>(std::floor((t - a) / h)), 0, quad_cells - 1);
    const double t0 = a + k * h;
    const double dt = t - t0;
    return nodes[k] + (tau(t0) + tau(t0 + 0.5 * dt) * 4.0 + tau(t)) * (dt / 6.0);
  };
  return out;
}

namespace {

/// Smallest singular value of F1^T J F2 for orthonormalized frames: zero iff
/// the two Lagrangians meet.
double transversality(const Eigen::MatrixXd& l1, const Eigen::MatrixXd& l2) {
  const int n = static_cast<int>(l1.cols());
  const Eigen::MatrixXd m = orthonormalize(l1).transpose() * symplectic_J(n) * orthonormalize(l2);
  return Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues().minCoeff();
}

}  // namespace

LagrangianExtension extend_lagrangian(const FrameCurve& xibar, const LagrangianFrame& xi0,
                                      const UniformGrid& grid, int c_index, ChartValueMode mode,
                                      double chart_scale) {
  if (xi0.n() != 2) throw PreconditionError("extend_lagrangian: implemented for n = 2");
  if (c_index < 1 || c_index >= grid.N()) {
    throw PreconditionError("extend_lagrangian: c must be an interior grid node");
  }
  const double a = grid.a();
  const double c = grid.time(c_index);
  const LagrangianFrame lc(xibar(c));
  if (intersection_dim(lc, xi0) != 0) {
    throw PreconditionError("extend_lagrangian: xibar(c) is not transverse to xi0");
  }

  auto chart_curve = [&xibar, &xi0](const LagrangianFrame& xi1) -> FormCurve {
    return [xibar, xi0, xi1](double t) { return chart(xi0, xi1, LagrangianFrame(xibar(t))); };
  };
  const double ds = 1e-3 * (grid.b() - c);

  LagrangianExtension out;
  const SymmetricForm p0 = SymmetricForm::Diagonal(Eigen::Vector2d(1.0, -1.0));
  SymmetricForm p = p0;
  if (mode == ChartValueMode::kMatched) {
    const LagrangianFrame xi1_0 = complement_with_chart_value(lc, xi0, p0);
    const SymmetricForm d0 = form_derivative(chart_curve(xi1_0), c, ds, c);
    if (inertia(d0).n_zero != 0) {
      throw NumericalError("extend_lagrangian: xibar'(c) is degenerate");
    }
    p = SymmetricForm(p0.matrix() * d0.matrix().inverse() * p0.matrix() / (c - a));
  } else if (mode == ChartValueMode::kScaled) {
    if (!(chart_scale > 0.0)) throw PreconditionError("extend_lagrangian: chart_scale must be positive");
    p = p0 * (chart_scale * (c - a));
  }

  const double tc_ref = 1e-2;
  for (int attempt = 0; attempt < 4; ++attempt, p = p * 2.0) {
    const LagrangianFrame xi1 = complement_with_chart_value(lc, xi0, p);
    const double t0 = transversality(xi1.columns(), lc.columns());
    int kb = c_index;
    while (kb < grid.N() &&
           transversality(xi1.columns(), xibar(grid.time(kb + 1))) > tc_ref * t0) {
      ++kb;
    }
    if (kb - c_index < 10) {
      ++out.recharts;
      continue;
    }
    out.xi1 = xi1;
    out.P = p;
    out.c_index = c_index;
    out.b_prime_index = kb;
    const FormCurve sigmabar = chart_curve(xi1);
    const SymmetricForm dsig = form_derivative(sigmabar, c, ds, c);
    const Eigen::MatrixXd target = p.matrix() / (c - a);
    out.matched_defect = (dsig.matrix() - target).norm() / target.norm();
    out.forms = extend_forms(sigmabar, a, c, grid.time(kb), c_index, 8.0 * grid.step());

    out.frames.reserve(grid.N() + 1);
    for (int k = 0; k < c_index; ++k) {
      out.frames.push_back(chart_inverse(xi0, xi1, out.forms.node_sigma[k]).columns());
    }
    for (int k = c_index; k <= grid.N(); ++k) out.frames.push_back(xibar(grid.time(k)));
    return out;
  }
  throw NumericalError("extend_lagrangian: chart horizon shorter than 10 grid steps");
}

}  // namespace conjpoints
