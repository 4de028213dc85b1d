#include <algorithm>
#include <cmath>

#include "conjpoints/errors.hpp"
#include "conjpoints/sds.hpp"

namespace conjpoints {

namespace {

double max_abs(const Eigen::MatrixXd& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

Eigen::MatrixXd checked_inverse(const Eigen::MatrixXd& z, double t, const char* what) {
  Eigen::FullPivLU<Eigen::MatrixXd> lu(z);
  if (!lu.isInvertible()) {
    throw PreconditionError(std::string(what) + ": Z is singular at t = " + std::to_string(t));
  }
  return lu.inverse();
}

/// Transported blocks for phi = [[Z, 0], [Z^{-T} W, Z^{-T}]].
SpBlocks transport(const SpBlocks& c, const Eigen::MatrixXd& z, const Eigen::MatrixXd& zinv,
                   const Eigen::MatrixXd& dz, const Eigen::MatrixXd& w,
                   const Eigen::MatrixXd& dw) {
  const Eigen::MatrixXd& a = c.A;
  const Eigen::MatrixXd& b = c.B.matrix();
  const Eigen::MatrixXd& cc = c.C.matrix();
  SpBlocks out;
  out.A = z * a * zinv - z * b * w * zinv + dz * zinv;
  out.B = SymmetricForm(z * b * z.transpose());
  out.C = SymmetricForm(zinv.transpose() * (w * a + cc - w * b * w + a.transpose() * w + dw) *
                        zinv);
  return out;
}

/// RK4 for Z' = Z M(t), Z(a) = Id, with M the quintic interpolant of the grid
/// samples m.  Each cell is split into enough substeps to keep |M| dt below
/// kMaxStepRate, and every stage evaluates the quintic of the current cell.
constexpr double kMaxStepRate = 0.01;
constexpr int kMaxSubsteps = 256;

std::vector<Eigen::MatrixXd> integrate_right(const UniformGrid& grid,
                                             const std::vector<Eigen::MatrixXd>& m, int n) {
  const MatrixInterpolant interp(grid, m);
  std::vector<Eigen::MatrixXd> z;
  z.reserve(grid.N() + 1);
  z.push_back(Eigen::MatrixXd::Identity(n, n));
  for (int k = 0; k < grid.N(); ++k) {
    const double t0 = grid.time(k);
    const double h = grid.time(k + 1) - t0;
    const double rate = std::max(m[k].norm(), m[k + 1].norm()) * h;
    const int sub = std::clamp(static_cast<int>(std::ceil(rate / kMaxStepRate)), 1, kMaxSubsteps);
    const double dt = h / sub;
    Eigen::MatrixXd zk = z.back();
    Eigen::MatrixXd m0 = m[k];
    for (int s = 0; s < sub; ++s) {
      const double t = t0 + s * dt;
      const Eigen::MatrixXd mm = interp.value_in_cell(t + 0.5 * dt, k);
      const Eigen::MatrixXd m1 = s + 1 == sub ? m[k + 1] : interp.value_in_cell(t + dt, k);
      const Eigen::MatrixXd k1 = zk * m0;
      const Eigen::MatrixXd k2 = (zk + 0.5 * dt * k1) * mm;
      const Eigen::MatrixXd k3 = (zk + 0.5 * dt * k2) * mm;
      const Eigen::MatrixXd k4 = (zk + dt * k3) * m1;
      zk += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      m0 = m1;
    }
    z.push_back(std::move(zk));
  }
  return z;
}

void require_nondegenerate(const SympDiffSystem& x, const char* what) {
  const Nondegeneracy nd = check_nondegenerate(x);
  if (!nd.nondegenerate) {
    throw PreconditionError(std::string(what) + ": B(t) is degenerate or changes inertia at t = " +
                            std::to_string(x.grid().time(nd.first_failure.value_or(0))));
  }
}

}  // namespace

SympDiffSystem apply_isomorphism(const SympDiffSystem& x, const IsoPair& iso) {
  const UniformGrid& grid = x.grid();
  const double h = grid.step();
  std::vector<SpBlocks> samples;
  samples.reserve(grid.N() + 1);
  for (int k = 0; k <= grid.N(); ++k) {
    const double t = grid.time(k);
    const Eigen::MatrixXd z = iso.Z(t);
    const Eigen::MatrixXd zinv = checked_inverse(z, t, "apply_isomorphism");
    samples.push_back(transport(x.grid_coefficients(k), z, zinv, iso.Z_derivative(t, h),
                                iso.W(t), iso.W_derivative(t, h)));
  }
  return SympDiffSystem::sampled(x.n(), grid, samples);
}

Reduction flatten_B(const SympDiffSystem& x) {
  require_nondegenerate(x, "flatten_B");
  const int n = x.n();
  const UniformGrid& grid = x.grid();
  std::vector<Eigen::MatrixXd> b(grid.N() + 1);
  for (int k = 0; k <= grid.N(); ++k) b[k] = x.grid_coefficients(k).B.matrix();
  const std::vector<Eigen::MatrixXd> db = grid_derivative(b, grid.step(), 4);
  std::vector<Eigen::MatrixXd> rate(grid.N() + 1);
  for (int k = 0; k <= grid.N(); ++k) rate[k] = -0.5 * db[k] * b[k].inverse();
  std::vector<Eigen::MatrixXd> z = integrate_right(grid, rate, n);

  const Eigen::MatrixXd& b0 = b[0];
  Reduction red;
  std::vector<SpBlocks> samples;
  std::vector<Eigen::MatrixXd> w(grid.N() + 1, Eigen::MatrixXd::Zero(n, n));
  samples.reserve(grid.N() + 1);
  for (int k = 0; k <= grid.N(); ++k) {
    const double t = grid.time(k);
    // Newton steps onto Z B Z^T = B(a); the defect before them is reported.
    for (int it = 0; it < 3; ++it) {
      const Eigen::MatrixXd m = z[k] * b[k] * z[k].transpose();
      const Eigen::MatrixXd e = m - b0;
      if (it == 0) red.max_B_defect = std::max(red.max_B_defect, max_abs(e));
      z[k] -= 0.5 * e * m.inverse() * z[k];
    }
    const Eigen::MatrixXd zinv = checked_inverse(z[k], t, "flatten_B");
    SpBlocks tr = transport(x.grid_coefficients(k), z[k], zinv, z[k] * rate[k], w[k], w[k]);
    tr.B = SymmetricForm(b0);
    samples.push_back(std::move(tr));
  }
  red.system = SympDiffSystem::sampled(n, grid, samples);
  red.iso = IsoPair::sampled(grid, std::move(z), std::move(w));
  return red;
}

MorseSturmReduction to_morse_sturm(const SympDiffSystem& x) {
  require_nondegenerate(x, "to_morse_sturm");
  const int n = x.n();
  const UniformGrid& grid = x.grid();
  const Reduction flat = flatten_B(x);
  const SympDiffSystem& x1 = flat.system;
  const Eigen::MatrixXd b = x1.grid_coefficients(0).B.matrix();
  const Eigen::MatrixXd binv = b.inverse();

  std::vector<SpBlocks> c(grid.N() + 1);
  std::vector<Eigen::MatrixXd> w(grid.N() + 1), y(grid.N() + 1);
  for (int k = 0; k <= grid.N(); ++k) {
    c[k] = x1.grid_coefficients(k);
    w[k] = 0.5 * (binv * c[k].A + c[k].A.transpose() * binv);
    y[k] = b * w[k] - c[k].A;
  }
  const std::vector<Eigen::MatrixXd> dw = grid_derivative(w, grid.step(), 6);
  const std::vector<Eigen::MatrixXd> z2 = integrate_right(grid, y, n);

  MorseSturmReduction out;
  out.max_B_defect = flat.max_B_defect;
  std::vector<Eigen::MatrixXd> r_samples;
  std::vector<Eigen::MatrixXd> z_total, w_total;
  r_samples.reserve(grid.N() + 1);
  for (int k = 0; k <= grid.N(); ++k) {
    const double t = grid.time(k);
    out.max_group_defect =
        std::max(out.max_group_defect, max_abs(y[k] * b + b * y[k].transpose()));
    const Eigen::MatrixXd zinv = checked_inverse(z2[k], t, "to_morse_sturm");
    const SpBlocks tr = transport(c[k], z2[k], zinv, z2[k] * y[k], w[k], dw[k]);
    out.max_A_residual = std::max(out.max_A_residual, max_abs(tr.A));
    out.max_B_defect = std::max(out.max_B_defect, max_abs(tr.B.matrix() - b));
    r_samples.push_back(b * tr.C.matrix());

    const Eigen::MatrixXd z1 = flat.iso.Z(t);
    z_total.push_back(z2[k] * z1);
    w_total.push_back(z1.transpose() * w[k] * z1);
  }
  if (out.max_A_residual > 1e-8) {
    throw NumericalError("to_morse_sturm: residual A~ = " + std::to_string(out.max_A_residual) +
                         " above 1e-8 (grid too coarse)");
  }
  out.ms = MorseSturm::sampled(SymmetricForm(binv), grid, std::move(r_samples));
  out.system = out.ms.to_system();
  out.iso = IsoPair::sampled(grid, std::move(z_total), std::move(w_total));
  return out;
}

}  // namespace conjpoints
