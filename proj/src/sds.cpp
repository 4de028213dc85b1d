#include "conjpoints/sds.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "conjpoints/errors.hpp"

namespace conjpoints {

SympDiffSystem SympDiffSystem::analytic(int n, UniformGrid grid, CoefficientFn coeff,
                                        std::string analytic_id) {
  if (n < 1) throw PreconditionError("SympDiffSystem: n must be positive");
  SympDiffSystem s;
  s.n_ = n;
  s.grid_ = grid;
  s.coeff_ = std::move(coeff);
  s.analytic_id_ = std::move(analytic_id);
  const SpBlocks c = s.coeff_(grid.a());
  if (c.A.rows() != n || c.B.dim() != n || c.C.dim() != n) {
    throw PreconditionError("SympDiffSystem: coefficient blocks do not match n");
  }
  return s;
}

SympDiffSystem SympDiffSystem::sampled(int n, UniformGrid grid,
                                       const std::vector<SpBlocks>& samples) {
  if (static_cast<int>(samples.size()) != grid.N() + 1) {
    throw PreconditionError("SympDiffSystem: need grid_N + 1 coefficient samples");
  }
  std::vector<Eigen::MatrixXd> xs;
  xs.reserve(samples.size());
  for (const auto& c : samples) {
    if (c.A.rows() != n || c.A.cols() != n || c.B.dim() != n || c.C.dim() != n) {
      throw PreconditionError("SympDiffSystem: coefficient blocks do not match n");
    }
    xs.push_back(assemble_sp(c.A, c.B, c.C));
  }
  SympDiffSystem s;
  s.n_ = n;
  s.grid_ = grid;
  s.sampled_ = true;
  s.interp_ = MatrixInterpolant(grid, std::move(xs));
  return s;
}

SpBlocks SympDiffSystem::coefficients(double t) const {
  if (sampled_) return split_sp(interp_.value(t));
  return coeff_(t);
}

Eigen::MatrixXd SympDiffSystem::matrix(double t) const {
  if (sampled_) return interp_.value(t);
  const SpBlocks c = coeff_(t);
  return assemble_sp(c.A, c.B, c.C);
}

SpBlocks SympDiffSystem::grid_coefficients(int k) const {
  if (sampled_) return split_sp(interp_.samples().at(k));
  return coeff_(grid_.time(k));
}

Eigen::MatrixXd SympDiffSystem::matrix_derivative(double t) const {
  if (sampled_) return interp_.derivative(t);
  const double d = 1e-3 * std::min(1.0, b() - a());
  return (8.0 * (matrix(t + d) - matrix(t - d)) - (matrix(t + 2 * d) - matrix(t - 2 * d))) /
         (12.0 * d);
}

SympDiffSystem SympDiffSystem::regridded(int N) const {
  if (sampled_) throw PreconditionError("regridded: sampled systems keep their grid");
  return analytic(n_, UniformGrid(a(), b(), N), coeff_, analytic_id_);
}

Nondegeneracy check_nondegenerate(const SympDiffSystem& x, double zero_tol) {
  Nondegeneracy out;
  std::optional<Inertia> first;
  for (int k = 0; k <= x.grid().N(); ++k) {
    const Inertia in = inertia(x.grid_coefficients(k).B, zero_tol);
    if (in.n_zero != 0 || (first && !(in == *first))) {
      out.first_failure = k;
      return out;
    }
    if (!first) first = in;
  }
  out.nondegenerate = true;
  out.index = first->n_minus;
  return out;
}

// ---------------------------------------------------------------------------

MorseSturm MorseSturm::sampled(SymmetricForm g, UniformGrid grid,
                               std::vector<Eigen::MatrixXd> R) {
  MorseSturm ms;
  ms.g = std::move(g);
  ms.grid = grid;
  auto interp = std::make_shared<MatrixInterpolant>(grid, R);
  ms.R = [interp](double t) { return interp->value(t); };
  ms.R_samples = std::move(R);
  return ms;
}

double MorseSturm::symmetry_defect() const {
  double worst = 0.0;
  for (int k = 0; k <= grid.N(); ++k) {
    const Eigen::MatrixXd gr = g.matrix() * R(grid.time(k));
    worst = std::max(worst, (gr - gr.transpose()).cwiseAbs().maxCoeff());
  }
  return worst;
}

SympDiffSystem MorseSturm::to_system() const {
  if (inertia(g).n_zero != 0) throw PreconditionError("MorseSturm: g is degenerate");
  const int dim = n();
  const SymmetricForm binv(g.matrix().inverse());
  if (R_samples) {
    std::vector<SpBlocks> samples;
    samples.reserve(R_samples->size());
    for (const auto& r : *R_samples) {
      samples.push_back({Eigen::MatrixXd::Zero(dim, dim), binv, SymmetricForm(g.matrix() * r)});
    }
    return SympDiffSystem::sampled(dim, grid, samples);
  }
  const SymmetricForm gg = g;
  const MatrixFn rr = R;
  return SympDiffSystem::analytic(
      dim, grid,
      [dim, binv, gg, rr](double t) {
        return SpBlocks{Eigen::MatrixXd::Zero(dim, dim), binv,
                        SymmetricForm(gg.matrix() * rr(t))};
      },
      "morse-sturm");
}

// ---------------------------------------------------------------------------

MorseSturm as_morse_sturm(const SympDiffSystem& x, double tol) {
  const UniformGrid& grid = x.grid();
  const Eigen::MatrixXd b0 = x.grid_coefficients(0).B.matrix();
  const double scale = 1.0 + b0.cwiseAbs().maxCoeff();
  if (inertia(SymmetricForm(b0)).n_zero != 0) throw PreconditionError("as_morse_sturm: B is degenerate");
  const SymmetricForm g(b0.inverse());
  std::vector<Eigen::MatrixXd> r;
  r.reserve(grid.N() + 1);
  for (int k = 0; k <= grid.N(); ++k) {
    const SpBlocks c = x.grid_coefficients(k);
    if (c.A.cwiseAbs().maxCoeff() > tol * scale ||
        (c.B.matrix() - b0).cwiseAbs().maxCoeff() > tol * scale) {
      throw PreconditionError("as_morse_sturm: A is not zero or B is not constant at t = " +
                              std::to_string(grid.time(k)));
    }
    r.push_back(b0 * c.C.matrix());
  }
  if (x.is_sampled()) return MorseSturm::sampled(g, grid, std::move(r));
  MorseSturm ms;
  ms.g = g;
  ms.grid = grid;
  const SympDiffSystem copy = x;
  ms.R = [copy, b0](double t) { return Eigen::MatrixXd(b0 * copy.coefficients(t).C.matrix()); };
  return ms;
}

IsoPair IsoPair::identity(int n) {
  IsoPair iso;
  iso.Z = [n](double) { return Eigen::MatrixXd::Identity(n, n); };
  iso.W = [n](double) { return Eigen::MatrixXd::Zero(n, n); };
  iso.dZ = [n](double) { return Eigen::MatrixXd::Zero(n, n); };
  iso.dW = iso.dZ;
  return iso;
}

IsoPair IsoPair::sampled(UniformGrid grid, std::vector<Eigen::MatrixXd> Z,
                         std::vector<Eigen::MatrixXd> W) {
  auto zi = std::make_shared<MatrixInterpolant>(grid, std::move(Z));
  auto wi = std::make_shared<MatrixInterpolant>(grid, std::move(W));
  IsoPair iso;
  iso.Z = [zi](double t) { return zi->value(t); };
  iso.W = [wi](double t) { return wi->value(t); };
  iso.dZ = [zi](double t) { return zi->derivative(t); };
  iso.dW = [wi](double t) { return wi->derivative(t); };
  return iso;
}

Eigen::MatrixXd IsoPair::phi(double t) const {
  const Eigen::MatrixXd z = Z(t);
  const Eigen::MatrixXd w = W(t);
  const Eigen::Index n = z.rows();
  const Eigen::MatrixXd zit = z.inverse().transpose();
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  p.topLeftCorner(n, n) = z;
  p.bottomLeftCorner(n, n) = zit * w;
  p.bottomRightCorner(n, n) = zit;
  return p;
}

Eigen::MatrixXd IsoPair::Z_derivative(double t, double h) const {
  if (dZ) return dZ(t);
  return (Z(t + h) - Z(t - h)) / (2 * h);
}

Eigen::MatrixXd IsoPair::W_derivative(double t, double h) const {
  if (dW) return dW(t);
  return (W(t + h) - W(t - h)) / (2 * h);
}

// ---------------------------------------------------------------------------

namespace {

Eigen::MatrixXd rk4_step(const SympDiffSystem& x, double t, double h, const Eigen::MatrixXd& p) {
  const Eigen::MatrixXd xm = x.matrix(t + 0.5 * h);
  const Eigen::MatrixXd k1 = x.matrix(t) * p;
  const Eigen::MatrixXd k2 = xm * (p + 0.5 * h * k1);
  const Eigen::MatrixXd k3 = xm * (p + 0.5 * h * k2);
  const Eigen::MatrixXd k4 = x.matrix(t + h) * (p + h * k3);
  return p + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

FundamentalSolution fundamental_matrix(const SympDiffSystem& x, IntegrationOptions opts) {
  const int n = x.n();
  const UniformGrid& grid = x.grid();
  const Eigen::MatrixXd j = symplectic_J(n);
  FundamentalSolution sol;
  sol.grid = grid;
  sol.phi.reserve(grid.N() + 1);
  sol.phi.push_back(Eigen::MatrixXd::Identity(2 * n, 2 * n));
  for (int k = 0; k < grid.N(); ++k) {
    const double t = grid.time(k);
    Eigen::MatrixXd p = rk4_step(x, t, grid.time(k + 1) - t, sol.phi.back());
    SymplecticCheck chk = is_symplectic(p, opts.reproject_tol);
    if (!chk.ok) {
      const Eigen::MatrixXd defect = p.transpose() * j * p - j;
      const Eigen::MatrixXd p_inv_t = p.inverse().transpose();
      p = p - 0.5 * (-j) * p_inv_t * defect;
      ++sol.reprojections;
      chk = is_symplectic(p, opts.reproject_tol);
    }
    if (chk.drift > opts.drift_ceiling) {
      throw NumericalError("fundamental_matrix: symplectic drift " + std::to_string(chk.drift) +
                           " above ceiling at t = " + std::to_string(grid.time(k + 1)) +
                           " (grid too coarse)");
    }
    sol.max_drift = std::max(sol.max_drift, chk.drift);
    sol.phi.push_back(std::move(p));
  }
  return sol;
}

Eigen::MatrixXd fundamental_at(const SympDiffSystem& x, const FundamentalSolution& sol,
                               double t) {
  const UniformGrid& grid = sol.grid;
  if (t <= grid.a()) return sol.phi.front();
  if (t >= grid.b()) return sol.phi.back();
  const int k = grid.cell(t);
  const double tk = grid.time(k);
  if (t == tk) return sol.phi[k];
  return rk4_step(x, tk, t - tk, sol.phi[k]);
}

Eigen::MatrixXd fundamental_from_node(const SympDiffSystem& x, const FundamentalSolution& sol,
                                      int k, double s) {
  if (k < 0 || k >= static_cast<int>(sol.phi.size())) {
    throw PreconditionError("fundamental_from_node: node out of range");
  }
  if (s == 0.0) return sol.phi[k];
  return rk4_step(x, sol.grid.time(k), s, sol.phi[k]);
}

}  // namespace conjpoints
