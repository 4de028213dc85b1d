#include "conjpoints/abstract_system.hpp"

#include <cmath>

#include "conjpoints/errors.hpp"
#include "zero_scan.hpp"

namespace conjpoints {

AbstractSystem::AbstractSystem(UniformGrid grid, std::vector<Eigen::MatrixXd> frames,
                               std::string provenance)
    : grid_(grid), frames_(std::move(frames)), provenance_(std::move(provenance)) {
  if (static_cast<int>(frames_.size()) != grid_.N() + 1) {
    throw PreconditionError("AbstractSystem: expected one frame per grid point");
  }
  n_ = static_cast<int>(frames_.front().cols());
  for (const auto& f : frames_) {
    if (f.cols() != n_) throw PreconditionError("AbstractSystem: frame size mismatch");
    LagrangianFrame check(f);  // throws if not Lagrangian
  }
}

AbstractSystem AbstractSystem::transformed(const Eigen::MatrixXd& m) const {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(frames_.size());
  for (const auto& f : frames_) out.push_back(m * f);
  return AbstractSystem(grid_, std::move(out), provenance_);
}

AbstractSystem xi_from_system(const SympDiffSystem& x, IntegrationOptions opts) {
  return xi_from_system(x, fundamental_matrix(x, opts));
}

AbstractSystem xi_from_system(const SympDiffSystem& x, const FundamentalSolution& sol) {
  const int n = x.n();
  std::vector<Eigen::MatrixXd> frames;
  frames.reserve(sol.phi.size());
  for (const auto& p : sol.phi) {
    frames.push_back(lagrangian_correction(symplectic_inverse(p).rightCols(n)));
  }
  return AbstractSystem(sol.grid, std::move(frames), "xi = Phi^{-1}(L0)");
}

SymmetricForm xi_derivative_form(const AbstractSystem& s, int k,
                                 const std::optional<LagrangianFrame>& complement, int order) {
  if (order != 2 && order != 4) throw PreconditionError("xi_derivative_form: order must be 2 or 4");
  if (k < 1 || k >= s.grid().N()) {
    throw PreconditionError("xi_derivative_form: grid index too close to an endpoint");
  }
  const int n = s.n();
  const Eigen::MatrixXd& e0 = s.frames()[k];
  const Eigen::MatrixXd e1 =
      complement ? complement->columns() : Eigen::MatrixXd(symplectic_J(n) * orthonormalize(e0));
  if (complement && intersection_dim(LagrangianFrame(e0), *complement) != 0) {
    throw PreconditionError("xi_derivative_form: complement meets xi(t)");
  }
  // Same chart as symform's chart(), factored once for the whole stencil.
  Eigen::MatrixXd basis(2 * n, 2 * n);
  basis << e0, e1;
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis);
  const Eigen::MatrixXd g = e1.transpose() * symplectic_J(n) * e0;
  auto at = [&](int j) -> Eigen::MatrixXd {
    const Eigen::MatrixXd coef = lu.solve(s.frames()[j]);
    const Eigen::MatrixXd x = coef.topRows(n);
    const Eigen::MatrixXd y = coef.bottomRows(n);
    const Eigen::MatrixXd kk = x.transpose().partialPivLu().solve(y.transpose()).transpose();
    const Eigen::MatrixXd v = kk.transpose() * g;
    if (!v.allFinite()) {
      throw NumericalError("xi_derivative_form: neighbouring frame leaves the chart at index " +
                           std::to_string(j));
    }
    return 0.5 * (v + v.transpose());
  };
  const double h = s.grid().step();
  const int last = s.grid().N();
  if (order == 2 || last < 4) return SymmetricForm((at(k + 1) - at(k - 1)) / (2.0 * h));
  if (k == 1) {
    // Nodes -1..3 around k; the chart value at k itself is zero.
    return SymmetricForm((-3.0 * at(0) + 18.0 * at(2) - 6.0 * at(3) + at(4)) / (12.0 * h));
  }
  if (k == last - 1) {
    return SymmetricForm((3.0 * at(last) - 18.0 * at(last - 2) + 6.0 * at(last - 3) -
                          at(last - 4)) /
                         (12.0 * h));
  }
  return SymmetricForm((8.0 * (at(k + 1) - at(k - 1)) - (at(k + 2) - at(k - 2))) / (12.0 * h));
}

SymmetricForm xi_derivative_form(const AbstractSystem& s, double t,
                                 const std::optional<LagrangianFrame>& complement, int order) {
  const int k = s.grid().nearest(t);
  if (std::abs(s.grid().time(k) - t) > 1e-9 * s.grid().step()) {
    throw PreconditionError("xi_derivative_form: t must be a grid node");
  }
  return xi_derivative_form(s, k, complement, order);
}

double pushforward_law_defect(const SympDiffSystem& x, const FundamentalSolution& sol,
                              int substeps) {
  if (substeps < 1) throw PreconditionError("pushforward_law_defect: substeps must be positive");
  const int n = x.n();
  const UniformGrid& grid = x.grid();
  const double d = grid.step() / substeps;
  const Eigen::MatrixXd l0 = LagrangianFrame::vertical(n).columns();
  double worst = 0.0;
  for (int k = 1; k < grid.N(); ++k) {
    const double t = grid.time(k);
    std::vector<Eigen::MatrixXd> frames;
    frames.reserve(5);
    for (int j = -2; j <= 2; ++j) {
      const Eigen::MatrixXd phi = fundamental_from_node(x, sol, k, j * d);
      frames.push_back(lagrangian_correction(symplectic_inverse(phi) * l0));
    }
    const AbstractSystem local(UniformGrid(t - 2 * d, t + 2 * d, 4), std::move(frames));
    const SymmetricForm b = x.grid_coefficients(k).B;
    const SymmetricForm pf = pushforward(b * -1.0, sol.phi[k], local.frames()[2]);
    const double e = (xi_derivative_form(local, 2).matrix() - pf.matrix()).norm();
    worst = std::max(worst, e / (1.0 + b.matrix().norm()));
  }
  return worst;
}

SymmetricForm pushforward(const SymmetricForm& form_on_l0, const Eigen::MatrixXd& phi,
                          const Eigen::MatrixXd& frame) {
  const Eigen::Index n = frame.cols();
  const Eigen::MatrixXd image = phi * frame;
  // Phi maps xi(t) into L0 = {0} (+) R^n*; only the covector part survives.
  const Eigen::MatrixXd m = image.bottomRows(n);
  return form_on_l0.congruent(m);
}

AbstractIndex abstract_index(const AbstractSystem& s, double zero_tol, int order) {
  AbstractIndex out;
  std::optional<Inertia> first;
  for (int k = 1; k < s.grid().N(); ++k) {
    const Inertia in = inertia(xi_derivative_form(s, k, {}, order) * -1.0, zero_tol);
    if (in.n_zero > 0 || (first && !(in == *first))) {
      out.first_failure = k;
      out.index = first ? first->n_minus : in.n_minus;
      return out;
    }
    if (!first) first = in;
  }
  if (!first) {
    throw PreconditionError("abstract_index: grid has no interior points");
  }
  out.nondegenerate = true;
  out.index = first->n_minus;
  return out;
}

std::vector<Eigen::MatrixXd> aligned_frames(const AbstractSystem& s) {
  std::vector<Eigen::MatrixXd> out;
  out.reserve(s.frames().size());
  for (const auto& f : s.frames()) {
    Eigen::MatrixXd q = orthonormalize(f);
    if (!out.empty()) {
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(q.transpose() * out.back(),
                                            Eigen::ComputeFullU | Eigen::ComputeFullV);
      if (svd.singularValues().minCoeff() < 0.1) {
        throw NumericalError("frame alignment failed at grid index " +
                             std::to_string(out.size()) + ": consecutive frames nearly orthogonal");
      }
      q = q * (svd.matrixU() * svd.matrixV().transpose());
    }
    out.push_back(std::move(q));
  }
  return out;
}

std::vector<Eigen::MatrixXd> realization_psi(const AbstractSystem& s) {
  const int n = s.n();
  const Eigen::MatrixXd j = symplectic_J(n);
  std::vector<Eigen::MatrixXd> psi;
  psi.reserve(s.frames().size());
  for (const auto& f : aligned_frames(s)) {
    Eigen::MatrixXd u(2 * n, 2 * n);
    u << f, -j * f;
    psi.push_back(j * u.transpose());
  }
  return psi;
}

SympDiffSystem realize_system(const AbstractSystem& s, int order) {
  const int n = s.n();
  if (intersection_dim(s.frame(0), LagrangianFrame::vertical(n)) != n) {
    throw PreconditionError("realize_system: xi(a) must equal L0");
  }
  const std::vector<Eigen::MatrixXd> psi = realization_psi(s);
  const std::vector<Eigen::MatrixXd> dpsi = grid_derivative(psi, s.grid().step(), order);
  std::vector<SpBlocks> samples;
  samples.reserve(psi.size());
  for (std::size_t k = 0; k < psi.size(); ++k) {
    // psi is orthogonal, so psi^{-1} = psi^T; Phi' Phi^{-1} = psi' psi^{-1}.
    samples.push_back(split_sp(project_to_sp(dpsi[k] * psi[k].transpose())));
  }
  return SympDiffSystem::sampled(n, s.grid(), samples);
}

ConjugateReport abstract_conjugate_instants(const AbstractSystem& s, const DetectOptions& opts) {
  const int n = s.n();
  const UniformGrid& grid = s.grid();
  const Eigen::MatrixXd j = symplectic_J(n);
  const std::vector<Eigen::MatrixXd> f = aligned_frames(s);
  const Eigen::MatrixXd f0j = f.front().transpose() * j;

  ConjugateReport rep;
  rep.times = grid.times();
  rep.d_trace.reserve(f.size());
  for (const auto& fk : f) rep.d_trace.push_back((f0j * fk).determinant());
  for (double v : rep.d_trace) rep.d_scale = std::max(rep.d_scale, std::abs(v));
  rep.exclusion_radius = opts.exclusion_radius.value_or(5.0 * grid.step());
  rep.zero_tol = opts.zero_tol;
  rep.signature_convention = kSignatureConvention;
  if (rep.d_scale == 0.0) return rep;

  int first = 0;
  while (first <= grid.N() && grid.time(first) <= grid.a() + rep.exclusion_radius) ++first;
  detail::ZeroScanOptions scan;
  scan.first_index = first;
  scan.threshold = opts.zero_tol * rep.d_scale;
  scan.max_isolated_run = opts.max_isolated_run;
  scan.t_tol = opts.t_tol;
  for (const auto& z : detail::scan_zero_set(rep.times, rep.d_trace, scan)) {
    if (z.kind == detail::ZeroKind::kCluster) {
      rep.clusters.push_back({z.lo, z.hi});
      continue;
    }
    const int k = grid.nearest(z.t);
    ConjugateInstant inst;
    inst.t = z.t;
    // Orthonormal frames: singular values of F(a)^T J F(t) are sines of the
    // principal angles, so an absolute threshold is meaningful.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(f0j * f[k]);
    const double tol = std::max(opts.rank_tol, 10.0 * std::sqrt(opts.zero_tol));
    int mult = 0;
    for (Eigen::Index i = 0; i < n; ++i) mult += svd.singularValues()(i) <= tol ? 1 : 0;
    inst.multiplicity = std::max(1, mult);
    rep.instants.push_back(inst);
  }
  return rep;
}

}  // namespace conjpoints
