#include <algorithm>
#include <cmath>

#include "conjpoints/errors.hpp"
#include "conjpoints/sds.hpp"
#include "zero_scan.hpp"

namespace conjpoints {

const char* const kSignatureConvention =
    "crossing form = xi'(t) restricted to xi(t) cap xi(a), xi'(t) = push-forward of -B(t) "
    "through Phi(t)^{-1}; the harmonic oscillator v''=-v crosses at pi with signature -1";

double conjugate_determinant(const Eigen::MatrixXd& phi) {
  const Eigen::Index n = phi.rows() / 2;
  return phi.topRightCorner(n, n).determinant();
}

namespace {

struct CrossingEval {
  int multiplicity = 0;
  int signature = 0;
  bool regular = false;
};

/// Crossing data from Phi(t): kernel of the upper-right block and the form
/// beta -> -(Phi22 beta)^T B (Phi22 beta) on it.
CrossingEval crossing_from_phi(const Eigen::MatrixXd& phi, const SymmetricForm& b,
                               double rank_tol, double crossing_tol) {
  const Eigen::Index n = phi.rows() / 2;
  const Eigen::MatrixXd p12 = phi.topRightCorner(n, n);
  const Eigen::MatrixXd p22 = phi.bottomRightCorner(n, n);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(p12, Eigen::ComputeFullV);
  const double scale = std::max(1.0, phi.norm() / std::sqrt(2.0 * n));
  CrossingEval out;
  std::vector<Eigen::Index> kernel;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (svd.singularValues()(i) <= rank_tol * scale) kernel.push_back(i);
  }
  out.multiplicity = static_cast<int>(kernel.size());
  if (kernel.empty()) return out;
  Eigen::MatrixXd nbasis(n, kernel.size());
  for (std::size_t c = 0; c < kernel.size(); ++c) nbasis.col(c) = svd.matrixV().col(kernel[c]);
  const Eigen::MatrixXd alpha = p22 * nbasis;
  const Eigen::MatrixXd q = -alpha.transpose() * b.matrix() * alpha;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(q, Eigen::EigenvaluesOnly);
  const double band = crossing_tol * std::max(b.matrix().norm(), 1e-300) *
                      std::max(p22.squaredNorm(), 1e-300);
  int plus = 0, minus = 0, zero = 0;
  for (double v : es.eigenvalues()) {
    if (v > band) {
      ++plus;
    } else if (v < -band) {
      ++minus;
    } else {
      ++zero;
    }
  }
  out.signature = plus - minus;
  out.regular = zero == 0;
  return out;
}

}  // namespace

ConjugateReport conjugate_instants(const SympDiffSystem& x, const DetectOptions& opts) {
  return conjugate_instants(x, fundamental_matrix(x, opts.integration), opts);
}

ConjugateReport conjugate_instants(const SympDiffSystem& x, const FundamentalSolution& sol,
                                   const DetectOptions& opts) {
  const UniformGrid& grid = sol.grid;
  ConjugateReport rep;
  rep.times = grid.times();
  rep.d_trace.reserve(sol.phi.size());
  for (const auto& p : sol.phi) rep.d_trace.push_back(conjugate_determinant(p));
  for (double v : rep.d_trace) rep.d_scale = std::max(rep.d_scale, std::abs(v));
  rep.exclusion_radius = opts.exclusion_radius.value_or(5.0 * grid.step());
  rep.zero_tol = opts.zero_tol;
  rep.max_drift = sol.max_drift;
  rep.signature_convention = kSignatureConvention;
  if (rep.d_scale == 0.0) return rep;

  int first = 0;
  while (first <= grid.N() && grid.time(first) <= grid.a() + rep.exclusion_radius) ++first;

  // d leaves its zero at a like (t - a)^n and can stay under the relative
  // threshold past the exclusion radius; skip that tail while |d| grows with
  // a fixed sign.
  const double thr = opts.zero_tol * rep.d_scale;
  const auto& d = rep.d_trace;
  while (first < grid.N() && std::abs(d[first]) < thr && d[first] != 0.0 &&
         (d[first + 1] > 0) == (d[first] > 0) && std::abs(d[first + 1]) >= std::abs(d[first])) {
    ++first;
  }
  rep.scan_start = grid.time(std::min(first, grid.N()));

  detail::ZeroScanOptions scan;
  scan.first_index = first;
  scan.threshold = thr;
  scan.max_isolated_run = opts.max_isolated_run;
  scan.t_tol = opts.t_tol;
  scan.touch_gate = 1e-3 * rep.d_scale;
  auto d_at = [&](double t) { return conjugate_determinant(fundamental_at(x, sol, t)); };

  for (const auto& f : detail::scan_zero_set(rep.times, rep.d_trace, scan, d_at)) {
    if (f.kind == detail::ZeroKind::kCluster) {
      rep.clusters.push_back({f.lo, f.hi});
      continue;
    }
    const Eigen::MatrixXd phi = fundamental_at(x, sol, f.t);
    const CrossingEval ce = crossing_from_phi(phi, x.coefficients(f.t).B,
                                              std::max(opts.rank_tol, 10.0 * opts.zero_tol),
                                              opts.crossing_tol);
    ConjugateInstant inst;
    inst.t = f.t;
    inst.multiplicity = std::max(ce.multiplicity, 1);
    if (ce.multiplicity > 0) inst.signature = ce.signature;
    inst.regular = ce.multiplicity > 0 && ce.regular;
    rep.instants.push_back(inst);
  }
  return rep;
}

CrossingData crossing_data(const SympDiffSystem& x, double t, double rank_tol,
                           double crossing_tol) {
  if (!(t > x.a() && t <= x.b())) {
    throw PreconditionError("crossing_data: t must lie in ]a, b]");
  }
  const FundamentalSolution sol = fundamental_matrix(x);
  const Eigen::MatrixXd phi = fundamental_at(x, sol, t);
  // Multiplicity as dim(xi(t) cap L0), xi(t) = Phi(t)^{-1} L0.
  const LagrangianFrame l0 = LagrangianFrame::vertical(x.n());
  const LagrangianFrame xi(symplectic_inverse(phi) * l0.columns());
  const int mult = intersection_dim(xi, l0, rank_tol);
  if (mult == 0) throw PreconditionError("crossing_data: t is not a conjugate instant");
  const CrossingEval ce = crossing_from_phi(phi, x.coefficients(t).B, rank_tol, crossing_tol);
  return {mult, ce.signature, ce.regular};
}

int maslov_regular(const SympDiffSystem& x, const DetectOptions& opts) {
  const ConjugateReport rep = conjugate_instants(x, opts);
  if (!rep.clusters.empty()) {
    throw UnavailableError("maslov_regular: unavailable, conjugate instants accumulate");
  }
  int total = 0;
  for (const auto& inst : rep.instants) {
    if (!inst.regular || !inst.signature) {
      throw UnavailableError("maslov_regular: unavailable, degenerate crossing at t = " +
                             std::to_string(inst.t));
    }
    total += *inst.signature;
  }
  return total;
}

}  // namespace conjpoints
