#include "conjpoints/symplectic.hpp"

#include "conjpoints/errors.hpp"

namespace conjpoints {

namespace {

int half_dim(const Eigen::MatrixXd& m, const char* what) {
  if (m.rows() % 2 != 0) throw PreconditionError(std::string(what) + ": odd row count");
  return static_cast<int>(m.rows() / 2);
}

double spectral_norm(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

}  // namespace

Eigen::MatrixXd symplectic_J(int n) {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  j.topRightCorner(n, n).setIdentity();
  j.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
  return j;
}

double omega(const Eigen::VectorXd& z1, const Eigen::VectorXd& z2) {
  if (z1.size() != z2.size() || z1.size() % 2 != 0) {
    throw PreconditionError("omega: dimension mismatch");
  }
  const Eigen::Index n = z1.size() / 2;
  return z2.tail(n).dot(z1.head(n)) - z1.tail(n).dot(z2.head(n));
}

Eigen::MatrixXd assemble_sp(const Eigen::MatrixXd& A, const SymmetricForm& B,
                            const SymmetricForm& C) {
  const Eigen::Index n = A.rows();
  if (A.cols() != n || B.dim() != n || C.dim() != n) {
    throw PreconditionError("assemble_sp: block dimension mismatch");
  }
  Eigen::MatrixXd x(2 * n, 2 * n);
  x << A, B.matrix(), C.matrix(), -A.transpose();
  return x;
}

SpBlocks split_sp(const Eigen::MatrixXd& X) {
  const int n = half_dim(X, "split_sp");
  return {X.topLeftCorner(n, n), SymmetricForm(X.topRightCorner(n, n)),
          SymmetricForm(X.bottomLeftCorner(n, n))};
}

double sp_algebra_defect(const Eigen::MatrixXd& X) {
  const Eigen::MatrixXd j = symplectic_J(half_dim(X, "sp_algebra_defect"));
  return spectral_norm(X.transpose() * j + j * X);
}

Eigen::MatrixXd project_to_sp(const Eigen::MatrixXd& X) {
  const Eigen::MatrixXd j = symplectic_J(half_dim(X, "project_to_sp"));
  const Eigen::MatrixXd jx = j * X;
  // J^{-1} = -J
  return -j * (0.5 * (jx + jx.transpose()));
}

SymplecticCheck is_symplectic(const Eigen::MatrixXd& M, double tol) {
  if (M.rows() != M.cols()) throw PreconditionError("is_symplectic: matrix is not square");
  const Eigen::MatrixXd j = symplectic_J(half_dim(M, "is_symplectic"));
  const double drift = spectral_norm(M.transpose() * j * M - j);
  return {drift <= tol, drift};
}

Eigen::MatrixXd symplectic_inverse(const Eigen::MatrixXd& M) {
  const Eigen::MatrixXd j = symplectic_J(half_dim(M, "symplectic_inverse"));
  return -j * M.transpose() * j;
}

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& frame) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(frame);
  const Eigen::Index k = frame.cols();
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(frame.rows(), k);
  const Eigen::MatrixXd r = qr.matrixQR().topLeftCorner(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    if (r(i, i) < 0) q.col(i) = -q.col(i);
  }
  return q;
}

Eigen::MatrixXd lagrangian_correction(const Eigen::MatrixXd& frame) {
  // frame = Q R; Q <- Q + 1/2 J Q S with S = Q^T J Q cancels S to first order.
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(frame);
  const Eigen::Index k = frame.cols();
  const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(frame.rows(), k);
  const Eigen::MatrixXd r = qr.matrixQR().topLeftCorner(k, k).triangularView<Eigen::Upper>();
  const Eigen::MatrixXd j = symplectic_J(static_cast<int>(k));
  const Eigen::MatrixXd s = q.transpose() * j * q;
  return (q + 0.5 * j * q * s) * r;
}

int numerical_rank(const Eigen::MatrixXd& m, double rank_tol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const Eigen::VectorXd s = svd.singularValues();
  if (s(0) == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > rank_tol * s(0)) ++r;
  }
  return r;
}

LagrangianFrame::LagrangianFrame(const Eigen::MatrixXd& columns, double rank_tol)
    : cols_(columns) {
  if (columns.rows() != 2 * columns.cols() || columns.cols() == 0) {
    throw PreconditionError("LagrangianFrame: frame must be 2n x n");
  }
  if (numerical_rank(columns, rank_tol) != columns.cols()) {
    throw PreconditionError("LagrangianFrame: frame is rank deficient");
  }
  if (isotropy_defect() > 1e-10) {
    throw PreconditionError("LagrangianFrame: frame is not isotropic");
  }
}

LagrangianFrame LagrangianFrame::vertical(int n) {
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(2 * n, n);
  f.bottomRows(n).setIdentity();
  return LagrangianFrame(f);
}

LagrangianFrame LagrangianFrame::horizontal(int n) {
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(2 * n, n);
  f.topRows(n).setIdentity();
  return LagrangianFrame(f);
}

LagrangianFrame LagrangianFrame::graph_over_covectors(const SymmetricForm& P) {
  const int n = P.dim();
  Eigen::MatrixXd f(2 * n, n);
  f << P.matrix(), Eigen::MatrixXd::Identity(n, n);
  return LagrangianFrame(f);
}

Eigen::MatrixXd LagrangianFrame::orthonormal() const { return orthonormalize(cols_); }

double LagrangianFrame::isotropy_defect() const {
  const Eigen::MatrixXd q = orthonormal();
  return spectral_norm(q.transpose() * symplectic_J(n()) * q);
}

LagrangianFrame LagrangianFrame::transformed(const Eigen::MatrixXd& M) const {
  return LagrangianFrame(M * cols_);
}

int intersection_dim(const LagrangianFrame& l1, const LagrangianFrame& l2, double rank_tol) {
  if (l1.n() != l2.n()) throw PreconditionError("intersection_dim: dimension mismatch");
  Eigen::MatrixXd both(2 * l1.n(), 2 * l1.n());
  both << l1.orthonormal(), l2.orthonormal();
  return 2 * l1.n() - numerical_rank(both, rank_tol);
}

namespace {

void require_decomposition(const LagrangianFrame& xi0, const LagrangianFrame& xi1,
                           double rank_tol, const char* what) {
  if (xi0.n() != xi1.n()) throw PreconditionError(std::string(what) + ": dimension mismatch");
  if (intersection_dim(xi0, xi1, rank_tol) != 0) {
    throw PreconditionError(std::string(what) + ": xi0 and xi1 are not transverse");
  }
}

}  // namespace

SymmetricForm chart(const LagrangianFrame& xi0, const LagrangianFrame& xi1,
                    const LagrangianFrame& l, double rank_tol) {
  require_decomposition(xi0, xi1, rank_tol, "chart");
  if (l.n() != xi0.n()) throw PreconditionError("chart: dimension mismatch");
  if (intersection_dim(l, xi1, rank_tol) != 0) {
    throw PreconditionError("chart: L is outside the chart domain (meets xi1)");
  }
  const int n = xi0.n();
  Eigen::MatrixXd basis(2 * n, 2 * n);
  basis << xi0.columns(), xi1.columns();
  // L = E0 x + E1 y, so T maps E0 to E1 K with K = y x^{-1}.
  const Eigen::MatrixXd coef = basis.partialPivLu().solve(l.columns());
  const Eigen::MatrixXd x = coef.topRows(n);
  const Eigen::MatrixXd y = coef.bottomRows(n);
  const Eigen::MatrixXd k = x.transpose().partialPivLu().solve(y.transpose()).transpose();
  const Eigen::MatrixXd g = xi1.columns().transpose() * symplectic_J(n) * xi0.columns();
  return SymmetricForm(k.transpose() * g);
}

LagrangianFrame chart_inverse(const LagrangianFrame& xi0, const LagrangianFrame& xi1,
                              const SymmetricForm& s, double rank_tol) {
  require_decomposition(xi0, xi1, rank_tol, "chart_inverse");
  const int n = xi0.n();
  if (s.dim() != n) throw PreconditionError("chart_inverse: dimension mismatch");
  const Eigen::MatrixXd g = xi1.columns().transpose() * symplectic_J(n) * xi0.columns();
  const Eigen::MatrixXd k = g.transpose().partialPivLu().solve(s.matrix());
  return LagrangianFrame(xi0.columns() + xi1.columns() * k, rank_tol);
}

LagrangianFrame complement_with_chart_value(const LagrangianFrame& l,
                                            const LagrangianFrame& xi0,
                                            const SymmetricForm& p, double rank_tol) {
  if (l.n() != xi0.n() || p.dim() != l.n()) {
    throw PreconditionError("complement_with_chart_value: dimension mismatch");
  }
  if (intersection_dim(l, xi0, rank_tol) != 0) {
    throw PreconditionError("complement_with_chart_value: L is not transverse to xi0");
  }
  if (inertia(p).n_zero != 0) {
    throw PreconditionError("complement_with_chart_value: prescribed value is degenerate");
  }
  const int n = l.n();
  const Eigen::MatrixXd& e0 = xi0.columns();
  // Normalize L's basis so that [F | E0] is a symplectic basis: F^T J E0 = I.
  const Eigen::MatrixXd pairing = l.columns().transpose() * symplectic_J(n) * e0;
  const Eigen::MatrixXd f = l.columns() * pairing.inverse().transpose();
  // In that basis xi0 = L0 and L = R^n (+) 0; the graph {(v, -P^{-1} v)} has
  // chart value P at L.
  const Eigen::MatrixXd xi1 = f - e0 * p.matrix().inverse();
  return LagrangianFrame(xi1, rank_tol);
}

}  // namespace conjpoints
