#pragma once

#include <Eigen/Dense>

#include "conjpoints/symform.hpp"

namespace conjpoints {

// Coordinates on R^n (+) R^n* are (v, alpha) stacked into a 2n-vector.  The
// canonical form omega((v1,a1),(v2,a2)) = a2(v1) - a1(v2) is z1^T J z2 with
// J = [[0, I], [-I, 0]].

inline constexpr double kDefaultRankTol = 1e-8;

Eigen::MatrixXd symplectic_J(int n);

double omega(const Eigen::VectorXd& z1, const Eigen::VectorXd& z2);

/// Blocks of an element of sp(2n): X = [[A, B], [C, -A^T]].
struct SpBlocks {
  Eigen::MatrixXd A;
  SymmetricForm B;
  SymmetricForm C;
};

Eigen::MatrixXd assemble_sp(const Eigen::MatrixXd& A, const SymmetricForm& B,
                            const SymmetricForm& C);
SpBlocks split_sp(const Eigen::MatrixXd& X);

/// ||X^T J + J X|| (spectral); zero exactly on sp(2n).
double sp_algebra_defect(const Eigen::MatrixXd& X);

/// Nearest element of sp(2n) in the sense J X -> sym(J X).
Eigen::MatrixXd project_to_sp(const Eigen::MatrixXd& X);

struct SymplecticCheck {
  bool ok = false;
  double drift = 0.0;  ///< ||M^T J M - J||, spectral norm
};

SymplecticCheck is_symplectic(const Eigen::MatrixXd& M, double tol);

/// J^{-1} M^T J, the inverse of a symplectic matrix.
Eigen::MatrixXd symplectic_inverse(const Eigen::MatrixXd& M);

/// A Lagrangian subspace given by a 2n x n frame.  The frame is kept as
/// supplied (charts are expressed in this basis); orthonormal() returns a
/// QR-normalized copy with positive diagonal for rank computations.
class LagrangianFrame {
 public:
  LagrangianFrame() = default;
  explicit LagrangianFrame(const Eigen::MatrixXd& columns, double rank_tol = kDefaultRankTol);

  /// {0} (+) R^n*
  static LagrangianFrame vertical(int n);
  /// R^n (+) {0}
  static LagrangianFrame horizontal(int n);
  /// {(P alpha, alpha)} for symmetric P.
  static LagrangianFrame graph_over_covectors(const SymmetricForm& P);

  int n() const { return static_cast<int>(cols_.cols()); }
  const Eigen::MatrixXd& columns() const { return cols_; }
  Eigen::MatrixXd orthonormal() const;

  /// ||F^T J F|| for the orthonormalized frame.
  double isotropy_defect() const;

  /// Image under a linear map of R^2n.
  LagrangianFrame transformed(const Eigen::MatrixXd& M) const;

 private:
  Eigen::MatrixXd cols_;
};

/// Thin QR with positive-diagonal sign fix.
Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& frame);

/// Same columns up to a first-order correction that removes the isotropy
/// defect, e.g. of Phi^{-1} L0 when Phi has grown large.
Eigen::MatrixXd lagrangian_correction(const Eigen::MatrixXd& frame);
int numerical_rank(const Eigen::MatrixXd& m, double rank_tol);

/// dim(L1 cap L2) = 2n - rank([L1 | L2]).
int intersection_dim(const LagrangianFrame& l1, const LagrangianFrame& l2,
                     double rank_tol = kDefaultRankTol);

/// Chart phi_{xi0,xi1}(L) = omega(T., .) on xi0 x xi0, where Gr(T) = L and
/// T : xi0 -> xi1; expressed in the basis of xi0's columns.
SymmetricForm chart(const LagrangianFrame& xi0, const LagrangianFrame& xi1,
                    const LagrangianFrame& l, double rank_tol = kDefaultRankTol);

/// The Lagrangian in the chart domain with chart value s.
LagrangianFrame chart_inverse(const LagrangianFrame& xi0, const LagrangianFrame& xi1,
                              const SymmetricForm& s, double rank_tol = kDefaultRankTol);

/// A Lagrangian xi1 transverse to both xi0 and l with chart(xi0, xi1, l) = p.
LagrangianFrame complement_with_chart_value(const LagrangianFrame& l,
                                            const LagrangianFrame& xi0,
                                            const SymmetricForm& p,
                                            double rank_tol = kDefaultRankTol);

}  // namespace conjpoints
