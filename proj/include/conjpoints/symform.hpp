#pragma once

#include <Eigen/Dense>
#include <vector>

namespace conjpoints {

/// Real symmetric bilinear form on R^n, stored as its (exactly symmetric)
/// Gram matrix.  Construction symmetrizes the input as (M + M^T) / 2.
class SymmetricForm {
 public:
  SymmetricForm() = default;
  explicit SymmetricForm(const Eigen::MatrixXd& m);

  static SymmetricForm Zero(int n);
  static SymmetricForm Identity(int n);
  static SymmetricForm Diagonal(const Eigen::VectorXd& d);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Eigen::MatrixXd& matrix() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }

  /// Eigenvalues in increasing order.
  Eigen::VectorXd eigenvalues() const;

  SymmetricForm operator+(const SymmetricForm& o) const { return SymmetricForm(m_ + o.m_); }
  SymmetricForm operator-(const SymmetricForm& o) const { return SymmetricForm(m_ - o.m_); }
  SymmetricForm operator*(double s) const { return SymmetricForm(m_ * s); }

  /// Z^T S Z.
  SymmetricForm congruent(const Eigen::MatrixXd& z) const;

 private:
  Eigen::MatrixXd m_;
};

inline SymmetricForm operator*(double s, const SymmetricForm& f) { return f * s; }

struct Inertia {
  int n_plus = 0;
  int n_minus = 0;
  int n_zero = 0;
  friend bool operator==(const Inertia&, const Inertia&) = default;
};

inline constexpr double kDefaultZeroTol = 1e-9;

/// Eigenvalue counts: > zero_tol*|S|, < -zero_tol*|S| and the band between,
/// where |S| is the largest absolute eigenvalue.  The index of S is n_minus.
Inertia inertia(const SymmetricForm& s, double zero_tol = kDefaultZeroTol);

/// Smallest singular value; the spectral-norm distance to the nearest
/// degenerate symmetric form.
double distance_to_degenerate(const SymmetricForm& s);

/// Sampled path of 2x2 forms from s0 to s1 (steps + 1 samples) along which
/// every sample is nondegenerate with the endpoints' inertia.  Eigenvalue
/// magnitudes are interpolated log-linearly with fixed signs and the
/// eigenvector angle linearly.
std::vector<SymmetricForm> index_path(const SymmetricForm& s0, const SymmetricForm& s1,
                                      int steps);

/// Global coordinates on the set of nondegenerate 2x2 forms with a fixed
/// inertia: (log|lambda_1|, log|lambda_2|, theta).  Any coordinate triple maps
/// back into the set, so smooth curves of coordinates give smooth curves of
/// forms that never degenerate.
class FixedInertiaCoords2 {
 public:
  explicit FixedInertiaCoords2(Inertia in);

  Inertia inertia() const { return inertia_; }

  /// Coordinates of s; theta is unwrapped to the branch nearest theta_hint.
  Eigen::Vector3d to_coords(const SymmetricForm& s, double theta_hint = 0.0) const;
  SymmetricForm from_coords(const Eigen::Vector3d& k) const;

 private:
  Inertia inertia_;
  double sign_first_ = 1.0;
  double sign_second_ = 1.0;
};

}  // namespace conjpoints
