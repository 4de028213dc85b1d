#pragma once

#include <Eigen/Dense>
#include <vector>

namespace conjpoints {

/// N + 1 equally spaced instants on [a, b].
class UniformGrid {
 public:
  UniformGrid() = default;
  UniformGrid(double a, double b, int N);

  double a() const { return a_; }
  double b() const { return b_; }
  int N() const { return N_; }
  double step() const { return (b_ - a_) / N_; }
  double time(int k) const { return k == N_ ? b_ : a_ + k * step(); }
  std::vector<double> times() const;

  /// Index of the cell [t_k, t_{k+1}] containing t (clamped to the grid).
  int cell(double t) const;
  /// Nearest grid index.
  int nearest(double t) const;

 private:
  double a_ = 0.0;
  double b_ = 1.0;
  int N_ = 1;
};

/// Piecewise quintic Lagrange interpolation of matrix samples on a uniform
/// grid.  On the cell [t_k, t_{k+1}] the stencil is t_{k-2}..t_{k+3}, shifted
/// inward at the ends, so integrators stepping cell by cell see a polynomial.
class MatrixInterpolant {
 public:
  static constexpr int kStencil = 6;

  MatrixInterpolant() = default;
  MatrixInterpolant(UniformGrid grid, std::vector<Eigen::MatrixXd> samples);

  const UniformGrid& grid() const { return grid_; }
  const std::vector<Eigen::MatrixXd>& samples() const { return samples_; }

  Eigen::MatrixXd value(double t) const;
  Eigen::MatrixXd derivative(double t) const;
  /// Value of the polynomial belonging to cell k, also at the cell's end points.
  Eigen::MatrixXd value_in_cell(double t, int k) const;

 private:
  template <class Weights>
  Eigen::MatrixXd combine(double t, int k, Weights w) const;

  UniformGrid grid_;
  std::vector<Eigen::MatrixXd> samples_;
};

/// Derivative of grid samples by central differences of the given order (2,
/// 4 or 6) in the interior.  Orders 2 and 4 use one-sided stencils of the
/// same order at the ends; order 6 falls back to order 4 on the three nodes
/// next to each end.
std::vector<Eigen::MatrixXd> grid_derivative(const std::vector<Eigen::MatrixXd>& samples,
                                             double h, int order = 2);

}  // namespace conjpoints
