#include "conjpoints/grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "conjpoints/errors.hpp"

namespace conjpoints {

UniformGrid::UniformGrid(double a, double b, int N) : a_(a), b_(b), N_(N) {
  if (!(a < b)) throw PreconditionError("UniformGrid: need a < b");
  if (N < 1) throw PreconditionError("UniformGrid: need N >= 1");
}

std::vector<double> UniformGrid::times() const {
  std::vector<double> t(N_ + 1);
  for (int k = 0; k <= N_; ++k) t[k] = time(k);
  return t;
}

int UniformGrid::cell(double t) const {
  const int k = static_cast<int>(std::floor((t - a_) / step()));
  return std::clamp(k, 0, N_ - 1);
}

int UniformGrid::nearest(double t) const {
  const int k = static_cast<int>(std::lround((t - a_) / step()));
  return std::clamp(k, 0, N_);
}

MatrixInterpolant::MatrixInterpolant(UniformGrid grid, std::vector<Eigen::MatrixXd> samples)
    : grid_(grid), samples_(std::move(samples)) {
  if (static_cast<int>(samples_.size()) != grid_.N() + 1) {
    throw PreconditionError("MatrixInterpolant: sample count does not match grid");
  }
  if (grid_.N() < kStencil - 1) {
    throw PreconditionError("MatrixInterpolant: need at least 6 samples");
  }
}

template <class Weights>
Eigen::MatrixXd MatrixInterpolant::combine(double t, int k, Weights w) const {
  const int first = std::clamp(k - (kStencil / 2 - 1), 0, grid_.N() - (kStencil - 1));
  const double s = (t - grid_.time(first)) / grid_.step();
  const auto c = w(s);
  Eigen::MatrixXd out = c[0] * samples_[first];
  for (int i = 1; i < kStencil; ++i) out += c[i] * samples_[first + i];
  return out;
}

namespace {

using Stencil = std::array<double, MatrixInterpolant::kStencil>;

// Lagrange basis on nodes 0 .. kStencil - 1.
Stencil lagrange_weights(double s) {
  Stencil c;
  for (int i = 0; i < MatrixInterpolant::kStencil; ++i) {
    c[i] = 1.0;
    for (int j = 0; j < MatrixInterpolant::kStencil; ++j) {
      if (j != i) c[i] *= (s - j) / (i - j);
    }
  }
  return c;
}

Stencil lagrange_slopes(double s) {
  Stencil c;
  for (int i = 0; i < MatrixInterpolant::kStencil; ++i) {
    c[i] = 0.0;
    for (int m = 0; m < MatrixInterpolant::kStencil; ++m) {
      if (m == i) continue;
      double term = 1.0 / (i - m);
      for (int j = 0; j < MatrixInterpolant::kStencil; ++j) {
        if (j != i && j != m) term *= (s - j) / (i - j);
      }
      c[i] += term;
    }
  }
  return c;
}

}  // namespace

Eigen::MatrixXd MatrixInterpolant::value(double t) const {
  return combine(t, grid_.cell(t), lagrange_weights);
}

Eigen::MatrixXd MatrixInterpolant::value_in_cell(double t, int k) const {
  return combine(t, std::clamp(k, 0, grid_.N() - 1), lagrange_weights);
}

Eigen::MatrixXd MatrixInterpolant::derivative(double t) const {
  const double h = grid_.step();
  return combine(t, grid_.cell(t), [h](double s) {
    Stencil c = lagrange_slopes(s);
    for (double& v : c) v /= h;
    return c;
  });
}

std::vector<Eigen::MatrixXd> grid_derivative(const std::vector<Eigen::MatrixXd>& samples,
                                             double h, int order) {
  const std::size_t m = samples.size();
  const auto& s = samples;
  std::vector<Eigen::MatrixXd> d(m);
  if (order == 6) {
    if (m < 7) throw PreconditionError("grid_derivative: need at least 7 samples");
    d = grid_derivative(samples, h, 4);
    for (std::size_t k = 3; k + 3 < m; ++k) {
      d[k] = (45.0 * (s[k + 1] - s[k - 1]) - 9.0 * (s[k + 2] - s[k - 2]) + (s[k + 3] - s[k - 3])) /
             (60.0 * h);
    }
    return d;
  }
  if (order == 4) {
    if (m < 5) throw PreconditionError("grid_derivative: need at least 5 samples");
    const double w = 12.0 * h;
    d[0] = (-25.0 * s[0] + 48.0 * s[1] - 36.0 * s[2] + 16.0 * s[3] - 3.0 * s[4]) / w;
    d[1] = (-3.0 * s[0] - 10.0 * s[1] + 18.0 * s[2] - 6.0 * s[3] + s[4]) / w;
    for (std::size_t k = 2; k + 2 < m; ++k) {
      d[k] = (8.0 * (s[k + 1] - s[k - 1]) - (s[k + 2] - s[k - 2])) / w;
    }
    d[m - 2] = (3.0 * s[m - 1] + 10.0 * s[m - 2] - 18.0 * s[m - 3] + 6.0 * s[m - 4] - s[m - 5]) / w;
    d[m - 1] = (25.0 * s[m - 1] - 48.0 * s[m - 2] + 36.0 * s[m - 3] - 16.0 * s[m - 4] +
                3.0 * s[m - 5]) /
               w;
    return d;
  }
  if (order != 2) throw PreconditionError("grid_derivative: order must be 2, 4 or 6");
  if (m < 3) throw PreconditionError("grid_derivative: need at least 3 samples");
  d[0] = (-3.0 * s[0] + 4.0 * s[1] - s[2]) / (2.0 * h);
  for (std::size_t k = 1; k + 1 < m; ++k) d[k] = (s[k + 1] - s[k - 1]) / (2.0 * h);
  d[m - 1] = (3.0 * s[m - 1] - 4.0 * s[m - 2] + s[m - 3]) / (2.0 * h);
  return d;
}

}  // namespace conjpoints
