#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "conjpoints/sds.hpp"

namespace conjpoints::testing {

/// v'' = R v with g = Id and constant R = r Id.
inline SympDiffSystem constant_morse_sturm(int n, double r, double a, double b, int N) {
  MorseSturm ms;
  ms.g = SymmetricForm::Identity(n);
  ms.grid = UniformGrid(a, b, N);
  ms.R = [n, r](double) { return Eigen::MatrixXd(r * Eigen::MatrixXd::Identity(n, n)); };
  return ms.to_system();
}

inline Eigen::MatrixXd rotation(double th) {
  Eigen::Matrix2d q;
  q << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  return q;
}

/// Smooth random system with B(t) of fixed inertia: n_minus negative
/// eigenvalues, all |eigenvalues| in [0.5, 1.5].  For n = 1 or 2.
inline SympDiffSystem random_system(int n, int n_minus, std::uint64_t seed, double a = 0.0,
                                    double b = 6.0, int N = 4096) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto rnd = [&](int r, int c) {
    Eigen::MatrixXd m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = u(rng);
    return m;
  };
  const Eigen::MatrixXd A0 = 0.5 * rnd(n, n), A1 = 0.5 * rnd(n, n);
  const Eigen::MatrixXd C1 = rnd(n, n);
  const Eigen::VectorXd d0 = Eigen::VectorXd::Constant(n, 1.0) + 0.3 * rnd(n, 1);
  const Eigen::VectorXd d1 = 0.2 * rnd(n, 1);
  const double c0 = 2.0 + u(rng);
  const double w1 = 1.0 + 0.5 * u(rng), w2 = 1.0 + 0.5 * u(rng), th0 = 3.0 * u(rng);
  auto coeff = [=](double t) {
    SpBlocks x;
    x.A = A0 + A1 * std::sin(w1 * t);
    Eigen::VectorXd d = d0 + d1 * std::cos(w2 * t);
    for (int i = 0; i < n_minus; ++i) d(i) = -d(i);
    Eigen::MatrixXd q = n == 2 ? rotation(th0 + 0.4 * std::sin(w2 * t))
                               : Eigen::MatrixXd::Identity(1, 1);
    x.B = SymmetricForm(q * d.asDiagonal() * q.transpose());
    x.C = SymmetricForm(-c0 * Eigen::MatrixXd::Identity(n, n) + 0.5 * C1 * std::cos(w1 * t));
    return x;
  };
  return SympDiffSystem::analytic(n, UniformGrid(a, b, N), coeff);
}

}  // namespace conjpoints::testing
