#include <gtest/gtest.h>

#include <random>

#include "conjpoints/errors.hpp"
#include "conjpoints/symform.hpp"

using namespace conjpoints;

namespace {

Eigen::MatrixXd random_matrix(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = u(rng);
  return m;
}

SymmetricForm diag2(double a, double b) { return SymmetricForm::Diagonal(Eigen::Vector2d(a, b)); }

}  // namespace

TEST(SymmetricForm, SymmetrizesOnConstruction) {
  Eigen::Matrix2d m;
  m << 1.0, 2.0, 4.0, 3.0;
  const SymmetricForm s(m);
  EXPECT_EQ(s(0, 1), s(1, 0));
  EXPECT_DOUBLE_EQ(s(0, 1), 3.0);
}

TEST(Inertia, Examples) {
  EXPECT_EQ(inertia(SymmetricForm::Identity(2)), (Inertia{2, 0, 0}));
  EXPECT_EQ(inertia(diag2(1, -1)), (Inertia{1, 1, 0}));
  EXPECT_EQ(inertia(diag2(1, 0)), (Inertia{1, 0, 1}));
  EXPECT_EQ(inertia(SymmetricForm::Zero(3)), (Inertia{0, 0, 3}));
}

TEST(Inertia, RhoDerivativeIsIndefinite) {
  // rho'(t) for R > 0 has det -(R^2 + R'^2) < 0.
  for (double t : {0.1, 1.3, 2.9}) {
    const double r = 0.7, dr = -0.4, c = std::cos(t), s = std::sin(t);
    Eigen::Matrix2d m;
    m << dr * c - r * s, dr * s + r * c, dr * s + r * c, -dr * c + r * s;
    EXPECT_EQ(inertia(SymmetricForm(m)), (Inertia{1, 1, 0}));
  }
}

TEST(Inertia, CongruenceInvariance) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + trial % 4;
    const SymmetricForm s(random_matrix(rng, n));
    Eigen::MatrixXd z = random_matrix(rng, n);
    if (std::abs(z.determinant()) < 1e-2) continue;
    EXPECT_EQ(inertia(s, 1e-9), inertia(s.congruent(z), 1e-9));
  }
}

TEST(DistanceToDegenerate, Examples) {
  EXPECT_DOUBLE_EQ(distance_to_degenerate(SymmetricForm::Identity(2)), 1.0);
  EXPECT_NEAR(distance_to_degenerate(diag2(3.0, -0.5)), 0.5, 1e-15);
  // rho(t) with R = 0.4 has eigenvalues 1 +- R.
  const double r = 0.4, t = 0.8;
  Eigen::Matrix2d m;
  m << 1 + r * std::cos(t), r * std::sin(t), r * std::sin(t), 1 - r * std::cos(t);
  EXPECT_NEAR(distance_to_degenerate(SymmetricForm(m)), 0.6, 1e-14);
}

TEST(DistanceToDegenerate, ZeroExactlyOnDegenerateForms) {
  EXPECT_NEAR(distance_to_degenerate(diag2(2.0, 0.0)), 0.0, 1e-12);
  EXPECT_GT(inertia(diag2(2.0, 0.0), 0.0).n_zero, 0);
}

TEST(IndexPath, ConstantWhenEndpointsAgree) {
  const auto path = index_path(diag2(1, -1), diag2(1, -1), 10);
  ASSERT_EQ(path.size(), 11u);
  for (const auto& p : path) EXPECT_LT((p.matrix() - diag2(1, -1).matrix()).norm(), 1e-12);
}

TEST(IndexPath, StaysInTheInertiaClass) {
  const auto path = index_path(diag2(1, -1), diag2(4, -9), 50);
  for (const auto& p : path) {
    EXPECT_EQ(inertia(p), (Inertia{1, 1, 0}));
    EXPECT_GT(distance_to_degenerate(p), 0.0);
  }
  EXPECT_LT((path.back().matrix() - diag2(4, -9).matrix()).norm(), 1e-12);
}

TEST(IndexPath, RotatedEndpointIsReachedWithoutDegenerating) {
  const double c = std::sqrt(0.5);
  Eigen::Matrix2d q;
  q << c, -c, c, c;
  const SymmetricForm s1 = diag2(1, -1).congruent(q.transpose());
  const auto path = index_path(diag2(1, -1), s1, 64);
  double m = INFINITY;
  for (const auto& p : path) m = std::min(m, distance_to_degenerate(p));
  EXPECT_GT(m, 0.0);
  EXPECT_LT((path.back().matrix() - s1.matrix()).norm(), 1e-12);
}

TEST(IndexPath, RejectsMismatchedInertia) {
  EXPECT_THROW(index_path(diag2(1, 1), diag2(1, -1), 8), PreconditionError);
}

TEST(FixedInertiaCoords2, RoundTrip) {
  const FixedInertiaCoords2 coords(Inertia{1, 1, 0});
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::Vector2d d(0.1 + std::abs(random_matrix(rng, 1)(0)), -0.1 - std::abs(random_matrix(rng, 1)(0)));
    const double th = random_matrix(rng, 1)(0);
    Eigen::Matrix2d q;
    q << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    const SymmetricForm s(q * d.asDiagonal() * q.transpose());
    const SymmetricForm back = coords.from_coords(coords.to_coords(s));
    EXPECT_LT((back.matrix() - s.matrix()).norm(), 1e-12);
  }
}
