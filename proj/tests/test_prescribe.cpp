#include <gtest/gtest.h>

#include <cmath>

#include "conjpoints/errors.hpp"
#include "conjpoints/prescribe.hpp"

using namespace conjpoints;

namespace {

SymmetricForm diag2(double a, double b) { return SymmetricForm::Diagonal(Eigen::Vector2d(a, b)); }

SymmetricForm rotated(const SymmetricForm& s, double th) {
  Eigen::Matrix2d q;
  q << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
  return s.congruent(q.transpose());
}

SmoothScalarCurve constant_curve(double v) {
  SmoothScalarCurve c;
  c.value = [v](double) { return v; };
  c.derivative = [](double) { return 0.0; };
  return c;
}

}  // namespace

// ---------------------------------------------------------------------------
// Closed sets

TEST(ClosedSetDescriptor, ParseSortsAndMerges) {
  const auto f = ClosedSetDescriptor::parse("2.0; 1.5:1.8 ;1.7:1.9;0.5", 0.0, 2.5);
  ASSERT_EQ(f.intervals().size(), 3u);
  EXPECT_DOUBLE_EQ(f.intervals()[0].lo, 0.5);
  EXPECT_DOUBLE_EQ(f.intervals()[1].lo, 1.5);
  EXPECT_DOUBLE_EQ(f.intervals()[1].hi, 1.9);
  EXPECT_DOUBLE_EQ(f.inf(), 0.5);
  EXPECT_TRUE(f.contains(1.6));
  EXPECT_FALSE(f.contains(1.0));
  EXPECT_NEAR(f.distance(1.0), 0.5, 1e-15);
  EXPECT_TRUE(ClosedSetDescriptor::parse("", 0.0, 1.0).empty());
}

TEST(ClosedSetDescriptor, RejectsInvalidSets) {
  EXPECT_THROW(ClosedSetDescriptor::parse("0.0", 0.0, 1.0), PreconditionError);
  EXPECT_THROW(ClosedSetDescriptor::parse("0.5:0.2", 0.0, 1.0), PreconditionError);
  EXPECT_THROW(ClosedSetDescriptor::parse("1.5", 0.0, 1.0), PreconditionError);
  EXPECT_THROW(ClosedSetDescriptor::parse("abc", 0.0, 1.0), PreconditionError);
  EXPECT_THROW(ClosedSetDescriptor::parse("0.5", 1.0, 0.0), PreconditionError);
}

TEST(ComplementGaps, UnboundedEnds) {
  const auto gaps = complement_gaps(ClosedSetDescriptor::parse("0.3;0.5:0.6", 0.0, 1.0));
  ASSERT_EQ(gaps.size(), 3u);
  EXPECT_TRUE(std::isinf(gaps[0].lo));
  EXPECT_DOUBLE_EQ(gaps[1].lo, 0.3);
  EXPECT_DOUBLE_EQ(gaps[1].hi, 0.5);
  EXPECT_TRUE(std::isinf(gaps[2].hi));
}

// ---------------------------------------------------------------------------
// Vanishing function and rho

TEST(VanishingFunction, EmptySetIsPositive) {
  const auto f = vanishing_function(ClosedSetDescriptor::parse("", 0.0, 1.0));
  for (int k = 0; k <= 100; ++k) EXPECT_GT(f(k / 100.0), 0.0);
}

TEST(VanishingFunction, ZeroSetIsF) {
  const auto f1 = vanishing_function(ClosedSetDescriptor::parse("0.5", 0.0, 1.0));
  EXPECT_EQ(f1(0.5), 0.0);
  const auto f2 = vanishing_function(ClosedSetDescriptor::parse("0.25:0.5", 0.0, 1.0));
  const int N = 4096;
  const double h = 1.0 / N;
  for (int k = 1; k <= N; ++k) {
    const double t = k * h;
    if (t >= 0.25 && t <= 0.5) {
      EXPECT_LT(std::abs(f2(t)), 1e-15);
    } else if (std::min(std::abs(t - 0.25), std::abs(t - 0.5)) >= h) {
      EXPECT_GT(f2(t), 0.0) << t;
      EXPECT_LT(f2(t), 1.0);
    }
  }
}

TEST(VanishingFunction, DerivativesMatchDifferences) {
  const auto f = vanishing_function(ClosedSetDescriptor::parse("0.3;0.6:0.7", 0.0, 1.0));
  const double e = 1e-5;
  for (double t : {0.1, 0.32, 0.45, 0.75, 0.95}) {
    EXPECT_NEAR(f.derivative(t), (f(t + e) - f(t - e)) / (2 * e), 1e-5);
    EXPECT_NEAR(f.second(t), (f.derivative(t + e) - f.derivative(t - e)) / (2 * e), 1e-4);
    EXPECT_NEAR(f.third(t), (f.second(t + e) - f.second(t - e)) / (2 * e), 1e-2);
  }
}

TEST(Rho, DeterminantIdentities) {
  SmoothScalarCurve r;
  r.value = [](double t) { return 0.5 + 0.3 * std::sin(2 * t); };
  r.derivative = [](double t) { return 0.6 * std::cos(2 * t); };
  for (int k = 0; k <= 50; ++k) {
    const double t = 0.1 * k, rt = r(t), dr = r.derivative(t);
    EXPECT_NEAR(rho_curve(r, t).matrix().determinant(), 1 - rt * rt, 1e-12);
    EXPECT_NEAR(rho_derivative(r, t).matrix().determinant(), -(rt * rt + dr * dr), 1e-12);
    EXPECT_EQ(inertia(rho_derivative(r, t)), (Inertia{1, 1, 0}));
  }
}

TEST(Rho, ConstantOneIsDegenerate) {
  for (double t : {0.0, 0.4, 2.0}) {
    EXPECT_EQ(inertia(rho_curve(constant_curve(1.0), t)).n_zero, 1);
  }
  EXPECT_THROW(rho_curve(constant_curve(0.0), 0.3), PreconditionError);
}

// ---------------------------------------------------------------------------
// Extension

TEST(ExtendAverage, ConstantInputIsReturned) {
  const SymmetricForm u = diag2(2.0, -1.0);
  const auto ext = extend_average([u](double) { return u; }, u, 0.0, 1.0, 256, 0.25, 1e-6, 0.01);
  EXPECT_LT(ext.delta.matrix().norm(), 1e-12);
  for (double t : {0.0, 0.5, 0.9, 1.0}) EXPECT_LT((ext.tau(t).matrix() - u.matrix()).norm(), 1e-12);
}

TEST(ExtendAverage, IntegralConditionAndDeltaBound) {
  for (int trial = 0; trial < 5; ++trial) {
    const double w = 1.0 + 0.5 * trial;
    const FormCurve taubar = [w](double t) {
      return rotated(diag2(1.5 + 0.3 * std::sin(w * t), -0.8 - 0.2 * std::cos(w * t)), 0.3 * t);
    };
    const SymmetricForm u = rotated(diag2(1.0, -1.0), 0.1 * trial);
    const auto ext = extend_average(taubar, u, 0.0, 1.0, 512, 0.25, 1e-6, 0.01);
    EXPECT_LE(ext.integral_defect, 1e-9);
    EXPECT_LE(ext.delta.matrix().norm(),
              ext.eps / (1.0 - ext.eps) * ext.gamma_deviation * (1 + 1e-9));
    EXPECT_LT((ext.tau(1.0).matrix() - taubar(1.0).matrix()).norm(), 1e-12);
    for (int k = 0; k <= 100; ++k) EXPECT_EQ(inertia(ext.tau(0.01 * k)), (Inertia{1, 1, 0}));
  }
}

TEST(ExtendAverage, RejectsWrongInertia) {
  const FormCurve taubar = [](double) { return diag2(1.0, 1.0); };
  EXPECT_THROW(extend_average(taubar, diag2(1.0, -1.0), 0.0, 1.0, 64, 0.25, 1e-6, 0.01),
               PreconditionError);
}

TEST(ExtendForms, StartsAtZeroAndStaysNondegenerate) {
  const FormCurve sigmabar = [](double t) {
    return rotated(diag2(t + 0.1 * std::sin(3 * t), -t - 0.2 * t * t), 0.2 * std::sin(t));
  };
  const auto ext = extend_forms(sigmabar, 0.0, 1.0, 2.0, 512, 1e-7);
  EXPECT_EQ(ext.sigma(0.0).matrix().norm(), 0.0);
  const double e = 1e-5;
  for (int k = 1; k <= 200; ++k) {
    const double t = 0.01 * k;
    EXPECT_GT(distance_to_degenerate(ext.sigma(t)), 0.0) << t;
    if (t > 2 * e && t < 2.0 - 2 * e && std::abs(t - 1.0) > 2 * e) {
      const SymmetricForm d((ext.sigma(t + e).matrix() - ext.sigma(t - e).matrix()) / (2 * e));
      EXPECT_EQ(inertia(d, 1e-6), (Inertia{1, 1, 0})) << t;
    }
  }
  EXPECT_LT((ext.sigma(1.5).matrix() - sigmabar(1.5).matrix()).norm(), 1e-15);
}
