// Prescribed-conjugate-set pipeline.  Each bundle is built once per process.

#include <gtest/gtest.h>

#include <map>

#include "conjpoints/abstract_system.hpp"
#include "conjpoints/errors.hpp"
#include "conjpoints/prescribe.hpp"

using namespace conjpoints;

namespace {

const PrescribedBundle& bundle(const std::string& set, double a, double b) {
  static std::map<std::string, PrescribedBundle> cache;
  auto it = cache.find(set);
  if (it == cache.end()) {
    it = cache.emplace(set, build_prescribed(ClosedSetDescriptor::parse(set, a, b))).first;
  }
  return it->second;
}

const PrescribedBundle& point() { return bundle("3.141592653589793", 0.0, 4.0); }
const PrescribedBundle& mixed() { return bundle("1.0;1.5:2.0", 0.0, 2.5); }

}  // namespace

TEST(Pipeline, IsolatedPoint) {
  const auto& B = point();
  ASSERT_EQ(B.report.instants.size(), 1u);
  EXPECT_TRUE(B.report.clusters.empty());
  const auto& inst = B.report.instants[0];
  EXPECT_NEAR(inst.t, M_PI, 2 * B.nominal_step);
  EXPECT_EQ(inst.multiplicity, 1);
  ASSERT_TRUE(inst.signature.has_value());
  EXPECT_EQ(*inst.signature, 0);
  EXPECT_LE(detection_distance_steps(B.report, B.F, B.nominal_step), 2.0);
}

TEST(Pipeline, PointAndInterval) {
  const auto& B = mixed();
  ASSERT_EQ(B.report.instants.size(), 1u);
  ASSERT_EQ(B.report.clusters.size(), 1u);
  EXPECT_NEAR(B.report.instants[0].t, 1.0, 2 * B.nominal_step);
  EXPECT_NEAR(B.report.clusters[0].lo, 1.5, 2 * B.nominal_step);
  EXPECT_NEAR(B.report.clusters[0].hi, 2.0, 2 * B.nominal_step);
}

TEST(Pipeline, CrossingsInsideFHaveSignatureZero) {
  const auto& B = mixed();
  const CrossingData at_point = crossing_data(B.reduction.system, B.report.instants[0].t);
  EXPECT_EQ(at_point.multiplicity, 1);
  EXPECT_EQ(at_point.signature, 0);
  const CrossingData inside = crossing_data(B.reduction.system, 1.75);
  EXPECT_EQ(inside.multiplicity, 1);
  EXPECT_EQ(inside.signature, 0);
}

TEST(Pipeline, MaslovCountUnavailableForIntervals) {
  EXPECT_THROW(maslov_regular(mixed().reduction.system), UnavailableError);
}

TEST(Pipeline, IndexOneThroughout) {
  for (const PrescribedBundle* B : {&point(), &mixed()}) {
    EXPECT_TRUE(B->index.nondegenerate);
    EXPECT_EQ(B->index.index, 1);
    const Nondegeneracy realized = check_nondegenerate(B->realized);
    EXPECT_TRUE(realized.nondegenerate);
    EXPECT_EQ(realized.index, 1);
    EXPECT_LE(B->reduction.max_A_residual, 1e-8);
    EXPECT_LE(B->solution.max_drift, 1e-8);
  }
}

TEST(Pipeline, ExtensionCorrespondences) {
  const auto& B = point();
  const auto l0 = LagrangianFrame::vertical(2);
  const auto& ext = B.extension;
  // (a) xi(a) = xi0; (b) transverse to xi0 on ]a, c].
  EXPECT_EQ(intersection_dim(LagrangianFrame(ext.frames[0]), l0), 2);
  for (int k = 1; k <= ext.c_index; k += 7) {
    EXPECT_EQ(intersection_dim(LagrangianFrame(ext.frames[k]), l0), 0) << k;
  }
  // (c) sigma' keeps the inertia of sigmabar'(c).
  EXPECT_EQ(inertia(ext.P), (Inertia{1, 1, 0}));
  EXPECT_EQ(ext.forms.sigma(B.F.a()).matrix().norm(), 0.0);
  const double c = B.c, a = B.F.a();
  const double e = 1e-6 * (c - a);
  for (int k = 1; k < 50; ++k) {
    const double t = a + (c - a) * k / 50.0;
    EXPECT_GT(distance_to_degenerate(ext.forms.sigma(t)), 0.0);
    const SymmetricForm d((ext.forms.sigma(t + e).matrix() - ext.forms.sigma(t - e).matrix()) /
                          (2 * e));
    EXPECT_EQ(inertia(d, 1e-6), (Inertia{1, 1, 0})) << t;
  }
}

TEST(Pipeline, RhoDerivativeIndefiniteWherePositive) {
  const auto& B = mixed();
  const UniformGrid& g = B.realized.grid();
  for (int k = 0; k <= g.N(); k += 13) {
    const double t = g.time(k);
    EXPECT_NEAR(rho_curve(B.R, t).matrix().determinant(), 1 - B.R(t) * B.R(t), 1e-12);
    EXPECT_EQ(inertia(rho_derivative(B.R, t)), (Inertia{1, 1, 0}));
  }
}

TEST(Pipeline, EmptySetGivesEmptyReport) {
  const auto& B = bundle("", 0.0, 1.0);
  EXPECT_TRUE(B.report.instants.empty());
  EXPECT_TRUE(B.report.clusters.empty());
  EXPECT_EQ(detection_distance_steps(B.report, B.F, B.nominal_step), 0.0);
}

TEST(Pipeline, FailuresNameTheStage) {
  PipelineOptions o;
  o.grid_N = 64;
  o.oversample = 1;
  o.edge_steps = 0.0;
  try {
    build_prescribed(ClosedSetDescriptor::parse("0.5", 0.0, 1.0), o);
    FAIL() << "expected a stage error";
  } catch (const StageError& e) {
    EXPECT_FALSE(e.stage().empty());
  }
  o.grid_N = 10;
  EXPECT_THROW(build_prescribed(ClosedSetDescriptor::parse("0.5", 0.0, 1.0), o), PreconditionError);
}

TEST(DetectionDistance, HausdorffInSteps) {
  const auto F = ClosedSetDescriptor::parse("0.5;0.7:0.8", 0.0, 1.0);
  ConjugateReport r;
  r.instants.push_back({0.51, 1, 0, false});
  r.clusters.push_back({0.7, 0.82});
  EXPECT_NEAR(detection_distance_steps(r, F, 0.01), 2.0, 1e-9);
  EXPECT_TRUE(std::isinf(detection_distance_steps(ConjugateReport{}, F, 0.01)));
}
