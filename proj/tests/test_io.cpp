#include <gtest/gtest.h>

#include <filesystem>

#include "conjpoints/sds.hpp"
#include "conjpoints/errors.hpp"
#include "conjpoints/io.hpp"
#include "support.hpp"

using namespace conjpoints;
using namespace conjpoints::io;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("conjpoints_io_" + name)).string();
}

}  // namespace

TEST(Io, AnalyticRoundTrip) {
  const SympDiffSystem x = analytic_system("oscillator", 1, UniformGrid(0.0, 4.0, 1024));
  DetectDefaults dd;
  dd.exclusion_radius = 0.05;
  DetectDefaults back;
  const SympDiffSystem y = system_from_json(system_to_json(x, dd), &back);
  EXPECT_EQ(dump(report_to_json(conjugate_instants(x))), dump(report_to_json(conjugate_instants(y))));
  ASSERT_TRUE(back.exclusion_radius.has_value());
  EXPECT_EQ(*back.exclusion_radius, 0.05);
  EXPECT_THROW(analytic_system("pendulum", 1, UniformGrid(0.0, 1.0, 8)), PreconditionError);
}

TEST(Io, SampledRoundTripIsExact) {
  const SympDiffSystem src = conjpoints::testing::random_system(2, 1, 3, 0.0, 2.0, 256);
  std::vector<SpBlocks> samples;
  for (int k = 0; k <= 256; ++k) samples.push_back(src.grid_coefficients(k));
  const SympDiffSystem x = SympDiffSystem::sampled(2, src.grid(), samples);
  const json j = system_to_json(x);
  const SympDiffSystem y = system_from_json(json::parse(dump(j)));
  for (int k = 0; k <= 256; k += 31) {
    EXPECT_EQ(x.grid_coefficients(k).A, y.grid_coefficients(k).A);
    EXPECT_EQ(x.grid_coefficients(k).B.matrix(), y.grid_coefficients(k).B.matrix());
  }
  EXPECT_EQ(dump(system_to_json(y)), dump(j));
}

TEST(Io, ReportIsDeterministic) {
  const SympDiffSystem x = analytic_system("oscillator", 2, UniformGrid(0.0, 7.0, 2048));
  const std::string a = dump(report_to_json(conjugate_instants(x)));
  const std::string b = dump(report_to_json(conjugate_instants(x)));
  EXPECT_EQ(a, b);
  const json r = json::parse(a);
  ASSERT_EQ(r["instants"].size(), 2u);
  EXPECT_EQ(r["instants"][0]["multiplicity"], 2);
}

TEST(Io, TraceCsv) {
  const ConjugateReport r = conjugate_instants(analytic_system("flat", 1, UniformGrid(0.0, 1.0, 8)));
  const std::string csv = trace_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "t,d(t)");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 10);
}

TEST(Io, MetricRoundTrip) {
  MorseSturm ms;
  ms.g = SymmetricForm(Eigen::Vector2d(1.0, -1.0).asDiagonal().toDenseMatrix());
  const UniformGrid g(0.0, 2.0, 64);
  std::vector<Eigen::MatrixXd> r;
  for (int k = 0; k <= 64; ++k) r.push_back(Eigen::Matrix2d::Identity() * (-1.0 - 0.1 * g.time(k)));
  ms = MorseSturm::sampled(ms.g, g, r);
  const ConformalMetric m = metric_from_morse_sturm(ms, Causal::kTimelike);
  const auto [m2, ms2] = metric_from_json(json::parse(dump(metric_to_json(m))));
  EXPECT_EQ(m2.causal, Causal::kTimelike);
  EXPECT_EQ(m2.index_of_metric(), m.index_of_metric());
  const Eigen::Vector3d x(0.1, 0.2, 0.7);
  EXPECT_NEAR(m2.omega(x), m.omega(x), 1e-15);
}

TEST(Io, BadInputIsAPreconditionError) {
  EXPECT_THROW(read_json_file(temp_path("does_not_exist.json")), PreconditionError);
  const std::string p = temp_path("malformed.json");
  write_text_file(p, "{ \"n\": 1, ");
  EXPECT_THROW(read_json_file(p), PreconditionError);
  EXPECT_THROW(system_from_json(json::parse(R"({"n": 1})")), PreconditionError);
  std::filesystem::remove(p);
}
