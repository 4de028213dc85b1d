// Links only the shared library and its C header.
#include <gtest/gtest.h>

#include <cmath>
#include <string>

#include "conjpoints/conjpoints.h"

TEST(CApi, OscillatorDetection) {
  cp_system* s = nullptr;
  ASSERT_EQ(cp_system_analytic("oscillator", 1, 0.0, 4.0, 2048, &s), CP_OK);
  cp_report* r = nullptr;
  ASSERT_EQ(cp_detect(s, nullptr, &r), CP_OK);
  int ni = 0, nc = 0;
  ASSERT_EQ(cp_report_counts(r, &ni, &nc), CP_OK);
  ASSERT_EQ(ni, 1);
  EXPECT_EQ(nc, 0);
  double t = 0;
  int mult = 0, sig = 0, has_sig = 0, regular = 0;
  ASSERT_EQ(cp_report_instant(r, 0, &t, &mult, &sig, &has_sig, &regular), CP_OK);
  EXPECT_NEAR(t, M_PI, 1e-8);
  EXPECT_EQ(mult, 1);
  EXPECT_TRUE(has_sig);
  EXPECT_EQ(sig, -1);
  EXPECT_EQ(cp_report_instant(r, 1, &t, &mult, &sig, &has_sig, &regular), CP_ERR_ARGUMENT);
  int maslov = 0;
  ASSERT_EQ(cp_maslov_regular(s, nullptr, &maslov), CP_OK);
  EXPECT_EQ(maslov, -1);
  cp_report_free(r);
  cp_system_free(s);
}

TEST(CApi, SampledMorseSturm) {
  const int N = 1024;
  std::vector<double> rs(N + 1, -4.0);
  const double g = 1.0;
  cp_system* s = nullptr;
  ASSERT_EQ(cp_morse_sturm_sampled(1, &g, 0.0, 2.0, N, rs.data(), &s), CP_OK);
  cp_report* r = nullptr;
  ASSERT_EQ(cp_detect(s, nullptr, &r), CP_OK);
  double t = 0;
  int mult = 0, sig = 0, has_sig = 0, regular = 0;
  ASSERT_EQ(cp_report_instant(r, 0, &t, &mult, &sig, &has_sig, &regular), CP_OK);
  EXPECT_NEAR(t, M_PI / 2, 1e-6);
  cp_report_free(r);
  cp_system_free(s);
}

TEST(CApi, ArgumentErrors) {
  EXPECT_EQ(cp_system_analytic("oscillator", 1, 0.0, 4.0, 64, nullptr), CP_ERR_ARGUMENT);
  EXPECT_EQ(cp_detect(nullptr, nullptr, nullptr), CP_ERR_ARGUMENT);
  EXPECT_FALSE(std::string(cp_last_error()).empty());
  cp_system* s = nullptr;
  EXPECT_EQ(cp_system_analytic("pendulum", 1, 0.0, 4.0, 64, &s), CP_ERR_PRECONDITION);
  EXPECT_EQ(s, nullptr);
  EXPECT_EQ(cp_system_load("/nonexistent/system.json", &s), CP_ERR_PRECONDITION);
  EXPECT_NE(std::string(cp_last_error()).find("system.json"), std::string::npos);
}

TEST(CApi, PrescribeRejectsInfAtA) {
  cp_prescribed* p = nullptr;
  EXPECT_EQ(cp_prescribe("0.0", 0.0, 1.0, nullptr, &p), CP_ERR_PRECONDITION);
  EXPECT_FALSE(std::string(cp_last_error()).empty());
  EXPECT_EQ(p, nullptr);
}

TEST(CApi, Version) { EXPECT_FALSE(std::string(cp_version()).empty()); }
