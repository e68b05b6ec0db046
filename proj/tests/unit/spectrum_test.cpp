#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pcd/spectrum.hpp"

using pcd::ChannelSlotState;

TEST(Spectrum, SensingRootMatchesBisection) {
  for (int k : {1, 2, 3, 5, 10, 17, 40, 100, 1000}) {
    EXPECT_NEAR(pcd::sensing_equation_root(k), pcd::oracle::sensing_root_bisection(k), 1e-9) << k;
  }
  EXPECT_NEAR(pcd::oracle::sensing_root_bisection(10), 3.43, 0.01);
  EXPECT_NEAR(pcd::oracle::sensing_root_bisection(100), 23.1, 0.1);
}

TEST(Spectrum, ReferenceSensedCount) {
  EXPECT_EQ(pcd::reference_sensed_count(1), 1);
  EXPECT_EQ(pcd::reference_sensed_count(10), 3);
  EXPECT_EQ(pcd::reference_sensed_count(100), 23);
  // Left side evaluated at the integers on either side of the K=10 root.
  auto lhs = [](double x) { return (x + 1) * std::log(x + 1) + x; };
  EXPECT_LT(lhs(3), 10.0);
  EXPECT_GT(lhs(4), 10.0);
}

TEST(Spectrum, ReferenceCountAgreesWithIntegerScan) {
  auto lhs = [](double x) { return (x + 1) * std::log(x + 1) + x; };
  for (int k = 1; k <= 200; ++k) {
    int scan = 0;
    while (lhs(scan + 1) <= k) ++scan;  // largest integer with lhs <= K
    const int ref = pcd::reference_sensed_count(k);
    EXPECT_GE(ref, 1);
    EXPECT_LE(ref, k);
    EXPECT_LE(std::abs(ref - std::max(scan, 1)), 1) << k;
  }
}

TEST(Spectrum, EffectiveRateExamples) {
  EXPECT_DOUBLE_EQ(pcd::effective_rate(10e6, 10, 0.1, 1.0), 0.0);
  EXPECT_DOUBLE_EQ(pcd::effective_rate(10e6, 0, 0.1, 1.0), 10e6);
  EXPECT_NEAR(pcd::effective_rate(10e6, 4, 0.1, 1.0), 6e6, 1e-6);
  EXPECT_THROW(pcd::effective_rate(10e6, 11, 0.1, 1.0), std::invalid_argument);
}

TEST(Spectrum, PrimaryOccupancyLimits) {
  pcd::Rng rng(1);
  const auto clean = pcd::sample_primary(10, 0.0, rng);
  EXPECT_EQ(clean.p0, 1.0);
  for (int k = 0; k < 10; ++k) EXPECT_TRUE(clean.is_free(k));
  const auto jammed = pcd::sample_primary(10, 60.0, rng);
  for (int k = 0; k < 10; ++k) EXPECT_FALSE(jammed.is_free(k));
  EXPECT_THROW(pcd::sample_primary(10, -1.0, rng), std::invalid_argument);
}

TEST(Spectrum, PrimaryFreeFraction) {
  pcd::Rng rng(77);
  long long free = 0;
  const int slots = 100000;
  for (int t = 0; t < slots; ++t) {
    const auto s = pcd::sample_primary(10, 0.2, rng);
    EXPECT_EQ(s.p0, std::exp(-0.2));
    for (int k = 0; k < 10; ++k) free += s.is_free(k) ? 1 : 0;
  }
  EXPECT_NEAR(static_cast<double>(free) / (10.0 * slots), 0.8187, 0.005);
}

TEST(Spectrum, PerfectSensorReportsTruth) {
  pcd::Rng rng(3);
  for (int t = 0; t < 200; ++t) {
    const auto truth = pcd::sample_primary(10, 0.7, rng);
    const auto r = pcd::sense_channels(truth, 6, 0.0, 0.0, rng, 4);
    EXPECT_EQ(r.owner, 4);
    ASSERT_EQ(r.sensed.size(), 6u);
    EXPECT_TRUE(std::is_sorted(r.sensed.begin(), r.sensed.end()));
    EXPECT_EQ(std::adjacent_find(r.sensed.begin(), r.sensed.end()), r.sensed.end());
    std::vector<int> expected;
    for (int k : r.sensed) {
      if (truth.is_free(k)) expected.push_back(k);
    }
    EXPECT_EQ(r.believed_free, expected);
  }
}

TEST(Spectrum, AlwaysMissingSensorBelievesAllFree) {
  ChannelSlotState truth;
  truth.occupied.assign(10, true);
  pcd::Rng rng(4);
  const auto r = pcd::sense_channels(truth, 4, 1.0, 0.0, rng);
  EXPECT_EQ(r.believed_free, r.sensed);
}

TEST(Spectrum, SensedSubsetIsUniform) {
  ChannelSlotState truth;
  truth.occupied.assign(8, false);
  pcd::Rng rng(8);
  std::vector<int> hits(8, 0);
  const int trials = 40000;
  for (int t = 0; t < trials; ++t) {
    for (int k : pcd::sense_channels(truth, 2, 0.0, 0.0, rng).sensed) ++hits[k];
  }
  for (int h : hits) EXPECT_NEAR(h / double(trials), 0.25, 0.01);
}

TEST(Spectrum, BelievedFreeAccuracyMatchesBayes) {
  pcd::Rng rng(2025);
  long long believed = 0;
  long long correct = 0;
  for (int t = 0; t < 100000; ++t) {
    const auto truth = pcd::sample_primary(10, 0.2, rng);
    const auto r = pcd::sense_channels(truth, 1, 0.1, 0.1, rng);
    for (int k : r.believed_free) {
      ++believed;
      correct += truth.is_free(k) ? 1 : 0;
    }
  }
  EXPECT_NEAR(static_cast<double>(correct) / believed, 0.976, 0.005);
  EXPECT_NEAR(pcd::p_primary_clear(std::exp(-0.2), 0.1, 0.1), 0.9760, 5e-4);
}

TEST(Spectrum, SuccessProbabilityExamples) {
  EXPECT_DOUBLE_EQ(pcd::p_success(0, 10, std::exp(-0.2), 0.0, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(pcd::p_success(0, 10, 1.0, 0.3, 0.3), 1.0);
  const double p0 = std::exp(-0.2);
  const double p = pcd::p_success(5, 10, p0, 0.1, 0.1);
  EXPECT_NEAR(p, 0.509, 0.001);
  EXPECT_NEAR(p, pcd::oracle::p_success_closed_form(5, 10, p0, 0.1, 0.1), 1e-12);
}

TEST(Spectrum, SuccessFactorizesAndDecreases) {
  const double p0 = std::exp(-0.3);
  double prev = 2.0;
  for (int n = 0; n < 20; ++n) {
    const double peer = pcd::p_no_peer_collision(n, 8, p0);
    const double prim = pcd::p_primary_clear(p0, 0.2, 0.05);
    const double p = pcd::p_success(n, 8, p0, 0.2, 0.05);
    EXPECT_GE(peer, 0.0);
    EXPECT_LE(peer, 1.0);
    EXPECT_GE(prim, 0.0);
    EXPECT_LE(prim, 1.0);
    EXPECT_DOUBLE_EQ(p, peer * prim);
    EXPECT_LT(p, prev);
    prev = p;
  }
}

TEST(Spectrum, SuccessRequiresMoreThanOneExpectedFreeChannel) {
  EXPECT_THROW(pcd::p_success(1, 1, 0.9, 0.1, 0.1), std::domain_error);
  EXPECT_THROW(pcd::p_no_peer_collision(1, 2, 0.5), std::domain_error);
}
