#include <gtest/gtest.h>

#include <chrono>
#include <random>

#include "hmp/cost.hpp"
#include "hmp/scenarios.hpp"
#include "oracles.hpp"

using namespace hmp;

TEST(Cost, PolynomialSegment) {
  std::vector<double> t, qd, u, qdd;
  for (int k = 0; k <= 2000; ++k) {
    t.push_back(k / 2000.0);
    qd.push_back(t.back());
    u.push_back(1.0);
    qdd.push_back(1.0);
  }
  EXPECT_NEAR(segment_cost({1.0, 1.0, 0.0}, t, qd, u, qdd), 2.0 / 3.0, 1e-6);
}

TEST(Cost, SegmentCostIsAdditive) {
  std::vector<double> t, qd, u, qdd;
  for (int k = 0; k <= 100; ++k) {
    const double s = k / 100.0;
    t.push_back(s);
    qd.push_back(std::sin(3 * s));
    u.push_back(std::cos(5 * s));
    qdd.push_back(s * s);
  }
  const CostWeights w{1.3, 0.7, 0.2};
  const std::span<const double> T(t), V(qd), U(u), A(qdd);
  const double whole = segment_cost(w, T, V, U, A);
  const double left = segment_cost(w, T.first(41), V.first(41), U.first(41), A.first(41));
  const double right = segment_cost(w, T.subspan(40), V.subspan(40), U.subspan(40), A.subspan(40));
  EXPECT_NEAR(whole, left + right, 1e-13);
}

TEST(Cost, DefaultWeightsAndBlend) {
  const WeightTable tab;
  EXPECT_EQ(tab.active, (CostWeights{1.0, 4.0, 1.0}));
  EXPECT_EQ(tab.passive, (CostWeights{5.0, 0.1, 0.1}));
  const auto mid = weights_for_mode(JointMode::Transition, tab);
  EXPECT_DOUBLE_EQ(mid.k_u, 3.0);
  EXPECT_DOUBLE_EQ(mid.k_v, 2.05);
  EXPECT_DOUBLE_EQ(mid.k_a, 0.55);
}

TEST(Cost, FlightTimeClosedCases) {
  EXPECT_NEAR(flight_time(0.0, 0.0, 1.0, 9.81), std::sqrt(2.0 / 9.81), 1e-15);
  EXPECT_NEAR(flight_time(4.0, 0.5, 0.0, 9.81), 2 * 4.0 * std::sin(0.5) / 9.81, 1e-15);
  EXPECT_THROW(flight_time(1.0, 0.1, -0.1, 9.81), DomainError);
  EXPECT_THROW(flight_time(1.0, 0.1, 1.0, 0.0), DomainError);
  const auto [tf, x] = oracle::projectile(5.0, 0.6, 0.8, 9.81);
  EXPECT_NEAR(flight_time(5.0, 0.6, 0.8, 9.81), tf, 1e-6);
  (void)x;
}

TEST(Cost, FlightTimeMonotone) {
  double prev = 0.0;
  for (double h = 0.0; h < 3.0; h += 0.1) {
    const double t = flight_time(3.0, 0.4, h, 9.81);
    EXPECT_GT(t, prev);
    prev = t;
  }
}

TEST(Cost, BallisticsMatchProjectileIntegration) {
  const auto model = throwing_scenario().model;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> sweep(0.1, 1.3), rate(-2.0, 8.0);
  const auto start = std::chrono::steady_clock::now();
  int checked = 0;
  while (checked < 100) {
    ReleaseState r{sweep(rng), sweep(rng) - 0.6, rate(rng), rate(rng)};
    const auto o = throw_objective(model, r);
    if (!o.feasible) continue;
    const auto [tf, range] = oracle::projectile(o.speed, o.angle, o.height, model.gravity);
    EXPECT_NEAR(o.flight_time, tf, 1e-6);
    EXPECT_NEAR(o.range, range, 1e-6);
    EXPECT_NEAR(std::hypot(o.vx, o.vy), o.speed, 1e-12);
    ++checked;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_LT(secs, 1.0);
}

TEST(Cost, StillReleaseHasNoRange) {
  const auto o = throw_objective(throwing_scenario().model, {0.4, 0.2, 0.0, 0.0});
  EXPECT_EQ(o.speed, 0.0);
  EXPECT_EQ(o.range, 0.0);
}

TEST(Cost, FrozenElbowIsSingleLinkRelease) {
  const auto m = throwing_scenario().model;
  const auto o = throw_objective(m, {0.7, 0.0, 3.0, 0.0});
  EXPECT_NEAR(o.speed, m.links[0].length * 3.0, 1e-12);
  EXPECT_NEAR(o.angle, 0.7, 1e-15);
  EXPECT_NEAR(std::atan2(o.vy, o.vx), 0.7, 1e-12);
}

TEST(Cost, NegativeHeightIsInfeasible) {
  const auto o = throw_objective(throwing_scenario().model, {-0.8, -0.2, 3.0, 1.0});
  EXPECT_FALSE(o.feasible);
  EXPECT_EQ(o.range, 0.0);
}
