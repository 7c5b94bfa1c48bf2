#include <gtest/gtest.h>

#include <random>

#include "ftalloc/junta.hpp"
#include "test_util.hpp"

namespace ftalloc {
namespace {

using testing::brute_objective;
using testing::Q;
using testing::Qs;

// Best value over all heads on the 1/64 grid with sum <= W.
Rational grid_oracle(std::span<const Rational> p, const Rational& tau, const Rational& W) {
  Rational best = 0;
  testing::for_each_grid_vector(p.size(), 64, W, [&](std::span<const Rational> w) {
    Rational v = tau <= 0 ? Rational(1) : brute_objective(p, w, tau);
    if (v > best) best = v;
  });
  return best;
}

TEST(Junta, Examples) {
  auto one = find_optimal_junta({Qs({{7, 10}}), Q(1, 2), Q(1)});
  EXPECT_EQ(one.value, Q(7, 10));
  EXPECT_GE(one.weights[0], Q(1, 2));

  auto two = find_optimal_junta({Qs({{7, 10}, {3, 5}}), Q(3, 4), Q(1)});
  EXPECT_EQ(two.value, Q(7, 10));
  EXPECT_EQ(brute_objective(Qs({{7, 10}, {3, 5}}), two.weights, Q(3, 4)), Q(7, 10));

  auto starved = find_optimal_junta({Qs({{7, 10}, {3, 5}}), Q(3, 4), Q(1, 2)});
  EXPECT_EQ(starved.value, 0);
  EXPECT_EQ(starved.weights, Qs({{0, 1}, {0, 1}}));
}

TEST(Junta, NonPositiveThresholdAndEmptyHead) {
  auto r = find_optimal_junta({Qs({{1, 2}, {1, 3}}), Q(-1, 4), Q(1)});
  EXPECT_EQ(r.value, 1);
  auto empty = find_optimal_junta({{}, Q(1, 2), Q(1)});
  EXPECT_EQ(empty.value, 0);
  EXPECT_TRUE(empty.weights.empty());
  EXPECT_EQ(find_optimal_junta({{}, Q(0), Q(1)}).value, 1);
}

TEST(Junta, MatchesGridOracle) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t L = trial < 30 ? 1 + trial % 2 : 3;
    std::vector<Rational> p;
    for (std::size_t i = 0; i < L; ++i) p.push_back(testing::random_grid_value(rng, 1, 19, 20));
    std::sort(p.begin(), p.end(), std::greater<>());
    Rational tau = testing::random_grid_value(rng, 1, 31, 32);
    Rational W = testing::random_grid_value(rng, 8, 32, 32);
    auto r = find_optimal_junta({p, tau, W});
    EXPECT_LE(sum(r.weights), W);
    for (const auto& x : r.weights) EXPECT_GE(x, 0);
    EXPECT_EQ(r.value, brute_objective(p, r.weights, tau));
    EXPECT_EQ(r.value, grid_oracle(p, tau, W)) << "trial " << trial;
  }
}

TEST(Junta, MonotoneInBudgetAndThreshold) {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Rational> p;
    for (int i = 0; i < 3; ++i) p.push_back(testing::random_grid_value(rng, 1, 19, 20));
    std::sort(p.begin(), p.end(), std::greater<>());
    Rational prev = -1;
    for (int w = 0; w <= 8; ++w) {
      Rational v = find_optimal_junta({p, Q(1, 2), Q(w, 8)}).value;
      EXPECT_GE(v, prev);
      prev = v;
    }
    prev = 2;
    for (int t = 1; t <= 8; ++t) {
      Rational v = find_optimal_junta({p, Q(t, 8), Q(1)}).value;
      EXPECT_LE(v, prev);
      prev = v;
    }
  }
}

TEST(Junta, RerunAtUsedBudgetKeepsValue) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Rational> p;
    for (int i = 0; i < 4; ++i) p.push_back(testing::random_grid_value(rng, 1, 19, 20));
    std::sort(p.begin(), p.end(), std::greater<>());
    Rational tau = testing::random_grid_value(rng, 1, 15, 16);
    auto r = find_optimal_junta({p, tau, Q(1)});
    auto again = find_optimal_junta({p, tau, sum(r.weights)});
    EXPECT_EQ(again.value, r.value);
  }
}

TEST(Junta, IndependentOfWorkerCount) {
  auto p = Qs({{4, 5}, {7, 10}, {3, 5}, {1, 2}, {2, 5}});
  auto a = find_optimal_junta({p, Q(3, 5), Q(1)}, 1);
  auto b = find_optimal_junta({p, Q(3, 5), Q(1)}, 4);
  EXPECT_EQ(a.weights, b.weights);
  EXPECT_EQ(a.value, b.value);
}

TEST(Junta, RefusesOversizedHeads) {
  std::vector<Rational> p(6, Q(1, 2));
  EXPECT_THROW(find_optimal_junta({p, Q(1, 2), Q(1)}), GuardTrip);
}

} // namespace
} // namespace ftalloc
