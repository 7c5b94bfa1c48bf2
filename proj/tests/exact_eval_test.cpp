#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ftalloc/exact_eval.hpp"
#include "test_util.hpp"

namespace ftalloc {
namespace {

using testing::brute_objective;
using testing::Q;
using testing::Qs;

TEST(ExactObjective, Examples) {
  auto half = Qs({{1, 2}, {1, 2}});
  EXPECT_EQ(exact_probability(half, half, Q(3, 5)), Q(1, 4));
  auto p = Qs({{7, 10}, {3, 10}, {1, 10}});
  EXPECT_EQ(exact_probability(p, Qs({{1, 1}, {0, 1}, {0, 1}}), Q(1, 2)), Q(7, 10));

  std::vector<Rational> p9(5, Q(9, 10));
  auto w = Qs({{1, 4}, {1, 4}, {1, 6}, {1, 6}, {1, 6}});
  EXPECT_EQ(brute_objective(p9, w, Q(5, 12)), Q(99711, 100000));
  EXPECT_EQ(exact_probability(p9, w, Q(5, 12)), Q(99711, 100000));
}

TEST(ExactObjective, BoundaryCountsAsSuccess) {
  auto p = Qs({{1, 2}, {1, 2}});
  // w . x = theta exactly at x = (1, 1)
  EXPECT_EQ(exact_probability(p, Qs({{1, 3}, {1, 6}}), Q(1, 2)), Q(1, 4));
  EXPECT_EQ(exact_probability(p, Qs({{1, 2}, {0, 1}}), Q(1, 2)), Q(1, 2));
}

TEST(ExactObjective, NonPositiveThetaIsCertain) {
  auto p = Qs({{1, 3}});
  EXPECT_EQ(exact_probability(p, Qs({{0, 1}}), Q(0)), 1);
  EXPECT_EQ(exact_probability(p, Qs({{0, 1}}), Q(-1, 2)), 1);
}

TEST(ExactObjective, AgreesWithEnumerationOnRandomInputs) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    std::uniform_int_distribution<int> nd(1, 9);
    const int n = nd(rng);
    std::vector<Rational> p, w;
    for (int i = 0; i < n; ++i) {
      p.push_back(testing::random_grid_value(rng, 1, 19, 20));
      w.push_back(testing::random_grid_value(rng, 0, 6, 12));
    }
    Rational theta = testing::random_grid_value(rng, 1, 23, 24);
    EXPECT_EQ(exact_probability(p, w, theta), brute_objective(p, w, theta));
  }
}

TEST(ExactObjective, GroupingExtendsPastEnumerationLimit) {
  // Uniform split over 40 nodes: binomial tail, far beyond 2^22 outcomes.
  std::vector<Rational> p(40, Q(1, 2)), w(40, Q(1, 40));
  Rational v = exact_probability(p, w, Q(1, 2));
  // Pr[Bin(40, 1/2) >= 20] = 1/2 + C(40,20)/2^41
  Integer c4020;
  mpz_bin_uiui(c4020.get_mpz_t(), 40, 20);
  Integer two41;
  mpz_ui_pow_ui(two41.get_mpz_t(), 2, 41);
  Rational central(c4020, two41);
  central.canonicalize();
  EXPECT_EQ(v, Q(1, 2) + central);

  std::vector<Rational> distinct;
  for (int i = 0; i < 30; ++i) distinct.push_back(Q(1, 100 + i));
  std::vector<Rational> p30(30, Q(1, 2));
  EXPECT_THROW(exact_probability(p30, distinct, Q(1, 2)), GuardTrip);
}

TEST(ExactObjective, MonotoneInThetaAndProbabilities) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    std::uniform_int_distribution<int> nd(1, 6);
    const int n = nd(rng);
    std::vector<Rational> p, w;
    for (int i = 0; i < n; ++i) {
      p.push_back(testing::random_grid_value(rng, 1, 18, 20));
      w.push_back(testing::random_grid_value(rng, 0, 4, 16));
    }
    Rational prev = 2;
    for (int t = 1; t < 16; ++t) {
      Rational v = exact_probability(p, w, Q(t, 16));
      EXPECT_LE(v, prev);
      prev = v;
    }
    auto bumped = p;
    bumped[std::uniform_int_distribution<int>(0, n - 1)(rng)] += Q(1, 20);
    EXPECT_GE(exact_probability(bumped, w, Q(1, 2)), exact_probability(p, w, Q(1, 2)));
  }
}

TEST(ExactObjective, RescalingAndRearrangementNeverHurt) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 200; ++trial) {
    std::uniform_int_distribution<int> nd(2, 6);
    const int n = nd(rng);
    std::vector<Rational> p, w;
    for (int i = 0; i < n; ++i) {
      p.push_back(testing::random_grid_value(rng, 1, 19, 20));
      w.push_back(testing::random_grid_value(rng, 0, 3, 24));
    }
    std::sort(p.begin(), p.end(), std::greater<>());
    Rational s = sum(w);
    if (s == 0) continue;
    Rational theta = testing::random_grid_value(rng, 1, 19, 20);
    Rational base = exact_probability(p, w, theta);
    if (s < 1) {
      auto scaled = w;
      for (auto& x : scaled) x /= s;
      EXPECT_GE(exact_probability(p, scaled, theta), base);
    }
    auto sorted = w;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    EXPECT_GE(exact_probability(p, sorted, theta), base);
  }
}

TEST(McEstimate, ConcentratesAroundExactValue) {
  auto half = Qs({{1, 2}, {1, 2}});
  int within = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    auto est = mc_estimate(half, half, Q(3, 5), 40000, seed);
    EXPECT_EQ(est.kind, EstimateKind::monte_carlo);
    if (std::abs(est.value - 0.25) <= 0.02) ++within;
  }
  EXPECT_GE(within, 95);
}

TEST(McEstimate, EdgeCases) {
  auto p = Qs({{1, 3}, {2, 3}});
  auto w = Qs({{1, 2}, {1, 2}});
  EXPECT_EQ(mc_estimate(p, w, Q(0), 17, 3).value, 1.0);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    double v = mc_estimate(p, w, Q(1, 2), 1, seed).value;
    EXPECT_TRUE(v == 0.0 || v == 1.0);
  }
  EXPECT_THROW(mc_estimate(p, w, Q(1, 2), 0, 1), InvalidInput);
}

TEST(McEstimate, IndependentOfWorkerCount) {
  auto p = Qs({{1, 3}, {2, 3}, {1, 2}, {3, 4}});
  auto w = Qs({{1, 4}, {1, 4}, {1, 4}, {1, 4}});
  auto a = mc_estimate(p, w, Q(1, 2), 10'000, 42, 1);
  auto b = mc_estimate(p, w, Q(1, 2), 10'000, 42, 4);
  EXPECT_EQ(a.value, b.value);
  auto c = mc_estimate(p, w, Q(1, 2), 10'000, 43, 1);
  EXPECT_NE(a.value, c.value);
}

// Exact boundary handling inside the sampler: 0.1 + 0.2 == 0.3 in rationals.
TEST(McEstimate, BoundaryComparedExactly) {
  auto p = Qs({{999, 1000}, {999, 1000}});
  auto w = Qs({{1, 10}, {2, 10}});
  auto est = mc_estimate(p, w, Q(3, 10), 2000, 1);
  EXPECT_GT(est.value, 0.99);
}

TEST(SampleTail, Examples) {
  auto zero = sample_tail_empirical(Qs({{1, 2}, {1, 3}}), Qs({{0, 1}, {0, 1}}), 50, 1);
  EXPECT_EQ(zero.m(), 50u);
  for (const auto& t : zero.points()) EXPECT_EQ(t, 0);

  auto a = sample_tail_empirical(Qs({{1, 2}}), Qs({{1, 2}}), 4, 99);
  auto b = sample_tail_empirical(Qs({{1, 2}}), Qs({{1, 2}}), 4, 99);
  EXPECT_EQ(a.points(), b.points());
  EXPECT_EQ(a.m(), 4u);
  auto pts = a.points();
  for (const auto& t : pts) EXPECT_TRUE(t == 0 || t == Q(1, 2));
  EXPECT_TRUE(std::is_sorted(pts.begin(), pts.end()));

  auto big = sample_tail_empirical(Qs({{9, 10}, {9, 10}}), Qs({{3, 10}, {2, 10}}), 100'000, 5);
  Rational total = 0;
  for (const auto& [v, c] : big.atoms) total += v * Rational(static_cast<long>(c));
  EXPECT_NEAR(Rational(total / 100000).get_d(), 0.45, 0.01);
}

TEST(Kolmogorov, Examples) {
  DiscreteDist unif01{{{Q(0), Q(1, 2)}, {Q(1), Q(1, 2)}}};
  DiscreteDist unif3{{{Q(0), Q(1, 3)}, {Q(1, 2), Q(1, 3)}, {Q(1), Q(1, 3)}}};
  DiscreteDist at0{{{Q(0), Q(1)}}}, at1{{{Q(1), Q(1)}}};
  EXPECT_EQ(kolmogorov_distance(unif01, unif01), 0);
  EXPECT_EQ(kolmogorov_distance(at0, at1), 1);
  EXPECT_EQ(kolmogorov_distance(unif01, unif3), Q(1, 6));
  EXPECT_EQ(kolmogorov_distance(unif3, unif01), Q(1, 6));
}

// d_K(X+Y, X+Z) <= d_K(Y, Z) for X independent of Y and Z.
TEST(Kolmogorov, AddingIndependentNoiseNeverIncreasesDistance) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Rational> px, wx, py, wy, wz;
    for (int i = 0; i < 3; ++i) {
      px.push_back(testing::random_grid_value(rng, 1, 9, 10));
      wx.push_back(testing::random_grid_value(rng, 0, 8, 8));
      py.push_back(testing::random_grid_value(rng, 1, 9, 10));
      wy.push_back(testing::random_grid_value(rng, 0, 8, 8));
      wz.push_back(testing::random_grid_value(rng, 0, 8, 8));
    }
    auto join = [](auto a, const auto& b) {
      a.insert(a.end(), b.begin(), b.end());
      return a;
    };
    Rational dyz = kolmogorov_distance(tail_distribution(py, wy), tail_distribution(py, wz));
    Rational dsum = kolmogorov_distance(tail_distribution(join(px, py), join(wx, wy)),
                                        tail_distribution(join(px, py), join(wx, wz)));
    EXPECT_LE(dsum, dyz);
  }
}

TEST(Kolmogorov, DkwBoundHolds) {
  // m = ceil(ln(2/delta') / (2 eps'^2)) makes Pr[d_K > eps'] <= delta'.
  const double eps_p = 0.05, delta_p = 0.1;
  const auto m = static_cast<std::size_t>(std::ceil(std::log(2 / delta_p) / (2 * eps_p * eps_p)));
  auto probs = Qs({{7, 10}, {1, 2}, {2, 5}, {3, 10}});
  auto tail = Qs({{3, 10}, {1, 4}, {1, 5}, {1, 10}});
  DiscreteDist exact = tail_distribution(probs, tail);
  int exceed = 0;
  for (std::uint64_t trial = 0; trial < 200; ++trial) {
    auto emp = sample_tail_empirical(probs, tail, m, 1000 + trial);
    if (kolmogorov_distance(emp, exact) > rational_from_double(eps_p)) ++exceed;
  }
  EXPECT_LE(exceed, static_cast<int>(200 * 2 * delta_p * 1.5));
}

TEST(McEstimate, ChernoffSampleSizeConcentrates) {
  // m = ceil((1/eps^2) ln(1/delta)) with mc_constant 1.
  const double eps = 0.1, delta = 0.05;
  const auto m = static_cast<std::size_t>(std::ceil(std::log(1 / delta) / (eps * eps)));
  auto p = Qs({{3, 5}, {11, 20}, {1, 2}, {9, 20}});
  auto w = Qs({{1, 3}, {1, 3}, {1, 6}, {1, 6}});
  const double exact = to_double(exact_probability(p, w, Q(1, 2)));
  int good = 0;
  for (std::uint64_t seed = 0; seed < 400; ++seed)
    if (std::abs(mc_estimate(p, w, Q(1, 2), m, seed).value - exact) <= eps) ++good;
  EXPECT_GE(good, static_cast<int>(400 * (1 - delta)));
}

TEST(TailDistribution, MassesSumToOne) {
  auto d = tail_distribution(Qs({{1, 3}, {1, 2}, {3, 4}}), Qs({{1, 4}, {1, 4}, {1, 2}}));
  EXPECT_EQ(d.total_mass(), 1);
  EXPECT_EQ(d.atoms.front().first, 0);
  EXPECT_EQ(d.atoms.back().first, 1);
  // sums 0, 1/4, 1/2, 3/4, 1 with (1/4,1/4) collapsing
  EXPECT_EQ(d.atoms.size(), 5u);
}

} // namespace
} // namespace ftalloc
