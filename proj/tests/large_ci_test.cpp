#include <gtest/gtest.h>

#include <random>
#include <set>

#include "ftalloc/large_ci.hpp"
#include "test_util.hpp"

namespace ftalloc {
namespace {

using testing::brute_objective;
using testing::Q;
using testing::Qs;

SolverConfig practical(const Rational& kappa) {
  SolverConfig c;
  c.mode = Mode::practical;
  c.kappa_override = kappa;
  return c;
}

ProblemInstance random_instance(std::mt19937_64& rng, std::size_t n, const Rational& eps) {
  const Rational grid = eps / Rational(4 * static_cast<long>(n));
  const long top = floor_int((1 - eps) / grid).get_si() - 1;
  std::vector<Rational> p;
  for (std::size_t i = 0; i < n; ++i) p.push_back(grid * std::uniform_int_distribution<long>(1, top)(rng));
  std::sort(p.begin(), p.end(), std::greater<>());
  return ProblemInstance(p, Q(1, 2), eps, Q(1, 20));
}

TEST(Case2Kappa, Values) {
  ProblemInstance inst(Qs({{3, 5}, {2, 5}}), Q(1, 2), Q(1, 5), Q(1, 10));
  // n = 2, L = 1: 1/(4 (ceil(3^{3/2}) + 1)) = 1/28
  EXPECT_EQ(case2_kappa(inst, 1, SolverConfig{}), Q(1, 28));
  EXPECT_EQ(case2_kappa(inst, 1, practical(Q(1, 20))), Q(1, 20));
}

TEST(Case2Kappa, GuardTripsOnHugeStateSpace) {
  std::mt19937_64 rng(1);
  auto inst = random_instance(rng, 10, Q(1, 10));
  SolverConfig theory;
  theory.state_space_limit = 1000;
  EXPECT_THROW(construct_achievable_tails(inst, 3, case2_kappa(inst, 3, theory), theory), GuardTrip);
}

TEST(AchievableTails, TwoHalfSlots) {
  ProblemInstance inst(Qs({{3, 5}, {1, 2}, {1, 2}}), Q(1, 2), Q(1, 5), Q(1, 10));
  auto triples = construct_achievable_tails(inst, 1, Q(1, 2), practical(Q(1, 2)));
  std::set<std::pair<long, long>> ac;
  for (const auto& t : triples) ac.insert({t.A, t.C});
  std::set<std::pair<long, long>> expected{{0, 0}, {1, 1}, {2, 2}, {4, 2}};
  EXPECT_EQ(ac, expected);
}

TEST(AchievableTails, EmptyTailRange) {
  ProblemInstance inst(Qs({{3, 5}, {1, 2}}), Q(1, 2), Q(1, 5), Q(1, 10));
  auto triples = construct_achievable_tails(inst, 2, Q(1, 4), practical(Q(1, 4)));
  ASSERT_EQ(triples.size(), 1u);
  EXPECT_EQ(triples[0].A, 0);
  EXPECT_EQ(triples[0].B, 0);
  EXPECT_EQ(triples[0].C, 0);
  EXPECT_TRUE(triples[0].witness.empty());
}

TEST(AchievableTails, MatchesBruteForce) {
  std::mt19937_64 rng(8);
  for (long inv : {2L, 4L, 8L})
    for (std::size_t slots = 0; slots <= 3; ++slots)
      for (int rep = 0; rep < 3; ++rep) {
        const std::size_t L = 1 + rep % 2;
        const std::size_t n = L + slots;
        auto inst = random_instance(rng, n, Q(1, 5));
        const Rational kappa = Q(1, inv);
        std::span<const Rational> tail_p(inst.probs().data() + L, slots);

        std::set<std::tuple<Rational, Rational, Rational>> brute;
        testing::for_each_granular_tail(slots, kappa, [&](const std::vector<Rational>& w) {
          auto s = testing::summarize_tail(tail_p, w, kappa, inst.grid());
          brute.insert({s.D, s.A, s.C});
        });
        std::set<std::tuple<Rational, Rational, Rational>> got;
        for (const auto& t : construct_achievable_tails(inst, L, kappa, practical(kappa))) {
          auto s = testing::summarize_tail(tail_p, t.witness, kappa, inst.grid());
          // (A, B, C) here are (sum of squares, mean, sum) in summary units
          EXPECT_EQ(s.D, Q(t.A));
          EXPECT_EQ(s.A, Q(t.B));
          EXPECT_EQ(s.C, Q(t.C));
          EXPECT_LE(sum(t.witness), 1);
          EXPECT_TRUE(got.insert({s.D, s.A, s.C}).second) << "duplicate triple";
        }
        EXPECT_EQ(got, brute) << "slots=" << slots << " 1/kappa=" << inv;
      }
}

TEST(LargeCi, PoolIsFeasibleAndZeroTripleIsTheJunta) {
  std::mt19937_64 rng(12);
  for (int rep = 0; rep < 5; ++rep) {
    auto inst = random_instance(rng, 4, Q(1, 4));
    auto cfg = practical(Q(1, 4));
    auto pool = find_near_opt_large_ci(inst, 2, cfg);
    auto triples = construct_achievable_tails(inst, 2, Q(1, 4), cfg);
    EXPECT_EQ(pool.size(), triples.size());
    for (const auto& c : pool) {
      EXPECT_TRUE(c.w.feasible());
      EXPECT_EQ(c.provenance, Provenance::large_ci);
    }
    // (0,0,0) is discovered first; its shift vanishes.
    ASSERT_EQ(triples[0].A, 0);
    EXPECT_EQ(large_ci_threshold(inst, triples[0], inst.theta()), inst.theta());
    std::vector<Rational> head(inst.probs().begin(), inst.probs().begin() + 2);
    auto junta = find_optimal_junta({head, inst.theta(), Q(1)});
    std::vector<Rational> expected = junta.weights;
    expected.resize(4);
    EXPECT_EQ(pool[0].w.values, expected);
  }
}

TEST(LargeCi, ThresholdShiftUsesMeanAndNormBound) {
  ProblemInstance inst(Qs({{3, 5}, {1, 2}, {1, 2}}), Q(1, 2), Q(1, 5), Q(1, 10));
  auto triples = construct_achievable_tails(inst, 1, Q(1, 2), practical(Q(1, 2)));
  for (const auto& t : triples) {
    Rational mean = 0, sq = 0;
    for (std::size_t i = 0; i < t.witness.size(); ++i) {
      mean += t.witness[i] * inst.probs()[i + 1];
      sq += t.witness[i] * t.witness[i];
    }
    Rational thr = large_ci_threshold(inst, t, inst.theta());
    const double margin = std::sqrt(std::log(200 / 0.2) * to_double(sq));
    EXPECT_NEAR(to_double(thr), to_double(inst.theta() - mean) + margin, 1e-12);
    EXPECT_GE(thr, inst.theta() - mean);
  }
}

TEST(LargeCi, TinyInstanceReachesOracle) {
  // n = 3, L = 1, kappa = 1/4, eps = 0.3: some member is within eps of opt.
  std::mt19937_64 rng(99);
  for (int rep = 0; rep < 10; ++rep) {
    auto inst = random_instance(rng, 3, Q(3, 10));
    auto pool = find_near_opt_large_ci(inst, 1, practical(Q(1, 4)));
    Rational best = 0;
    for (const auto& c : pool) best = std::max(best, brute_objective(inst.probs(), c.w.values, inst.theta()));
    Rational opt = find_optimal_junta({inst.probs(), inst.theta(), Q(1)}).value;
    EXPECT_GE(best, opt - Q(3, 10));
  }
}

} // namespace
} // namespace ftalloc
