#pragma once

// Small critical index K: the tail w_K..w_n is a regular kappa-granular
// vector summarized by (A, B, C, D, E) with
//   sum w_i p_i = A kappa g,        sum w_i^2 p_i (1 - p_i) = B kappa^2 g^2,
//   sum w_i = C kappa,  sum w_i^2 = D kappa^2,  max w_i = E kappa,
// g = eps/(4n). The head w_1..w_{K-1} is optimized exactly against a sampled
// surrogate of the tail sum.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <unordered_map>
#include <vector>

#include "ftalloc/candidate.hpp"
#include "ftalloc/core_model.hpp"
#include "ftalloc/errors.hpp"
#include "ftalloc/exact_eval.hpp"
#include "ftalloc/halfspace.hpp"
#include "ftalloc/junta.hpp"
#include "ftalloc/large_ci.hpp"
#include "ftalloc/parallel.hpp"
#include "ftalloc/random.hpp"
#include "ftalloc/rational.hpp"

namespace ftalloc {

struct RegularTailQuintuple {
  std::int64_t A = 0;
  Rational B; // integral only when 4n/eps is
  std::int64_t C = 0, D = 0, E = 0;
  Rational kappa;
  std::vector<Rational> witness; // w_K..w_n

  // E / sqrt(D) <= eps', compared squared; the zero tail is never regular.
  bool regular(const Rational& eps_prime) const {
    return D > 0 && Rational(E * E) <= eps_prime * eps_prime * Rational(D);
  }
};

// eps gamma^2 / (200 (ceil((L+2)^{(L+2)/2}) + 1)^2 n^3), or the override.
inline Rational case3_kappa(const ProblemInstance& instance, std::size_t L, const SolverConfig& config) {
  if (config.mode == Mode::practical && config.kappa_override) return *config.kappa_override;
  const Integer n = static_cast<unsigned long>(instance.n());
  const Integer c = ceil_self_half_power(L + 2) + 1;
  return instance.epsilon() * instance.gamma() * instance.gamma() / Rational(200 * c * c * n * n * n);
}

namespace detail {

struct Key5 {
  std::int64_t a, b, c, d, e;
  bool operator==(const Key5&) const = default;
};

struct Key5Hash {
  std::size_t operator()(const Key5& k) const {
    std::uint64_t h = 0;
    for (std::int64_t v : {k.a, k.b, k.c, k.d, k.e}) h = splitmix64(h ^ static_cast<std::uint64_t>(v));
    return h;
  }
};

} // namespace detail

// Every quintuple reachable by a kappa-granular tail over sorted positions
// K..n (1-based) with total weight <= 1, zero tail included, first witness
// per quintuple.
inline std::vector<RegularTailQuintuple> construct_tail_quintuples(const ProblemInstance& instance,
                                                                   std::size_t K, const Rational& kappa,
                                                                   const SolverConfig& config) {
  const std::size_t n = instance.n();
  if (K < 1 || K > n) throw InvalidInput("K must lie in [1, n]");
  const Integer cmax_big = kappa_units(kappa);
  const std::size_t slots = n - K + 1;
  check_state_space(tail_state_estimate(slots, cmax_big, HUGE_VAL), config,
                    "small-critical-index tail DP", kappa);
  const std::int64_t cmax = cmax_big.get_si();

  // B is kept as B * eps_num, which is integral:
  // B = sum j^2 a (4n eps_den - a eps_num) / eps_num.
  const Integer eps_num = instance.epsilon().get_num();
  const Integer four_n_den = instance.epsilon().get_den() * static_cast<unsigned long>(4 * n);

  struct Node {
    detail::Key5 key;
    std::int32_t parent;
    std::int64_t j;
  };
  std::vector<std::vector<Node>> layers(1);
  layers[0].push_back({{0, 0, 0, 0, 0}, -1, 0});
  for (std::size_t t = K - 1; t < n; ++t) {
    const Integer a_big = instance.prob_units(t);
    const std::int64_t a_t = a_big.get_si();
    const std::int64_t var_unit = Integer(a_big * (four_n_den - a_big * eps_num)).get_si();
    std::vector<Node> next;
    std::unordered_map<detail::Key5, std::size_t, detail::Key5Hash> seen;
    const auto& prev = layers.back();
    for (std::size_t s = 0; s < prev.size(); ++s) {
      const auto& k = prev[s].key;
      for (std::int64_t j = 0; k.c + j <= cmax; ++j) {
        detail::Key5 nk{k.a + j * a_t, k.b + j * j * var_unit, k.c + j, k.d + j * j, std::max(k.e, j)};
        if (seen.emplace(nk, next.size()).second) {
          next.push_back({nk, static_cast<std::int32_t>(s), j});
          if (next.size() > config.state_space_limit)
            throw GuardTrip("small-critical-index tail DP exceeded state_space_limit");
        }
      }
    }
    layers.push_back(std::move(next));
  }

  std::vector<RegularTailQuintuple> out;
  const auto& last = layers.back();
  out.reserve(last.size());
  for (std::size_t s = 0; s < last.size(); ++s) {
    const auto& k = last[s].key;
    Rational b(Integer(static_cast<long>(k.b)), eps_num);
    b.canonicalize();
    RegularTailQuintuple q{k.a, b, k.c, k.d, k.e, kappa, std::vector<Rational>(slots)};
    std::size_t idx = s;
    for (std::size_t layer = slots; layer > 0; --layer) {
      const auto& node = layers[layer][idx];
      q.witness[layer - 1] = kappa * Rational(static_cast<long>(node.j));
      idx = static_cast<std::size_t>(node.parent);
    }
    out.push_back(std::move(q));
  }
  return out;
}

// Regular quintuples projected to (A, B, C), first witness per projection.
inline std::vector<RegularTailQuintuple> construct_achievable_regular_tails(const ProblemInstance& instance,
                                                                           std::size_t K,
                                                                           const Rational& kappa,
                                                                           const Rational& eps_prime,
                                                                           const SolverConfig& config) {
  if (eps_prime <= 0) throw InvalidInput("eps' must be positive");
  // E^2 >= D / (#slots) for any tail, so fewer than 1/eps'^2 slots rule out
  // regularity before any state is built.
  const std::size_t slots = instance.n() + 1 - K;
  if (eps_prime * eps_prime * Rational(static_cast<long>(slots)) < 1) return {};

  std::vector<RegularTailQuintuple> out;
  std::map<std::tuple<std::int64_t, Rational, std::int64_t>, bool> seen;
  for (auto& q : construct_tail_quintuples(instance, K, kappa, config)) {
    if (!q.regular(eps_prime)) continue;
    if (seen.emplace(std::make_tuple(q.A, q.B, q.C), true).second) out.push_back(std::move(q));
  }
  return out;
}

enum class HeadSearchMode { chain, literal };

struct HeadResult {
  std::vector<Rational> weights;
  Rational value; // exact (1/m) sum_j Pr[weights . X^(H) >= theta - t_j]
  std::size_t lps_solved = 0;
};

// (1/m) sum over the sample multiset of Pr[u . X^(H) + t_j >= theta].
inline Rational head_value(std::span<const Rational> head_probs, std::span<const Rational> u,
                           const EmpiricalDist& points, const Rational& theta) {
  Rational total = 0;
  for (const auto& [t, c] : points.atoms)
    total += Rational(static_cast<long>(c)) * exact_probability(head_probs, u, theta - t);
  return total / Rational(static_cast<long>(points.m()));
}

namespace detail {

inline bool better_head(const Rational& value, const std::vector<Rational>& w, const HeadResult& best,
                        bool have_best) {
  return !have_best || value > best.value || (value == best.value && w < best.weights);
}

inline HeadResult best_head_chain(std::span<const Rational> head_probs, const EmpiricalDist& points,
                                  const Rational& W, const Rational& theta) {
  const unsigned k = static_cast<unsigned>(head_probs.size());
  const Rational m = static_cast<long>(points.m());
  const auto& sets = monotone_halfspace_sets(k);
  const auto point_probs = point_probabilities(head_probs);
  std::vector<Rational> set_prob(sets.size());
  for (std::size_t i = 0; i < sets.size(); ++i) set_prob[i] = set_probability(sets[i].members, point_probs);
  std::vector<std::size_t> order(sets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return set_prob[a] > set_prob[b]; });

  // Levels with 0 < tau <= W need a set; tau <= 0 always holds and tau > W
  // only admits the empty set.
  std::vector<std::pair<Rational, Rational>> levels; // (tau, weight c/m) ascending tau
  Rational base = 0;
  for (auto it = points.atoms.rbegin(); it != points.atoms.rend(); ++it) {
    Rational tau = theta - it->first;
    Rational weight = Rational(static_cast<long>(it->second)) / m;
    if (tau <= 0)
      base += weight;
    else if (tau <= W)
      levels.emplace_back(tau, weight);
  }
  std::vector<Rational> suffix(levels.size() + 1);
  for (std::size_t j = levels.size(); j-- > 0;) suffix[j] = suffix[j + 1] + levels[j].second;

  HeadResult best;
  bool have_best = false;
  auto consider = [&](const std::vector<Rational>& w) {
    Rational v = head_value(head_probs, w, points, theta);
    if (better_head(v, w, best, have_best)) {
      best.weights = w;
      best.value = v;
      have_best = true;
    }
  };
  consider(std::vector<Rational>(k, Rational(0)));

  // Nested chain S_1 >= S_2 >= ... over ascending tau, each level certified
  // jointly with the ones above it.
  std::vector<std::pair<PointMask, Rational>> groups;
  std::function<void(std::size_t, PointMask, Rational)> dfs = [&](std::size_t level, PointMask parent,
                                                                  Rational acc) {
    if (level == levels.size()) return;
    for (std::size_t idx : order) {
      const auto& hs = sets[idx];
      if ((hs.members & ~parent) != 0 || hs.members == 0) continue;
      // Later levels can only use subsets of this one.
      if (base + acc + set_prob[idx] * suffix[level] <= best.value) break;
      groups.emplace_back(hs.members, levels[level].first);
      auto w = head_witness(k, groups, W);
      ++best.lps_solved;
      if (w) {
        consider(*w);
        dfs(level + 1, hs.members, acc + set_prob[idx] * levels[level].second);
      }
      groups.pop_back();
    }
  };
  dfs(0, full_mask(k), Rational(0));
  return best;
}

inline HeadResult best_head_literal(std::span<const Rational> head_probs, const EmpiricalDist& points,
                                    const Rational& W, const Rational& theta) {
  const unsigned k = static_cast<unsigned>(head_probs.size());
  const auto& sets = enumerate_halfspace_sets(k);
  const auto pts = points.points();
  const double combos = std::pow(static_cast<double>(sets.size()), static_cast<double>(pts.size()));
  if (combos > 2e6)
    throw GuardTrip("literal head search would visit " + std::to_string(combos) + " set tuples");

  HeadResult best;
  bool have_best = false;
  std::vector<std::size_t> pick(pts.size(), 0);
  while (true) {
    std::vector<std::pair<PointMask, Rational>> groups;
    for (std::size_t j = 0; j < pts.size(); ++j) groups.emplace_back(sets[pick[j]].members, theta - pts[j]);
    auto w = head_witness(k, groups, W);
    ++best.lps_solved;
    if (w) {
      Rational v = head_value(head_probs, *w, points, theta);
      if (better_head(v, *w, best, have_best)) {
        best.weights = std::move(*w);
        best.value = v;
        have_best = true;
      }
    }
    std::size_t j = 0;
    while (j < pick.size() && ++pick[j] == sets.size()) pick[j++] = 0;
    if (j == pick.size()) break;
  }
  return best;
}

} // namespace detail

// Exactly maximizes head_value over u >= 0 with sum u <= W.
inline HeadResult find_best_head(std::span<const Rational> head_probs, const EmpiricalDist& points,
                                 const Rational& W, const Rational& theta,
                                 HeadSearchMode mode = HeadSearchMode::chain) {
  if (points.m() == 0) throw InvalidInput("head search needs at least one sample point");
  if (W < 0) throw InvalidInput("head budget must be non-negative");
  if (head_probs.size() > kMaxHalfspaceDim)
    throw GuardTrip("head dimension " + std::to_string(head_probs.size()) + " exceeds the halfspace limit " +
                    std::to_string(kMaxHalfspaceDim));
  if (head_probs.empty()) {
    HeadResult r;
    r.value = head_value(head_probs, {}, points, theta);
    return r;
  }
  return mode == HeadSearchMode::chain ? detail::best_head_chain(head_probs, points, W, theta)
                                       : detail::best_head_literal(head_probs, points, W, theta);
}

// ceil(mc_constant ln(1/delta') / eps'^2)
inline std::size_t head_sample_count(const Rational& eps_prime, const Rational& delta_prime,
                                     const Rational& mc_constant) {
  const double e = to_double(eps_prime);
  const double m = std::ceil(to_double(mc_constant) * std::log(1 / to_double(delta_prime)) / (e * e));
  if (!(m <= 1e9)) throw GuardTrip("head sampling would need " + std::to_string(m) + " draws");
  return std::max<std::size_t>(1, static_cast<std::size_t>(m));
}

struct ApproxHeadResult {
  HeadResult head;
  std::size_t m = 0;
  std::size_t distinct_points = 0;
};

// K is 1-based: the head is w_1..w_{K-1} and the tail w_K..w_n.
inline ApproxHeadResult find_approximately_best_head(const ProblemInstance& instance, std::size_t K,
                                                     std::span<const Rational> tail_weights,
                                                     const Rational& eps_prime, const Rational& delta_prime,
                                                     const Rational& theta, std::uint64_t seed,
                                                     const SolverConfig& config) {
  const std::size_t n = instance.n();
  if (K < 1 || K > n || tail_weights.size() != n - K + 1)
    throw InvalidInput("tail length must equal n - K + 1");
  const Rational tail_mass = sum(tail_weights);
  if (tail_mass > 1) throw InvalidInput("tail weights exceed the budget");
  ApproxHeadResult out;
  out.m = head_sample_count(eps_prime, delta_prime, config.mc_constant);
  std::span<const Rational> probs(instance.probs());
  EmpiricalDist pts = sample_tail_empirical(probs.subspan(K - 1), tail_weights, out.m, seed);
  out.distinct_points = pts.atoms.size();
  out.head = find_best_head(probs.subspan(0, K - 1), pts, 1 - tail_mass, theta);
  return out;
}

inline std::vector<Candidate> find_near_opt_small_ci(const ProblemInstance& instance, std::size_t K,
                                                     std::size_t L, const Rational& delta,
                                                     const SolverConfig& config) {
  if (K < 1 || K > L) throw InvalidInput("small-critical-index case needs 1 <= K <= L");
  const Rational kappa = case3_kappa(instance, L, config);
  const Rational eps_prime = instance.epsilon() * instance.gamma() / 100;
  const auto tails = construct_achievable_regular_tails(instance, K, kappa, eps_prime, config);
  if (tails.empty()) return {};
  const Rational head_eps = instance.epsilon() / 200;
  const Rational head_delta = delta / Rational(2 * static_cast<long>(tails.size()));

  return parallel_map<Candidate>(tails.size(), config.threads, [&](std::size_t i) {
    const auto& q = tails[i];
    const std::uint64_t seed = derive_seed(config.seed, (std::uint64_t{K} << 32) | i);
    auto head = find_approximately_best_head(instance, K, q.witness, head_eps, head_delta, instance.theta(),
                                             seed, config);
    Candidate c;
    c.w.values = head.head.weights;
    c.w.values.insert(c.w.values.end(), q.witness.begin(), q.witness.end());
    c.w.split_index = K;
    c.provenance = Provenance::small_ci;
    c.K = K;
    c.index = i;
    return c;
  });
}

} // namespace ftalloc
