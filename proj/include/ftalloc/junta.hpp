#pragma once

// Exact optimization of a head-only allocation: maximize
// Pr[w . X^(H) >= tau] over w >= 0 with sum w <= W, where X^(H) has L
// coordinates. Every achievable event is a halfspace set over {0,1}^L, so it
// suffices to scan those sets by decreasing probability and stop at the first
// one whose membership constraints admit a feasible w.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "ftalloc/errors.hpp"
#include "ftalloc/exact_eval.hpp"
#include "ftalloc/halfspace.hpp"
#include "ftalloc/lp.hpp"
#include "ftalloc/parallel.hpp"
#include "ftalloc/rational.hpp"

namespace ftalloc {

struct JuntaRequest {
  std::vector<Rational> head_probs;
  Rational tau;
  Rational W = 1;
};

struct JuntaResult {
  std::vector<Rational> weights;
  Rational value;          // exact Pr[weights . X^(H) >= tau]
  PointMask set = 0;       // the halfspace set certified by the LP
  std::size_t lps_solved = 0;
};

// Pr[X = x] for every x in {0,1}^k (bit i = x_i).
inline std::vector<Rational> point_probabilities(std::span<const Rational> probs) {
  const std::size_t k = probs.size();
  std::vector<Rational> out(std::size_t{1} << k, Rational(1));
  for (std::size_t x = 0; x < out.size(); ++x)
    for (std::size_t i = 0; i < k; ++i) out[x] *= ((x >> i) & 1u) ? probs[i] : 1 - probs[i];
  return out;
}

inline Rational set_probability(PointMask members, std::span<const Rational> point_probs) {
  Rational s = 0;
  for (std::size_t x = 0; x < point_probs.size(); ++x)
    if ((members >> x) & 1u) s += point_probs[x];
  return s;
}

namespace detail {

// A witness for {x in S : w . x >= tau_j} constraints; the minimum-budget
// vertex is returned. `groups` pairs each member mask with its threshold.
inline std::optional<std::vector<Rational>> head_witness(
    unsigned k, const std::vector<std::pair<PointMask, Rational>>& groups, const Rational& W) {
  LinearProgram lp;
  for (unsigned i = 0; i < k; ++i) lp.add_variable("w" + std::to_string(i + 1));
  lp.add_constraint(std::vector<Rational>(k, Rational(1)), Relation::le, W);
  for (const auto& [members, tau] : groups) {
    if (tau <= 0) continue; // w >= 0 already gives w . x >= 0 >= tau
    for (std::uint32_t x = 0; x < (1u << k); ++x) {
      if (!((members >> x) & 1u)) continue;
      std::vector<Rational> row(k);
      for (unsigned i = 0; i < k; ++i) row[i] = (x >> i) & 1u ? 1 : 0;
      lp.add_constraint(std::move(row), Relation::ge, tau);
    }
  }
  lp.set_objective(std::vector<Rational>(k, Rational(1)), Sense::minimize);
  LpResult res = lp_solve(lp);
  if (res.status != LpStatus::optimal) return std::nullopt;
  return res.x;
}

} // namespace detail

inline JuntaResult find_optimal_junta(const JuntaRequest& req, unsigned threads = 1) {
  const std::size_t L = req.head_probs.size();
  if (req.W < 0 || req.W > 1) throw InvalidInput("junta budget W must lie in [0, 1]");
  for (const auto& p : req.head_probs)
    if (p < 0 || p > 1) throw InvalidInput("head probabilities must lie in [0, 1]");

  JuntaResult out;
  if (L == 0) {
    out.value = req.tau <= 0 ? 1 : 0;
    out.set = req.tau <= 0 ? 1 : 0;
    return out;
  }
  if (L > kMaxHalfspaceDim)
    throw GuardTrip("junta dimension L = " + std::to_string(L) + " exceeds the halfspace limit " +
                    std::to_string(kMaxHalfspaceDim) + "; use --mode practical --l-cap <= " +
                    std::to_string(kMaxHalfspaceDim));

  const unsigned k = static_cast<unsigned>(L);
  const auto& sets = monotone_halfspace_sets(k);
  const auto point_probs = point_probabilities(req.head_probs);
  std::vector<Rational> set_prob(sets.size());
  for (std::size_t i = 0; i < sets.size(); ++i) set_prob[i] = set_probability(sets[i].members, point_probs);
  std::vector<std::size_t> order(sets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return set_prob[a] > set_prob[b]; });

  // Scan in batches; within the probability level of the first feasible set,
  // keep the lexicographically smallest witness.
  const std::size_t batch = std::max<std::size_t>(1, 4 * std::size_t{threads});
  std::optional<Rational> level;
  std::optional<std::vector<Rational>> best;
  PointMask best_set = 0;
  for (std::size_t start = 0; start < order.size(); start += batch) {
    const std::size_t end = std::min(order.size(), start + batch);
    if (level && set_prob[order[start]] != *level) break;
    auto found = parallel_map<std::optional<std::vector<Rational>>>(end - start, threads, [&](std::size_t j) {
      const auto& hs = sets[order[start + j]];
      if (hs.members != 0 && req.tau > req.W) return std::optional<std::vector<Rational>>();
      return detail::head_witness(k, {{hs.members, req.tau}}, req.W);
    });
    out.lps_solved += end - start;
    for (std::size_t j = 0; j < found.size(); ++j) {
      const std::size_t idx = order[start + j];
      if (level && set_prob[idx] != *level) break;
      if (!found[j]) continue;
      if (!level) level = set_prob[idx];
      if (!best || *found[j] < *best) {
        best = std::move(found[j]);
        best_set = sets[idx].members;
      }
    }
  }
  // The empty set is always feasible, so `best` is set.
  out.weights = std::move(*best);
  out.set = best_set;
  out.value = exact_probability(req.head_probs, out.weights, req.tau);
  return out;
}

} // namespace ftalloc
