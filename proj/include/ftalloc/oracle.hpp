#pragma once

// Ground truth for tiny instances, the uniform-split heuristic, and the
// five-node instance on which no uniform split is optimal.

#include <algorithm>
#include <numeric>
#include <span>
#include <vector>

#include "ftalloc/errors.hpp"
#include "ftalloc/exact_eval.hpp"
#include "ftalloc/halfspace.hpp"
#include "ftalloc/junta.hpp"
#include "ftalloc/rational.hpp"

namespace ftalloc {

struct OracleResult {
  Rational opt_value;
  std::vector<Rational> witness; // same index order as the input probabilities
  std::size_t sets_examined = 0;
  bool grid_path = false; // n = 5 relies on the weight-grid enumeration
};

// The exact optimum is the best junta over all n coordinates.
inline OracleResult brute_force_optimum(std::span<const Rational> probs, const Rational& theta,
                                        unsigned threads = 1) {
  const std::size_t n = probs.size();
  if (n == 0) throw InvalidInput("empty probability vector");
  if (n > kMaxHalfspaceDim)
    throw GuardTrip("the exact oracle supports n <= " + std::to_string(kMaxHalfspaceDim) +
                    " (n = " + std::to_string(n) + ")");
  auto r = find_optimal_junta({std::vector<Rational>(probs.begin(), probs.end()), theta, Rational(1)}, threads);
  return {r.value, std::move(r.weights), r.lps_solved, n > kMaxFunctionEnumerationDim};
}

struct BaselineResult {
  std::size_t best_k = 1;
  Rational value;
  std::vector<Rational> per_k; // per_k[k-1] = Obj of the uniform k-split
  std::vector<std::size_t> order; // indices by decreasing probability
};

inline std::vector<Rational> uniform_split_weights(std::span<const std::size_t> order, std::size_t k) {
  std::vector<Rational> w(order.size(), Rational(0));
  for (std::size_t i = 0; i < k; ++i) w[order[i]] = Rational(1, static_cast<unsigned long>(k));
  return w;
}

// w = (1/k, ..., 1/k, 0, ...) on the k most reliable nodes, for every k.
inline BaselineResult uniform_split_baseline(std::span<const Rational> probs, const Rational& theta) {
  const std::size_t n = probs.size();
  if (n == 0) throw InvalidInput("empty probability vector");
  BaselineResult out;
  out.order.resize(n);
  std::iota(out.order.begin(), out.order.end(), std::size_t{0});
  std::stable_sort(out.order.begin(), out.order.end(),
                   [&](std::size_t a, std::size_t b) { return probs[a] > probs[b]; });
  for (std::size_t k = 1; k <= n; ++k) {
    // One distinct weight, so the grouped evaluation handles any n.
    Rational v = exact_probability(probs, uniform_split_weights(out.order, k), theta, n);
    if (k == 1 || v > out.value) {
      out.value = v;
      out.best_k = k;
    }
    out.per_k.push_back(std::move(v));
  }
  return out;
}

struct CounterexampleReport {
  std::vector<Rational> probs;
  Rational theta;
  std::vector<Rational> candidate;
  Rational candidate_value;
  BaselineResult uniform;
  bool candidate_beats_uniform = false;
};

// n = 5, p_i = 9/10, theta = 5/12, candidate (1/4, 1/4, 1/6, 1/6, 1/6).
inline CounterexampleReport uniform_split_counterexample() {
  CounterexampleReport r;
  r.probs.assign(5, Rational(9, 10));
  r.theta = Rational(5, 12);
  r.candidate = {Rational(1, 4), Rational(1, 4), Rational(1, 6), Rational(1, 6), Rational(1, 6)};
  r.candidate_value = exact_probability(r.probs, r.candidate, r.theta);
  r.uniform = uniform_split_baseline(r.probs, r.theta);
  r.candidate_beats_uniform = r.candidate_value > r.uniform.value;
  return r;
}

} // namespace ftalloc
