#pragma once

// Large critical index: the tail is replaced by a kappa-granular vector
// summarized by integers (A, B, C) with
//   sum w_i^2 = A kappa^2,  sum w_i p_i = B kappa g,  sum w_i = C kappa,
// g = eps/(4n). For each achievable triple the head is optimized exactly
// against a threshold shifted by the tail's mean and a concentration margin.

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "ftalloc/candidate.hpp"
#include "ftalloc/core_model.hpp"
#include "ftalloc/errors.hpp"
#include "ftalloc/junta.hpp"
#include "ftalloc/parallel.hpp"
#include "ftalloc/rational.hpp"

namespace ftalloc {

struct TailTriple {
  std::int64_t A = 0, B = 0, C = 0;
  Rational kappa;
  std::vector<Rational> witness; // w_{L+1}..w_n

  friend bool operator==(const TailTriple&, const TailTriple&) = default;
};

// 1/(n^2 (ceil((L+2)^{(L+2)/2}) + 1)), or the practical-mode override.
inline Rational case2_kappa(const ProblemInstance& instance, std::size_t L, const SolverConfig& config) {
  if (config.mode == Mode::practical && config.kappa_override) return *config.kappa_override;
  const Integer n = static_cast<unsigned long>(instance.n());
  Integer den = n * n * (ceil_self_half_power(L + 2) + 1);
  return Rational(Integer(1), den);
}

inline Integer kappa_units(const Rational& kappa) {
  if (kappa <= 0 || kappa > 1) throw InvalidInput("kappa must lie in (0, 1]");
  return floor_int(1 / kappa);
}

namespace detail {

struct Key3 {
  std::int64_t a, b, c;
  bool operator==(const Key3&) const = default;
};

struct Key3Hash {
  std::size_t operator()(const Key3& k) const {
    std::uint64_t h = splitmix64(static_cast<std::uint64_t>(k.a));
    h = splitmix64(h ^ static_cast<std::uint64_t>(k.b));
    return splitmix64(h ^ static_cast<std::uint64_t>(k.c));
  }
};

} // namespace detail

// All (A, B, C) reachable by a kappa-granular tail over sorted positions
// L+1..n with total weight <= 1, each with the first witness found (slots in
// order, multiples ascending).
inline std::vector<TailTriple> construct_achievable_tails(const ProblemInstance& instance, std::size_t L,
                                                          const Rational& kappa, const SolverConfig& config) {
  const std::size_t n = instance.n();
  if (L > n) throw InvalidInput("L exceeds n");
  const Integer cmax_big = kappa_units(kappa);
  const std::size_t slots = n - L;

  Integer amax = cmax_big * cmax_big, bmax = 0;
  for (std::size_t i = L; i < n; ++i) bmax = std::max(bmax, instance.prob_units(i));
  bmax *= cmax_big;
  check_state_space(tail_state_estimate(slots, cmax_big,
                                        (amax.get_d() + 1) * (bmax.get_d() + 1) * (cmax_big.get_d() + 1)),
                    config, "large-critical-index tail DP", kappa);
  const std::int64_t cmax = cmax_big.get_si();

  struct Node {
    detail::Key3 key;
    std::int32_t parent;
    std::int64_t j;
  };
  std::vector<std::vector<Node>> layers(1);
  layers[0].push_back({{0, 0, 0}, -1, 0});
  for (std::size_t t = L; t < n; ++t) {
    const std::int64_t a_t = instance.prob_units(t).get_si();
    std::vector<Node> next;
    std::unordered_map<detail::Key3, std::size_t, detail::Key3Hash> seen;
    const auto& prev = layers.back();
    for (std::size_t s = 0; s < prev.size(); ++s) {
      const auto& k = prev[s].key;
      for (std::int64_t j = 0; k.c + j <= cmax; ++j) {
        detail::Key3 nk{k.a + j * j, k.b + j * a_t, k.c + j};
        if (seen.emplace(nk, next.size()).second) {
          next.push_back({nk, static_cast<std::int32_t>(s), j});
          if (next.size() > config.state_space_limit)
            throw GuardTrip("large-critical-index tail DP exceeded state_space_limit");
        }
      }
    }
    layers.push_back(std::move(next));
  }

  std::vector<TailTriple> out;
  const auto& last = layers.back();
  out.reserve(last.size());
  for (std::size_t s = 0; s < last.size(); ++s) {
    TailTriple tt{last[s].key.a, last[s].key.b, last[s].key.c, kappa, std::vector<Rational>(slots)};
    std::size_t idx = s;
    for (std::size_t layer = slots; layer > 0; --layer) {
      const Node& node = layers[layer][idx];
      tt.witness[layer - 1] = kappa * Rational(static_cast<long>(node.j));
      idx = static_cast<std::size_t>(node.parent);
    }
    out.push_back(std::move(tt));
  }
  return out;
}

// theta - B kappa g + kappa sqrt(ln(200/eps) A), rounded up.
inline Rational large_ci_threshold(const ProblemInstance& instance, const TailTriple& tt,
                                   const Rational& theta) {
  const Rational& k = tt.kappa;
  return theta - Rational(static_cast<long>(tt.B)) * k * instance.grid() +
         k * sqrt_log_product_upper(Rational(200) / instance.epsilon(), Rational(static_cast<long>(tt.A)));
}

inline std::vector<Candidate> find_near_opt_large_ci(const ProblemInstance& instance, std::size_t L,
                                                     const SolverConfig& config) {
  if (L >= instance.n()) throw InvalidInput("large-critical-index case needs L < n");
  const Rational kappa = case2_kappa(instance, L, config);
  const auto triples = construct_achievable_tails(instance, L, kappa, config);
  const std::vector<Rational> head_probs(instance.probs().begin(), instance.probs().begin() + L);

  return parallel_map<Candidate>(triples.size(), config.threads, [&](std::size_t i) {
    const TailTriple& tt = triples[i];
    JuntaRequest req{head_probs, large_ci_threshold(instance, tt, instance.theta()),
                     1 - Rational(static_cast<long>(tt.C)) * kappa};
    JuntaResult head = find_optimal_junta(req);
    Candidate c;
    c.w.values = head.weights;
    c.w.values.insert(c.w.values.end(), tt.witness.begin(), tt.witness.end());
    c.w.split_index = L + 1;
    c.provenance = Provenance::large_ci;
    c.index = i;
    return c;
  });
}

} // namespace ftalloc
