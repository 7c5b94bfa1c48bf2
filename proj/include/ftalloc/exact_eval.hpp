#pragma once

// Exact and Monte-Carlo evaluation of Obj(w) = Pr[w . X >= theta] for
// X ~ prod Bernoulli(p_i), plus the discrete-distribution utilities used by
// the sampled-tail machinery (empirical distributions, Kolmogorov distance).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ftalloc/core_model.hpp"
#include "ftalloc/errors.hpp"
#include "ftalloc/parallel.hpp"
#include "ftalloc/random.hpp"
#include "ftalloc/rational.hpp"

namespace ftalloc {

// Finite-support distribution: strictly increasing support with positive masses.
struct DiscreteDist {
  std::vector<std::pair<Rational, Rational>> atoms;

  Rational total_mass() const {
    Rational s = 0;
    for (const auto& a : atoms) s += a.second;
    return s;
  }
};

// Empirical distribution of m draws, stored as distinct values with
// multiplicities (m can run into the millions while the support stays small).
struct EmpiricalDist {
  std::vector<std::pair<Rational, std::size_t>> atoms; // strictly increasing values, counts >= 1

  std::size_t m() const {
    std::size_t total = 0;
    for (const auto& a : atoms) total += a.second;
    return total;
  }

  // The sorted multiset t_1 <= ... <= t_m.
  std::vector<Rational> points() const {
    std::vector<Rational> out;
    for (const auto& [v, c] : atoms) out.insert(out.end(), c, v);
    return out;
  }

  DiscreteDist to_dist() const {
    DiscreteDist d;
    const Rational each(1, static_cast<unsigned long>(m()));
    for (const auto& [v, c] : atoms) d.atoms.emplace_back(v, each * Rational(static_cast<long>(c)));
    return d;
  }
};

enum class EstimateKind { exact, monte_carlo };

inline std::string to_string(EstimateKind k) { return k == EstimateKind::exact ? "exact" : "monte_carlo"; }

struct ObjectiveEstimate {
  double value = 0;
  EstimateKind kind = EstimateKind::exact;
  std::size_t m = 0;
  std::uint64_t seed = 0;
  std::optional<Rational> exact; // set when kind == exact
};

inline constexpr std::size_t kMaxDistinctForGrouping = 12;

namespace detail {

inline std::size_t distinct_nonzero(std::span<const Rational> w) {
  std::set<Rational> seen;
  for (const auto& x : w)
    if (x != 0) seen.insert(x);
  return seen.size();
}

inline void check_exact_limits(std::span<const Rational> w, std::size_t max_n) {
  if (w.size() <= max_n) return;
  if (distinct_nonzero(w) <= kMaxDistinctForGrouping) return;
  throw GuardTrip("exact evaluation needs n <= " + std::to_string(max_n) + " or at most " +
                  std::to_string(kMaxDistinctForGrouping) + " distinct weights (n = " +
                  std::to_string(w.size()) + ")");
}

} // namespace detail

// Law of w . X as a map from partial sum to probability. Coordinates with the
// same weight collapse onto the same sums, so few-distinct-value vectors stay
// polynomial. If `cap` is given, mass at sums >= *cap is pooled into
// `*absorbed` (weights are non-negative, so such sums never drop back).
inline std::map<Rational, Rational> sum_law(std::span<const Rational> probs,
                                            std::span<const Rational> w,
                                            const Rational* cap = nullptr,
                                            Rational* absorbed = nullptr) {
  if (probs.size() != w.size()) throw InvalidInput("weights and probabilities differ in length");
  std::map<Rational, Rational> law{{Rational(0), Rational(1)}};
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] == 0) continue;
    if (w[i] < 0) throw InvalidInput("weights must be non-negative");
    const Rational& p = probs[i];
    const Rational q = 1 - p;
    std::map<Rational, Rational> next;
    for (const auto& [s, mass] : law) {
      next[s] += mass * q;
      Rational up = s + w[i];
      if (cap && up >= *cap)
        *absorbed += mass * p;
      else
        next[up] += mass * p;
    }
    std::erase_if(next, [](const auto& kv) { return kv.second == 0; });
    law.swap(next);
  }
  return law;
}

inline Rational exact_probability(std::span<const Rational> probs, std::span<const Rational> w,
                                  const Rational& theta, std::size_t max_n = 22) {
  detail::check_exact_limits(w, max_n);
  if (theta <= 0) return Rational(1);
  Rational success = 0;
  (void)sum_law(probs, w, &theta, &success);
  return success;
}

inline ObjectiveEstimate exact_objective(const ProblemInstance& instance, std::span<const Rational> w,
                                         std::size_t max_n = 22) {
  if (w.size() != instance.n()) throw InvalidInput("weight vector length differs from n");
  Rational v = exact_probability(instance.probs(), w, instance.theta(), max_n);
  return ObjectiveEstimate{to_double(v), EstimateKind::exact, 0, 0, v};
}

// Exact law of tail . X^(T) as a discrete distribution.
inline DiscreteDist tail_distribution(std::span<const Rational> probs, std::span<const Rational> w,
                                      std::size_t max_n = 22) {
  detail::check_exact_limits(w, max_n);
  DiscreteDist d;
  for (auto& [v, m] : sum_law(probs, w)) d.atoms.emplace_back(v, m);
  return d;
}

// m joint outcomes of X, generated block-wise so the set is independent of
// the number of workers.
class SampleSet {
public:
  SampleSet(std::span<const double> probs, std::size_t m, std::uint64_t seed, unsigned threads = 1)
      : n_(probs.size()), m_(m), seed_(seed), bits_(m * probs.size()) {
    const std::size_t blocks = (m + kSampleBlock - 1) / kSampleBlock;
    parallel_for(blocks, threads, [&](std::size_t block) {
      BernoulliSampler rng(derive_seed(seed, block));
      const std::size_t end = std::min(m, (block + 1) * kSampleBlock);
      for (std::size_t s = block * kSampleBlock; s < end; ++s)
        rng.draw(probs, std::span<std::uint8_t>(bits_.data() + s * n_, n_));
    });
  }

  std::size_t m() const { return m_; }
  std::size_t n() const { return n_; }
  std::uint64_t seed() const { return seed_; }
  std::span<const std::uint8_t> row(std::size_t s) const { return {bits_.data() + s * n_, n_}; }

  // Number of samples with w . x >= theta. Doubles are used away from the
  // boundary; near it the comparison is redone exactly.
  std::size_t count_successes(std::span<const Rational> w, const Rational& theta) const {
    if (w.size() != n_) throw InvalidInput("weight vector length differs from sample width");
    const std::vector<double> wd = to_doubles(w);
    const double td = to_double(theta);
    std::size_t hits = 0;
    for (std::size_t s = 0; s < m_; ++s) {
      auto x = row(s);
      double acc = 0;
      for (std::size_t i = 0; i < n_; ++i)
        if (x[i]) acc += wd[i];
      if (std::abs(acc - td) > 1e-9) {
        hits += acc > td ? 1 : 0;
        continue;
      }
      Rational exact = 0;
      for (std::size_t i = 0; i < n_; ++i)
        if (x[i]) exact += w[i];
      hits += exact >= theta ? 1 : 0;
    }
    return hits;
  }

private:
  std::size_t n_, m_;
  std::uint64_t seed_;
  std::vector<std::uint8_t> bits_;
};

inline ObjectiveEstimate mc_estimate(std::span<const Rational> probs, std::span<const Rational> w,
                                     const Rational& theta, std::size_t m, std::uint64_t seed,
                                     unsigned threads = 1) {
  if (m == 0) throw InvalidInput("Monte-Carlo sample count must be positive");
  SampleSet samples(to_doubles(probs), m, seed, threads);
  const std::size_t hits = samples.count_successes(w, theta);
  return ObjectiveEstimate{static_cast<double>(hits) / static_cast<double>(m),
                           EstimateKind::monte_carlo, m, seed, std::nullopt};
}

inline ObjectiveEstimate mc_estimate(const ProblemInstance& instance, std::span<const Rational> w,
                                     std::size_t m, std::uint64_t seed, unsigned threads = 1) {
  return mc_estimate(instance.probs(), w, instance.theta(), m, seed, threads);
}

// m draws of tail . X^(T). Outcomes are tallied by bit pattern first and
// summed exactly once per distinct pattern.
inline EmpiricalDist sample_tail_empirical(std::span<const Rational> tail_probs,
                                           std::span<const Rational> tail_weights, std::size_t m,
                                           std::uint64_t seed) {
  if (m == 0) throw InvalidInput("empirical distribution needs m >= 1");
  if (tail_probs.size() != tail_weights.size())
    throw InvalidInput("tail weights and probabilities differ in length");
  for (const auto& x : tail_weights)
    if (x < 0) throw InvalidInput("tail weights must be non-negative");

  // Zero-weight coordinates never move the sum; dropping them keeps patterns short.
  std::vector<double> probs;
  std::vector<Rational> weights;
  for (std::size_t i = 0; i < tail_weights.size(); ++i)
    if (tail_weights[i] != 0) {
      probs.push_back(to_double(tail_probs[i]));
      weights.push_back(tail_weights[i]);
    }

  std::map<Rational, std::size_t> tally;
  if (weights.empty()) {
    tally[Rational(0)] = m;
  } else {
    // Patterns are packed 64 coordinates per word.
    const std::size_t words = (probs.size() + 63) / 64;
    std::map<std::vector<std::uint64_t>, std::size_t> patterns;
    std::unordered_map<std::uint64_t, std::size_t> short_patterns;
    const std::size_t blocks = (m + kSampleBlock - 1) / kSampleBlock;
    std::vector<std::uint64_t> key(words);
    for (std::size_t block = 0; block < blocks; ++block) {
      BernoulliSampler rng(derive_seed(seed, block));
      const std::size_t end = std::min(m, (block + 1) * kSampleBlock);
      for (std::size_t s = block * kSampleBlock; s < end; ++s) {
        std::fill(key.begin(), key.end(), 0);
        for (std::size_t i = 0; i < probs.size(); ++i)
          if (rng.bernoulli(probs[i])) key[i / 64] |= std::uint64_t{1} << (i % 64);
        if (words == 1)
          ++short_patterns[key[0]];
        else
          ++patterns[key];
      }
    }
    for (const auto& [bits, count] : short_patterns) patterns[{bits}] += count;
    for (const auto& [bits, count] : patterns) {
      Rational t = 0;
      for (std::size_t i = 0; i < probs.size(); ++i)
        if ((bits[i / 64] >> (i % 64)) & 1u) t += weights[i];
      tally[t] += count;
    }
  }
  EmpiricalDist out;
  for (auto& [v, c] : tally) out.atoms.emplace_back(v, c);
  return out;
}

// sup_t |F1(t) - F2(t)|. Both CDFs are right-continuous step functions, so the
// supremum is attained at a jump point of one of them.
inline Rational kolmogorov_distance(const DiscreteDist& a, const DiscreteDist& b) {
  Rational fa = 0, fb = 0, best = 0;
  std::size_t i = 0, j = 0;
  while (i < a.atoms.size() || j < b.atoms.size()) {
    const Rational* t;
    if (j == b.atoms.size() || (i < a.atoms.size() && a.atoms[i].first <= b.atoms[j].first))
      t = &a.atoms[i].first;
    else
      t = &b.atoms[j].first;
    const Rational at = *t;
    while (i < a.atoms.size() && a.atoms[i].first == at) fa += a.atoms[i++].second;
    while (j < b.atoms.size() && b.atoms[j].first == at) fb += b.atoms[j++].second;
    Rational gap = abs(fa - fb);
    if (gap > best) best = gap;
  }
  return best;
}

inline Rational kolmogorov_distance(const EmpiricalDist& a, const DiscreteDist& b) {
  return kolmogorov_distance(a.to_dist(), b);
}

inline Rational kolmogorov_distance(const EmpiricalDist& a, const EmpiricalDist& b) {
  return kolmogorov_distance(a.to_dist(), b.to_dist());
}

} // namespace ftalloc
