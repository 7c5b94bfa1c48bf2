#pragma once

// End-to-end driver: gather candidates from the junta, small- and
// large-critical-index cases, then pick the best by a shared Monte-Carlo
// sample.

#include <chrono>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ftalloc/candidate.hpp"
#include "ftalloc/core_model.hpp"
#include "ftalloc/errors.hpp"
#include "ftalloc/exact_eval.hpp"
#include "ftalloc/junta.hpp"
#include "ftalloc/large_ci.hpp"
#include "ftalloc/random.hpp"
#include "ftalloc/small_ci.hpp"

namespace ftalloc {

struct PoolEntry {
  std::string label;
  std::vector<Rational> weights; // sorted-probability order
  std::size_t hits = 0;
};

struct SolveReport {
  // echo of the input
  std::size_t n = 0;
  Rational theta, epsilon, delta;
  SolverConfig config;

  bool trivial = false;
  std::optional<TrivialReason> trivial_reason;

  std::vector<Rational> chosen;        // caller's index order
  std::vector<Rational> chosen_sorted; // sorted-probability order
  std::string provenance;
  ObjectiveEstimate estimate;
  std::optional<Rational> exact;       // under the rounded probabilities
  std::optional<Rational> exact_input; // under the caller's probabilities

  std::size_t L = 0;
  double L_formula = 0;
  Rational gamma;
  std::optional<Rational> kappa_large, kappa_small;
  std::size_t pool_size = 0;
  std::size_t count_junta = 0, count_large_ci = 0;
  std::map<std::size_t, std::size_t> count_small_ci; // by K
  std::size_t mc_samples = 0;
  std::vector<PoolEntry> pool; // assembly order

  std::vector<std::pair<std::string, double>> timings_ms;
};

inline std::size_t selection_sample_count(std::size_t pool_size, const Rational& epsilon,
                                          const Rational& delta, const Rational& mc_constant) {
  const double e = to_double(epsilon);
  const double m = std::ceil(to_double(mc_constant) / (e * e) *
                             std::log(static_cast<double>(pool_size) / to_double(delta)));
  return std::max<std::size_t>(1, static_cast<std::size_t>(m));
}

inline std::optional<Rational> try_exact(std::span<const Rational> probs, std::span<const Rational> w,
                                         const Rational& theta, std::size_t max_n) {
  try {
    return exact_probability(probs, w, theta, max_n);
  } catch (const GuardTrip&) {
    return std::nullopt;
  }
}

// Stream used for the selection sample, kept apart from the per-head streams.
inline constexpr std::uint64_t kSelectionStream = 0x5e1ec7;

inline SolveReport solve(const ProblemInstance& instance, const SolverConfig& config) {
  config.validate();
  using clock = std::chrono::steady_clock;
  SolveReport rep;
  rep.n = instance.n();
  rep.theta = instance.theta();
  rep.epsilon = instance.epsilon();
  rep.delta = instance.delta();
  rep.config = config;
  rep.gamma = instance.gamma();
  rep.L_formula = l_formula_value(instance, config);
  rep.L = compute_L(instance, config);
  const std::size_t L = rep.L, n = instance.n();

  auto tick = clock::now();
  auto lap = [&](const std::string& name) {
    auto now = clock::now();
    rep.timings_ms.emplace_back(name, std::chrono::duration<double, std::milli>(now - tick).count());
    tick = now;
  };

  std::vector<Candidate> pool;
  {
    std::vector<Rational> head(instance.probs().begin(), instance.probs().begin() + L);
    auto j = find_optimal_junta({head, instance.theta(), Rational(1)}, config.threads);
    Candidate c;
    c.w.values = j.weights;
    c.w.values.resize(n, Rational(0));
    c.w.split_index = L + 1;
    c.provenance = Provenance::junta;
    pool.push_back(std::move(c));
    rep.count_junta = 1;
  }
  lap("junta");

  rep.kappa_small = case3_kappa(instance, L, config);
  const Rational delta_k = instance.delta() / Rational(2 * static_cast<long>(std::max<std::size_t>(L, 1)));
  for (std::size_t K = 1; K <= L; ++K) {
    auto part = find_near_opt_small_ci(instance, K, L, delta_k, config);
    rep.count_small_ci[K] = part.size();
    for (auto& c : part) pool.push_back(std::move(c));
  }
  lap("small_ci");

  if (L < n) {
    rep.kappa_large = case2_kappa(instance, L, config);
    auto part = find_near_opt_large_ci(instance, L, config);
    rep.count_large_ci = part.size();
    for (auto& c : part) pool.push_back(std::move(c));
  }
  lap("large_ci");

  rep.pool_size = pool.size();
  rep.mc_samples = selection_sample_count(pool.size(), instance.epsilon(), instance.delta(), config.mc_constant);
  const std::uint64_t mc_seed = derive_seed(config.seed, kSelectionStream);
  SampleSet samples(instance.probs_double(), rep.mc_samples, mc_seed, config.threads);
  auto hits = parallel_map<std::size_t>(pool.size(), config.threads, [&](std::size_t i) {
    return samples.count_successes(pool[i].w.values, instance.theta());
  });

  std::size_t best = 0;
  for (std::size_t i = 1; i < pool.size(); ++i) {
    if (hits[i] != hits[best]) {
      if (hits[i] > hits[best]) best = i;
      continue;
    }
    if (pool[i].provenance != pool[best].provenance) {
      if (pool[i].provenance < pool[best].provenance) best = i;
      continue;
    }
    if (pool[i].w.values < pool[best].w.values) best = i;
  }
  lap("selection");

  for (std::size_t i = 0; i < pool.size(); ++i) rep.pool.push_back({pool[i].label(), pool[i].w.values, hits[i]});
  const Candidate& chosen = pool[best];
  rep.chosen_sorted = chosen.w.values;
  rep.chosen = instance.to_original_order(chosen.w.values);
  rep.provenance = chosen.label();
  rep.estimate = ObjectiveEstimate{static_cast<double>(hits[best]) / static_cast<double>(rep.mc_samples),
                                   EstimateKind::monte_carlo, rep.mc_samples, mc_seed, std::nullopt};
  rep.exact = try_exact(instance.probs(), chosen.w.values, instance.theta(), config.exact_eval_max_n);
  lap("exact_eval");
  return rep;
}

// Preprocesses raw input, then solves; trivial cases skip the search.
inline SolveReport solve(std::span<const Rational> p_raw, const Rational& theta, const Rational& epsilon,
                         const Rational& delta, const SolverConfig& config) {
  config.validate();
  auto pre = preprocess(p_raw, theta, epsilon, delta);
  if (auto* t = std::get_if<TrivialSolution>(&pre)) {
    SolveReport rep;
    rep.n = p_raw.size();
    rep.theta = theta;
    rep.epsilon = epsilon;
    rep.delta = delta;
    rep.config = config;
    rep.trivial = true;
    rep.trivial_reason = t->reason;
    rep.chosen = t->weights;
    rep.provenance = to_string(Provenance::trivial);
    rep.estimate = ObjectiveEstimate{to_double(t->objective), EstimateKind::exact, 0, 0, t->objective};
    rep.exact_input = t->objective;
    rep.pool_size = 1;
    return rep;
  }
  const auto& instance = std::get<ProblemInstance>(pre);
  SolveReport rep = solve(instance, config);
  rep.exact_input = try_exact(p_raw, rep.chosen, theta, config.exact_eval_max_n);
  return rep;
}

} // namespace ftalloc
