#pragma once

// Problem representation, input normalization, derived parameters, and the
// regularity / critical-index computations on weight vectors.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "ftalloc/errors.hpp"
#include "ftalloc/rational.hpp"

namespace ftalloc {

enum class Mode { theory, practical };

inline std::string to_string(Mode m) { return m == Mode::theory ? "theory" : "practical"; }

// Tunables for the solver. The c_L and mc_constant fields stand in for the
// unspecified constants in the cutoff L and the Monte-Carlo sample sizes.
struct SolverConfig {
  Mode mode = Mode::theory;
  Rational c_L = 1;
  std::optional<Rational> kappa_override;
  std::optional<std::size_t> L_cap;
  Rational mc_constant = 1;
  std::uint64_t seed = 0;
  std::size_t exact_eval_max_n = 22;
  std::uint64_t state_space_limit = 5'000'000;
  unsigned threads = 1;

  void validate() const {
    if (c_L <= 0) throw InvalidInput("c_L must be positive");
    if (mc_constant <= 0) throw InvalidInput("mc_constant must be positive");
    if (exact_eval_max_n == 0) throw InvalidInput("exact_eval_max_n must be positive");
    if (state_space_limit == 0) throw InvalidInput("state_space_limit must be positive");
    if (threads == 0) throw InvalidInput("threads must be positive");
    if (kappa_override && (*kappa_override <= 0 || *kappa_override > 1))
      throw InvalidInput("kappa override must lie in (0, 1]");
    if (L_cap && *L_cap == 0) throw InvalidInput("L cap must be positive");
    if (mode == Mode::theory && (kappa_override || L_cap))
      throw InvalidInput("theory mode does not accept --kappa or --l-cap; use --mode practical");
  }
};

// A weight vector, optionally tagged with the index (1-based) of the first
// tail coordinate.
struct WeightVector {
  std::vector<Rational> values;
  std::optional<std::size_t> split_index;

  std::size_t size() const { return values.size(); }
  Rational l1() const { return sum(values); }

  bool feasible() const {
    Rational s = 0;
    for (const auto& x : values) {
      if (x < 0) return false;
      s += x;
    }
    return s <= 1;
  }

  bool canonical() const {
    return std::is_sorted(values.begin(), values.end(),
                          [](const Rational& a, const Rational& b) { return a > b; });
  }

  friend bool operator==(const WeightVector&, const WeightVector&) = default;
};

inline bool is_feasible(std::span<const Rational> w) {
  Rational s = 0;
  for (const auto& x : w) {
    if (x < 0) return false;
    s += x;
  }
  return s <= 1;
}

// A normalized instance: probabilities sorted descending and rounded onto the
// eps/(4n) grid, with p_1 < 1 - eps and 0 < theta < 1.
class ProblemInstance {
public:
  // Validates the normalized-form invariants. `order[i]` is the caller's index
  // of sorted position i; identity if empty.
  ProblemInstance(std::vector<Rational> probs, Rational theta, Rational epsilon, Rational delta,
                  std::vector<std::size_t> order = {})
      : probs_(std::move(probs)), theta_(std::move(theta)), epsilon_(std::move(epsilon)),
        delta_(std::move(delta)), order_(std::move(order)) {
    if (probs_.empty()) throw InvalidInput("instance needs at least one probability");
    if (epsilon_ <= 0 || epsilon_ >= 1) throw InvalidInput("epsilon must lie in (0, 1)");
    if (delta_ <= 0 || delta_ >= 1) throw InvalidInput("delta must lie in (0, 1)");
    if (theta_ <= 0 || theta_ >= 1) throw InvalidInput("theta must lie in (0, 1) after preprocessing");
    if (order_.empty()) {
      order_.resize(probs_.size());
      std::iota(order_.begin(), order_.end(), std::size_t{0});
    }
    if (order_.size() != probs_.size()) throw InvalidInput("permutation size mismatch");
    grid_ = epsilon_ / Rational(4 * static_cast<long>(probs_.size()));
    for (std::size_t i = 0; i < probs_.size(); ++i) {
      const Rational& p = probs_[i];
      if (i > 0 && p > probs_[i - 1]) throw InvalidInput("probabilities must be sorted descending");
      Rational units = p / grid_;
      if (p <= 0 || units.get_den() != 1)
        throw InvalidInput("probability " + to_string(p) + " is not a positive multiple of eps/(4n)");
    }
    if (probs_.front() >= 1 - epsilon_) throw InvalidInput("p_1 must be below 1 - epsilon");
    gamma_ = std::min<Rational>(probs_.back(), 1 - probs_.front());
  }

  std::size_t n() const { return probs_.size(); }
  const std::vector<Rational>& probs() const { return probs_; }
  const Rational& theta() const { return theta_; }
  const Rational& epsilon() const { return epsilon_; }
  const Rational& delta() const { return delta_; }
  // eps / (4n)
  const Rational& grid() const { return grid_; }
  const Rational& gamma() const { return gamma_; }
  const std::vector<std::size_t>& order() const { return order_; }

  // p_i / grid as an integer.
  Integer prob_units(std::size_t i) const { return Rational(probs_[i] / grid_).get_num(); }

  std::vector<double> probs_double() const { return to_doubles(probs_); }

  // Maps weights indexed by sorted position back to the caller's order.
  std::vector<Rational> to_original_order(std::span<const Rational> sorted_w) const {
    std::vector<Rational> out(sorted_w.size());
    for (std::size_t i = 0; i < sorted_w.size(); ++i) out[order_[i]] = sorted_w[i];
    return out;
  }

  ProblemInstance with_theta(Rational theta) const {
    return ProblemInstance(probs_, std::move(theta), epsilon_, delta_, order_);
  }

private:
  std::vector<Rational> probs_;
  Rational theta_, epsilon_, delta_, grid_, gamma_;
  std::vector<std::size_t> order_;
};

enum class TrivialReason { theta_zero, theta_one, reliable_node };

inline std::string to_string(TrivialReason r) {
  switch (r) {
    case TrivialReason::theta_zero: return "theta_zero";
    case TrivialReason::theta_one: return "theta_one";
    case TrivialReason::reliable_node: return "reliable_node";
  }
  return "unknown";
}

// A solution that needs no search. `objective` is the exact value of
// `weights` under the raw probabilities.
struct TrivialSolution {
  std::vector<Rational> weights; // caller's index order
  Rational objective;
  TrivialReason reason;
  bool epsilon_optimal;
};

using PreprocessResult = std::variant<ProblemInstance, TrivialSolution>;

// Rounds down onto the grid; values that would become 0 are clamped to one
// grid unit.
inline Rational round_to_grid(const Rational& p, const Rational& grid) {
  Rational rounded = Rational(floor_int(p / grid)) * grid;
  return rounded == 0 ? grid : rounded;
}

inline PreprocessResult preprocess(std::span<const Rational> p_raw, const Rational& theta,
                                   const Rational& epsilon, const Rational& delta) {
  if (p_raw.empty()) throw InvalidInput("empty probability vector");
  if (theta < 0 || theta > 1) throw InvalidInput("theta must lie in [0, 1]");
  if (epsilon <= 0 || epsilon >= 1) throw InvalidInput("epsilon must lie in (0, 1)");
  if (delta <= 0 || delta >= 1) throw InvalidInput("delta must lie in (0, 1)");
  for (const auto& p : p_raw)
    if (p < 0 || p > 1) throw InvalidInput("probabilities must lie in [0, 1]");

  const std::size_t n = p_raw.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return p_raw[a] > p_raw[b]; });
  const std::size_t best = order.front();

  auto unit_on_best = [&] {
    std::vector<Rational> w(n, Rational(0));
    w[best] = 1;
    return w;
  };

  if (theta == 0) return TrivialSolution{unit_on_best(), Rational(1), TrivialReason::theta_zero, true};
  if (theta == 1)
    return TrivialSolution{unit_on_best(), p_raw[best], TrivialReason::theta_one, true};
  if (p_raw[best] >= 1 - epsilon)
    return TrivialSolution{unit_on_best(), p_raw[best], TrivialReason::reliable_node, true};

  const Rational grid = epsilon / Rational(4 * static_cast<long>(n));
  std::vector<Rational> probs;
  probs.reserve(n);
  for (std::size_t idx : order) probs.push_back(round_to_grid(p_raw[idx], grid));
  return ProblemInstance(std::move(probs), theta, epsilon, delta, std::move(order));
}

inline Rational compute_gamma(const ProblemInstance& instance) { return instance.gamma(); }

// Unclamped c_L / (eps^2 gamma^2) * (1/gamma) * ln(1/(eps gamma)) * ln(1/eps),
// natural logarithms.
inline double l_formula_value(const Rational& epsilon, const Rational& gamma, const Rational& c_L) {
  const double eps = to_double(epsilon);
  const double g = to_double(gamma);
  return to_double(c_L) / (eps * eps * g * g) * (1.0 / g) * std::log(1.0 / (eps * g)) *
         std::log(1.0 / eps);
}

inline double l_formula_value(const ProblemInstance& instance, const SolverConfig& config) {
  return l_formula_value(instance.epsilon(), instance.gamma(), config.c_L);
}

inline std::size_t l_cutoff(std::size_t n, const Rational& epsilon, const Rational& gamma,
                            const SolverConfig& config) {
  const double raw = l_formula_value(epsilon, gamma, config.c_L);
  std::size_t L = n;
  if (std::isfinite(raw) && raw < static_cast<double>(n))
    L = static_cast<std::size_t>(std::max(1.0, std::ceil(raw)));
  if (config.mode == Mode::practical && config.L_cap) L = std::min(L, *config.L_cap);
  return L;
}

inline std::size_t compute_L(const ProblemInstance& instance, const SolverConfig& config) {
  return l_cutoff(instance.n(), instance.epsilon(), instance.gamma(), config);
}

struct RegularityReport {
  Rational tau;
  // sigma_sq[k] = sum_{i >= k} w_i^2 (0-based over the stripped vector).
  std::vector<Rational> sigma_sq;
  // 1-based index into the stripped vector; nullopt stands for infinity.
  std::optional<std::size_t> critical_index;
  std::size_t stripped_zeros = 0;

  double sigma(std::size_t k) const { return std::sqrt(to_double(sigma_sq.at(k))); }
};

inline RegularityReport critical_index(std::span<const Rational> w, const Rational& tau) {
  if (tau <= 0) throw InvalidInput("tau must be positive");
  std::size_t len = w.size();
  while (len > 0 && w[len - 1] == 0) --len;
  if (len == 0) throw InvalidInput("critical index of the zero vector is undefined");
  for (std::size_t i = 1; i < len; ++i)
    if (abs(w[i]) > abs(w[i - 1]))
      throw InvalidInput("critical index needs weights sorted by decreasing magnitude");

  RegularityReport rep;
  rep.tau = tau;
  rep.stripped_zeros = w.size() - len;
  rep.sigma_sq.assign(len, Rational(0));
  Rational acc = 0;
  for (std::size_t k = len; k-- > 0;) {
    acc += w[k] * w[k];
    rep.sigma_sq[k] = acc;
  }
  const Rational tau_sq = tau * tau;
  for (std::size_t i = 0; i < len; ++i) {
    if (w[i] * w[i] <= tau_sq * rep.sigma_sq[i]) {
      rep.critical_index = i + 1;
      break;
    }
  }
  return rep;
}

inline bool is_regular(std::span<const Rational> w, const Rational& tau) {
  Rational max_sq = 0, norm_sq = 0;
  for (const auto& x : w) {
    Rational sq = x * x;
    norm_sq += sq;
    if (sq > max_sq) max_sq = sq;
  }
  if (norm_sq == 0) throw InvalidInput("regularity of the zero vector is undefined");
  return tau >= 0 && max_sq <= tau * tau * norm_sq;
}

} // namespace ftalloc
