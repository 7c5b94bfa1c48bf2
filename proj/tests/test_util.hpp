#pragma once

// Shared helpers for the test suites: independent brute-force oracles and
// random instance generators. The oracles here deliberately avoid the
// library's evaluation paths.

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "ftalloc/rational.hpp"
#include <tuple>
#include <functional>

namespace ftalloc::testing {

inline Rational Q(long num, long den = 1) { return make_rational(num, den); }

inline std::vector<Rational> Qs(std::initializer_list<std::pair<long, long>> v) {
  std::vector<Rational> out;
  for (auto [a, b] : v) out.push_back(make_rational(a, b));
  return out;
}

// Pr[w . X >= theta] by enumerating all 2^n outcomes.
inline Rational brute_objective(std::span<const Rational> p, std::span<const Rational> w,
                                const Rational& theta) {
  const std::size_t n = p.size();
  Rational total = 0;
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << n); ++x) {
    Rational s = 0, pr = 1;
    for (std::size_t i = 0; i < n; ++i) {
      if ((x >> i) & 1) {
        s += w[i];
        pr *= p[i];
      } else {
        pr *= 1 - p[i];
      }
    }
    if (s >= theta) total += pr;
  }
  return total;
}

// Multiples of 1/den in [lo, hi] drawn uniformly.
inline Rational random_grid_value(std::mt19937_64& rng, long lo_num, long hi_num, long den) {
  std::uniform_int_distribution<long> d(lo_num, hi_num);
  return make_rational(d(rng), den);
}

// Every non-negative vector on the 1/den grid with sum <= budget, visited in
// lexicographic order.
template <class Fn>
void for_each_grid_vector(std::size_t dim, long den, const Rational& budget, Fn&& fn) {
  std::vector<long> units(dim, 0);
  const long max_units = static_cast<long>(floor_int(budget * den).get_si());
  std::vector<Rational> w(dim);
  auto rec = [&](auto&& self, std::size_t i, long used) -> void {
    if (i == dim) {
      for (std::size_t j = 0; j < dim; ++j) w[j] = make_rational(units[j], den);
      fn(std::span<const Rational>(w));
      return;
    }
    for (long u = 0; used + u <= max_units; ++u) {
      units[i] = u;
      self(self, i + 1, used + u);
    }
  };
  rec(rec, 0, 0);
}

// Every tail of `slots` multiples of kappa with total <= 1, in lexicographic
// order of the multiples.
inline void for_each_granular_tail(std::size_t slots, const Rational& kappa,
                                   const std::function<void(const std::vector<Rational>&)>& fn) {
  const long units = static_cast<long>(floor_int(1 / kappa).get_si());
  std::vector<Rational> w(slots);
  auto rec = [&](auto&& self, std::size_t i, long used) -> void {
    if (i == slots) {
      fn(w);
      return;
    }
    for (long j = 0; used + j <= units; ++j) {
      w[i] = kappa * j;
      self(self, i + 1, used + j);
    }
  };
  rec(rec, 0, 0);
}

// Integer summaries of a granular tail recomputed from their definitions.
struct TailSummary {
  Rational A, B, C, D, E; // mean/(kappa g), var/(kappa g)^2, sum/kappa, sumsq/kappa^2, max/kappa
  auto tie() const { return std::tie(A, B, C, D, E); }
  bool operator<(const TailSummary& o) const { return tie() < o.tie(); }
  bool operator==(const TailSummary& o) const { return tie() == o.tie(); }
};

inline TailSummary summarize_tail(std::span<const Rational> p, std::span<const Rational> w,
                                  const Rational& kappa, const Rational& grid) {
  Rational mean = 0, var = 0, s = 0, sq = 0, mx = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    mean += w[i] * p[i];
    var += w[i] * w[i] * p[i] * (1 - p[i]);
    s += w[i];
    sq += w[i] * w[i];
    if (w[i] > mx) mx = w[i];
  }
  return {mean / (kappa * grid), var / (kappa * kappa * grid * grid), s / kappa, sq / (kappa * kappa),
          mx / kappa};
}

} // namespace ftalloc::testing
