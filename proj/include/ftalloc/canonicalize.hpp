#pragma once

// Constructive tail canonicalization. Given a sorted weight vector w summing
// to one and a split index K, produces v that keeps every x with w.x >= theta
// above theta and either has a zero tail or a tail carrying at least a
// (K+2)^{-(K+2)/2} fraction of the mass.
//
// The construction solves a linear-fractional program in the head weights
// u_1..u_K after the Charnes-Cooper substitution t = 1/(sum u + W_T),
// s_i = t u_i, and reads v off an optimal vertex.

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ftalloc/errors.hpp"
#include "ftalloc/lp.hpp"
#include "ftalloc/rational.hpp"

namespace ftalloc {

enum class CanonicalCase { zero_tail_input, zero_t, positive_t };

inline std::string to_string(CanonicalCase c) {
  switch (c) {
    case CanonicalCase::zero_tail_input: return "zero_tail_input";
    case CanonicalCase::zero_t: return "zero_t";
    case CanonicalCase::positive_t: return "positive_t";
  }
  return "unknown";
}

// Optimal vertex (t*, s*, delta*) of the transformed program.
struct LfpVertexSolution {
  Rational t_star;
  std::vector<Rational> s_star;
  Rational delta_star;
};

struct CanonicalizationResult {
  std::vector<Rational> v;
  CanonicalCase which = CanonicalCase::zero_tail_input;
  std::optional<LfpVertexSolution> vertex;
  Rational tail_mass; // W_T of the input
};

inline constexpr std::size_t kMaxCanonicalizeN = 20;

// Points x in {0,1}^n (bit i = x_i) with w . x >= theta.
inline std::vector<std::uint32_t> satisfying_points(std::span<const Rational> w, const Rational& theta) {
  if (w.size() > kMaxCanonicalizeN)
    throw GuardTrip("materializing S needs n <= " + std::to_string(kMaxCanonicalizeN));
  std::vector<std::uint32_t> out;
  for (std::uint32_t x = 0; x < (1u << w.size()); ++x) {
    Rational s = 0;
    for (std::size_t i = 0; i < w.size(); ++i)
      if ((x >> i) & 1u) s += w[i];
    if (s >= theta) out.push_back(x);
  }
  return out;
}

// K is 1-based: the head is w_1..w_K.
inline CanonicalizationResult canonicalize_tail(std::span<const Rational> w, std::size_t K,
                                                const Rational& theta) {
  const std::size_t n = w.size();
  if (n == 0) throw InvalidInput("empty weight vector");
  if (K < 1 || K > n) throw InvalidInput("K must lie in [1, n]");
  if (theta <= 0 || theta >= 1) throw InvalidInput("theta must lie in (0, 1)");
  Rational total = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (w[i] < 0) throw InvalidInput("weights must be non-negative");
    if (i > 0 && w[i] > w[i - 1]) throw InvalidInput("weights must be sorted descending");
    total += w[i];
  }
  if (total != 1) throw InvalidInput("weights must sum to 1");

  CanonicalizationResult res;
  for (std::size_t i = K; i < n; ++i) res.tail_mass += w[i];
  if (res.tail_mass == 0) {
    res.v.assign(w.begin(), w.end());
    res.which = CanonicalCase::zero_tail_input;
    return res;
  }

  // Variables: t, s_1..s_K, delta.
  LinearProgram lp;
  const std::size_t tv = lp.add_variable("t");
  std::vector<std::size_t> sv(K);
  for (std::size_t i = 0; i < K; ++i) sv[i] = lp.add_variable("s" + std::to_string(i + 1));
  const std::size_t dv = lp.add_variable("delta", false);
  const std::size_t nv = lp.num_variables();

  for (std::uint32_t x : satisfying_points(w, theta)) {
    std::vector<Rational> row(nv);
    for (std::size_t i = 0; i < K; ++i)
      if ((x >> i) & 1u) row[sv[i]] = 1;
    for (std::size_t i = K; i < n; ++i)
      if ((x >> i) & 1u) row[tv] += w[i];
    row[dv] = -1;
    lp.add_constraint(std::move(row), Relation::ge, 0);
  }
  for (std::size_t i = 0; i + 1 < K; ++i) {
    std::vector<Rational> row(nv);
    row[sv[i]] = 1;
    row[sv[i + 1]] = -1;
    lp.add_constraint(std::move(row), Relation::ge, 0);
  }
  {
    std::vector<Rational> row(nv);
    row[sv[K - 1]] = 1;
    row[tv] = -w[K];
    lp.add_constraint(std::move(row), Relation::ge, 0);
  }
  {
    std::vector<Rational> row(nv);
    for (std::size_t i = 0; i < K; ++i) row[sv[i]] = 1;
    row[tv] = res.tail_mass;
    lp.add_constraint(std::move(row), Relation::eq, 1);
  }
  std::vector<Rational> obj(nv);
  obj[dv] = 1;
  lp.set_objective(std::move(obj), Sense::maximize);

  LpResult sol = lp_solve(lp);
  if (sol.status != LpStatus::optimal)
    throw std::logic_error("canonicalization program not optimal: " + to_string(sol.status));

  LfpVertexSolution vert;
  vert.t_star = sol.x[tv];
  for (std::size_t i = 0; i < K; ++i) vert.s_star.push_back(sol.x[sv[i]]);
  vert.delta_star = sol.x[dv];

  res.v.assign(n, Rational(0));
  for (std::size_t i = 0; i < K; ++i) res.v[i] = vert.s_star[i];
  if (vert.t_star == 0) {
    res.which = CanonicalCase::zero_t;
  } else {
    res.which = CanonicalCase::positive_t;
    for (std::size_t i = K; i < n; ++i) res.v[i] = vert.t_star * w[i];
  }
  res.vertex = std::move(vert);
  return res;
}

} // namespace ftalloc
