#pragma once

// Halfspace-realizable subsets of {0,1}^k (linear threshold functions).
//
// A point x in {0,1}^k is encoded as the integer with bit i equal to x_i, and
// a subset as the 2^k-bit mask of its members.

#include <algorithm>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ftalloc/errors.hpp"
#include "ftalloc/lp.hpp"
#include "ftalloc/parallel.hpp"
#include "ftalloc/rational.hpp"

namespace ftalloc {

using PointMask = std::uint64_t;

inline constexpr unsigned kMaxFunctionEnumerationDim = 4;
inline constexpr unsigned kMaxHalfspaceDim = 5;

inline bool point_bit(std::uint32_t x, unsigned i) { return (x >> i) & 1u; }

inline PointMask full_mask(unsigned k) {
  return k >= 6 ? ~PointMask{0} : ((PointMask{1} << (1u << k)) - 1);
}

// S = {x : u . x >= c}, with integral u and c.
struct HalfspaceSet {
  unsigned k = 0;
  std::vector<Integer> u;
  Integer c;
  PointMask members = 0;

  bool contains(std::uint32_t x) const { return (members >> x) & 1u; }
  std::size_t size() const { return static_cast<std::size_t>(__builtin_popcountll(members)); }

  // Recomputes the member mask from (u, c).
  PointMask realized() const {
    PointMask m = 0;
    for (std::uint32_t x = 0; x < (1u << k); ++x) {
      Integer s = 0;
      for (unsigned i = 0; i < k; ++i)
        if (point_bit(x, i)) s += u[i];
      if (s >= c) m |= PointMask{1} << x;
    }
    return m;
  }
};

enum class EnumerationPath { functions, weight_grid };

// LP separability test. Non-members get the unit-slack constraint
// u . x <= c - 1, which loses nothing because any strict separator can be
// scaled to integral weights.
inline std::optional<HalfspaceSet> separate(unsigned k, PointMask mask) {
  LinearProgram lp;
  for (unsigned i = 0; i < k; ++i) lp.add_variable("u" + std::to_string(i), false);
  const std::size_t cvar = lp.add_variable("c", false);
  for (std::uint32_t x = 0; x < (1u << k); ++x) {
    std::vector<Rational> row(k + 1);
    for (unsigned i = 0; i < k; ++i) row[i] = point_bit(x, i) ? 1 : 0;
    row[cvar] = -1;
    if ((mask >> x) & 1u)
      lp.add_constraint(std::move(row), Relation::ge, 0);
    else
      lp.add_constraint(std::move(row), Relation::le, -1);
  }
  LpResult res = lp_solve(lp);
  if (res.status != LpStatus::optimal) return std::nullopt;

  Integer lcm = 1;
  for (const auto& v : res.x) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), v.get_den_mpz_t());
  std::vector<Integer> ints;
  for (const auto& v : res.x) ints.push_back(Rational(v * lcm).get_num());
  Integer g = 0;
  for (const auto& v : ints) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
  if (g > 1)
    for (auto& v : ints) v /= g;

  HalfspaceSet hs;
  hs.k = k;
  hs.u.assign(ints.begin(), ints.begin() + k);
  hs.c = ints[k];
  hs.members = mask;
  return hs;
}

namespace detail {

inline std::vector<HalfspaceSet> enumerate_by_functions(unsigned k, unsigned threads);

// Masks of all threshold functions in dimension k - 1, used to discard
// candidates early: both restrictions x_{k-1} = 0 / 1 of a threshold function
// are threshold functions.
inline std::unordered_set<PointMask> lower_dim_masks(unsigned k, unsigned threads) {
  std::unordered_set<PointMask> out;
  if (k == 0) return out;
  if (k == 1) {
    out.insert(0);
    out.insert(1);
    return out;
  }
  for (const auto& hs : enumerate_by_functions(k - 1, threads)) out.insert(hs.members);
  return out;
}

inline std::vector<HalfspaceSet> enumerate_by_functions(unsigned k, unsigned threads) {
  if (k > kMaxFunctionEnumerationDim)
    throw GuardTrip("function enumeration supports k <= " + std::to_string(kMaxFunctionEnumerationDim));
  const auto lower = lower_dim_masks(k, threads);
  const unsigned half_bits = (1u << k) / 2;
  const PointMask half_mask = (PointMask{1} << half_bits) - 1;
  const std::uint64_t n_functions = std::uint64_t{1} << (1u << k);

  std::vector<PointMask> candidates;
  for (std::uint64_t f = 0; f < n_functions; ++f) {
    if (lower.count(f & half_mask) && lower.count((f >> half_bits) & half_mask)) candidates.push_back(f);
  }
  auto found = parallel_map<std::optional<HalfspaceSet>>(
      candidates.size(), threads, [&](std::size_t i) { return separate(k, candidates[i]); });
  std::vector<HalfspaceSet> out;
  for (auto& hs : found)
    if (hs) out.push_back(std::move(*hs));
  return out;
}

inline std::vector<HalfspaceSet> enumerate_by_grid(unsigned k, long bound) {
  const std::uint32_t npts = 1u << k;
  std::unordered_map<PointMask, HalfspaceSet> found;
  std::vector<long> u(k, -bound);
  std::vector<std::pair<long, std::uint32_t>> sums(npts);
  while (true) {
    for (std::uint32_t x = 0; x < npts; ++x) {
      long s = 0;
      for (unsigned i = 0; i < k; ++i)
        if (point_bit(x, i)) s += u[i];
      sums[x] = {s, x};
    }
    std::sort(sums.begin(), sums.end(), std::greater<>());
    // Sweeping the threshold down through the sorted sums adds points in order.
    auto record = [&](PointMask m, long c) {
      if (found.count(m)) return;
      HalfspaceSet hs;
      hs.k = k;
      for (long v : u) hs.u.emplace_back(v);
      hs.c = c;
      hs.members = m;
      found.emplace(m, std::move(hs));
    };
    record(0, sums.front().first + 1);
    PointMask m = 0;
    for (std::uint32_t j = 0; j < npts; ++j) {
      m |= PointMask{1} << sums[j].second;
      if (j + 1 == npts || sums[j + 1].first != sums[j].first) record(m, sums[j].first);
    }

    unsigned i = 0;
    while (i < k && u[i] == bound) u[i++] = -bound;
    if (i == k) break;
    ++u[i];
  }
  std::vector<HalfspaceSet> out;
  out.reserve(found.size());
  for (auto& [mask, hs] : found) out.push_back(std::move(hs));
  return out;
}

} // namespace detail

// Weight bound used by the grid path when none is given.
inline long default_grid_bound(unsigned k) { return k <= 2 ? 2 : static_cast<long>(k) + 1; }

// All halfspace-realizable subsets of {0,1}^k, one per distinct member mask,
// sorted by mask.
inline std::vector<HalfspaceSet> enumerate_halfspace_sets(unsigned k, EnumerationPath path,
                                                          long grid_bound = 0, unsigned threads = 1) {
  if (k == 0) throw InvalidInput("halfspace enumeration needs k >= 1");
  std::vector<HalfspaceSet> out;
  if (path == EnumerationPath::functions) {
    out = detail::enumerate_by_functions(k, threads);
  } else {
    if (k > kMaxHalfspaceDim)
      throw GuardTrip("halfspace enumeration is limited to k <= " + std::to_string(kMaxHalfspaceDim) +
                      " (k = " + std::to_string(k) + "); lower L via --mode practical --l-cap");
    out = detail::enumerate_by_grid(k, grid_bound > 0 ? grid_bound : default_grid_bound(k));
  }
  std::sort(out.begin(), out.end(),
            [](const HalfspaceSet& a, const HalfspaceSet& b) { return a.members < b.members; });
  return out;
}

// Memoized default enumeration: function path for k <= 4, weight grid for
// k = 5, refused beyond.
inline const std::vector<HalfspaceSet>& enumerate_halfspace_sets(unsigned k) {
  if (k > kMaxHalfspaceDim)
    throw GuardTrip("halfspace enumeration is limited to k <= " + std::to_string(kMaxHalfspaceDim) +
                    " (k = " + std::to_string(k) + "); lower L via --mode practical --l-cap");
  static std::mutex mu;
  static std::map<unsigned, std::vector<HalfspaceSet>> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(k);
  if (it == cache.end()) {
    auto path = k <= kMaxFunctionEnumerationDim ? EnumerationPath::functions : EnumerationPath::weight_grid;
    it = cache.emplace(k, enumerate_halfspace_sets(k, path)).first;
  }
  return it->second;
}

// True iff the member set is closed under flipping coordinates from 0 to 1.
inline bool is_up_closed(unsigned k, PointMask members) {
  for (std::uint32_t x = 0; x < (1u << k); ++x) {
    if (!((members >> x) & 1u)) continue;
    for (unsigned i = 0; i < k; ++i)
      if (!((members >> (x | (1u << i))) & 1u)) return false;
  }
  return true;
}

// The up-closed subset of enumerate_halfspace_sets(k). With non-negative
// weights, {x : w.x >= tau} is always one of these.
inline const std::vector<HalfspaceSet>& monotone_halfspace_sets(unsigned k) {
  static std::mutex mu;
  static std::map<unsigned, std::vector<HalfspaceSet>> cache;
  const auto& all = enumerate_halfspace_sets(k);
  std::lock_guard lock(mu);
  auto it = cache.find(k);
  if (it == cache.end()) {
    std::vector<HalfspaceSet> up;
    for (const auto& hs : all)
      if (is_up_closed(k, hs.members)) up.push_back(hs);
    it = cache.emplace(k, std::move(up)).first;
  }
  return it->second;
}

} // namespace ftalloc
