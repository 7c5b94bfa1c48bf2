#pragma once

// Candidate solutions gathered from the case solvers, and the state-space
// guard shared by the granular-tail dynamic programs.

#include <cmath>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "ftalloc/core_model.hpp"
#include "ftalloc/errors.hpp"
#include "ftalloc/rational.hpp"

namespace ftalloc {

enum class Provenance { trivial, junta, small_ci, large_ci, baseline };

inline std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::trivial: return "trivial";
    case Provenance::junta: return "junta";
    case Provenance::small_ci: return "small_ci";
    case Provenance::large_ci: return "large_ci";
    case Provenance::baseline: return "baseline";
  }
  return "unknown";
}

// Weights are indexed by sorted position of the instance.
struct Candidate {
  WeightVector w;
  Provenance provenance = Provenance::junta;
  std::size_t K = 0;     // split index for small_ci members
  std::size_t index = 0; // triple index within its case

  std::string label() const {
    return provenance == Provenance::small_ci ? "small_ci(K=" + std::to_string(K) + ")"
                                              : to_string(provenance);
  }
};

// Upper bound on the reachable states of a granular-tail DP: at most the
// number of tails (compositions of <= cmax units into `slots` parts), and at
// most the product of the ranges of the tracked integer sums.
inline double tail_state_estimate(std::size_t slots, const Integer& cmax, double range_product) {
  if (slots == 0) return 1;
  Integer tails;
  Integer top = cmax + static_cast<unsigned long>(slots);
  if (top.fits_ulong_p()) {
    mpz_bin_uiui(tails.get_mpz_t(), top.get_ui(), slots);
  } else {
    mpz_bin_ui(tails.get_mpz_t(), top.get_mpz_t(), slots);
  }
  return std::min(tails.get_d(), range_product);
}

inline void check_state_space(double estimate, const SolverConfig& config, const std::string& what,
                              const Rational& kappa) {
  if (estimate <= static_cast<double>(config.state_space_limit)) return;
  std::ostringstream msg;
  msg << what << ": kappa = " << to_double(kappa) << " implies about " << estimate
      << " DP states, above state_space_limit = " << config.state_space_limit
      << "; try --mode practical --kappa 1/8 --l-cap 2, or raise --state-space-limit";
  throw GuardTrip(msg.str());
}

} // namespace ftalloc
