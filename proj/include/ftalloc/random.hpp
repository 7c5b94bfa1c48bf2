#pragma once

// Seeded randomness. All sampling goes through std::mt19937_64, whose output
// sequence is fixed by the C++ standard, and converts raw 64-bit words to
// uniforms by hand (the std distributions are implementation-defined), so a
// (seed, stream) pair yields the same draws on every platform.

#include <algorithm>
#include <cstdint>
#include <random>
#include <span>

namespace ftalloc {

// SplitMix64 finalizer, used to derive independent sub-seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

class BernoulliSampler {
public:
  explicit BernoulliSampler(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform() < p; }

  // Fills `out` with independent Bernoulli(probs[i]) bits.
  void draw(std::span<const double> probs, std::span<std::uint8_t> out) {
    for (std::size_t i = 0; i < probs.size(); ++i) out[i] = bernoulli(probs[i]) ? 1 : 0;
  }

private:
  std::mt19937_64 engine_;
};

// Samples are generated in fixed-size blocks, each with its own derived seed,
// so any partition of blocks across workers reproduces the same draws.
inline constexpr std::size_t kSampleBlock = 1024;

} // namespace ftalloc
