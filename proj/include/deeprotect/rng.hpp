#pragma once

#include <bit>
#include <cstdint>
#include <random>

namespace deeprotect {

// Stateless 64-bit mixer (splitmix64). Used to turn (seed, stream id) pairs
// into well-separated engine seeds so that independent substreams can be
// derived without consuming draws from the parent.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic random source. Every randomized operation in the library
// takes one of these (or a seed) explicitly; nothing reads global entropy.
//
// Substream derivation is a function of the *construction seed*, not of the
// engine state, so child(k) yields the same stream no matter how many draws
// the parent has already produced. That property is what makes the parallel
// per-window kernels bit-identical to their serial counterparts.
class Rng {
 public:
  explicit Rng(std::uint64_t seed)
      : seed_(seed), engine_(splitmix64(seed ^ 0x7f4a7c15ULL)) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on the open interval (0,1). The offset keeps both endpoints
  // unreachable, which the inverse-CDF Laplace sampler relies on to avoid
  // log(0).
  double uniform_open() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Independent child stream identified by `stream`.
  Rng child(std::uint64_t stream) const {
    return Rng(splitmix64(seed_ + 0x632be59bd9b4e019ULL * (stream + 1)));
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

// Folds a double (e.g. an epsilon value) into a stream id so that sweep
// points can derive their RNG from (seed, epsilon, mode) reproducibly.
inline std::uint64_t stream_of(double value, std::uint64_t salt) {
  return splitmix64(std::bit_cast<std::uint64_t>(value) ^ splitmix64(salt));
}

}  // namespace deeprotect
