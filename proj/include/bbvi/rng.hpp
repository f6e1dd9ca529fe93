#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace bbvi {

// Counter-based substream generator. Every (seed, stream) pair names an
// independent stream whose output depends only on the pair and the number of
// values drawn so far, never on global state. Batches of Monte Carlo draws
// keyed by sample index therefore reproduce bitwise no matter how the work is
// split across threads.
class SubstreamRng {
 public:
  SubstreamRng(std::uint64_t seed, std::uint64_t stream)
      : state_(init_state(seed, stream)) {}

  std::uint64_t next_u64() {
    // splitmix64: output is a mix of a Weyl-sequence counter.
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform on the open interval (0, 1); never returns an endpoint.
  double next_uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller. The transform is branch-free in the
  // uniform stream, so the mapping (seed, stream, call index) -> value is
  // fixed. The paired value is cached.
  double next_gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  static std::uint64_t init_state(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t s = seed + 0x9E3779B97F4A7C15ULL;
    s = (s ^ (s >> 30)) * 0xBF58476D1CE4E5B9ULL;
    s = (s ^ (s >> 27)) * 0x94D049BB133111EBULL;
    s ^= s >> 31;
    return s + stream * 0xD2B74407B1CE6E93ULL;
  }

  std::uint64_t state_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace bbvi
