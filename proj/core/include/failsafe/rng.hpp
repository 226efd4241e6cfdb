#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace failsafe {

// Seed used by every entry point unless overridden.
inline constexpr std::uint64_t kDefaultSeed = 1979;

std::uint64_t splitmix64(std::uint64_t& state);

// Key for stream `stream` under `master`. Streams with distinct indices are
// decorrelated by two rounds of the SplitMix64 finalizer.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

// xoshiro256** keyed by (master seed, stream index), plus Box-Muller normals.
// The draw sequence of a stream depends only on its key, so work can be split
// across threads in any way without changing results.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t master_seed, std::uint64_t stream = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  // Uniform on (0, 1].
  double uniform();
  double normal();

 private:
  std::array<std::uint64_t, 4> s_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace failsafe
