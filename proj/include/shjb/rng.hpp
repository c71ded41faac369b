#pragma once

#include <array>
#include <cstdint>

namespace shjb {

/// Philox4x32-10 block function (Salmon et al., SC'11).
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32(PhiloxCounter counter, PhiloxKey key);

/// Stateless stream: draw i is a pure function of (seed, stream, i).
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint32_t stream) noexcept
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)}, stream_(stream) {}

  /// Two 64-bit words for block `index`.
  std::array<std::uint64_t, 2> block(std::uint64_t index) const;

  /// Uniform in the open interval (0,1), 53-bit resolution.
  double uniform(std::uint64_t index) const;

  /// Standard normal pair from block `index` (Box-Muller).
  std::array<double, 2> normal_pair(std::uint64_t index) const;

 private:
  PhiloxKey key_;
  std::uint32_t stream_;
};

enum class Stream : std::uint32_t { Brownian = 0, Poisson = 1, SeedDerivation = 0x5eed };

/// Per-path seed derived from (base_seed, path_index, stream).
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t path_index, Stream stream);

}  // namespace shjb
