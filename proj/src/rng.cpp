#include "shjb/rng.hpp"

#include <cmath>
#include <numbers>

namespace shjb {

namespace {

constexpr std::uint32_t kMulA = 0xD2511F53u;
constexpr std::uint32_t kMulB = 0xCD9E8D57u;
constexpr std::uint32_t kWeylA = 0x9E3779B9u;
constexpr std::uint32_t kWeylB = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

inline double to_open_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

PhiloxCounter philox4x32(PhiloxCounter ctr, PhiloxKey key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeylA;
      key[1] += kWeylB;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMulA, ctr[0], hi0, lo0);
    mulhilo(kMulB, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

std::array<std::uint64_t, 2> CounterRng::block(std::uint64_t index) const {
  const PhiloxCounter out =
      philox4x32({static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), stream_, 0u}, key_);
  return {(static_cast<std::uint64_t>(out[1]) << 32) | out[0], (static_cast<std::uint64_t>(out[3]) << 32) | out[2]};
}

double CounterRng::uniform(std::uint64_t index) const { return to_open_unit(block(index)[0]); }

std::array<double, 2> CounterRng::normal_pair(std::uint64_t index) const {
  const auto b = block(index);
  const double u1 = to_open_unit(b[0]);
  const double u2 = to_open_unit(b[1]);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(phi), r * std::sin(phi)};
}

std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t path_index, Stream stream) {
  const PhiloxKey key{static_cast<std::uint32_t>(base_seed), static_cast<std::uint32_t>(base_seed >> 32)};
  const PhiloxCounter out = philox4x32({static_cast<std::uint32_t>(path_index),
                                        static_cast<std::uint32_t>(path_index >> 32),
                                        static_cast<std::uint32_t>(stream),
                                        static_cast<std::uint32_t>(Stream::SeedDerivation)},
                                       key);
  return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

}  // namespace shjb
