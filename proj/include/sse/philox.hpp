#pragma once

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Every output
// block is a pure function of (counter, key), so any random number in a
// simulation can be regenerated independently of evaluation order.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace sse::philox {

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

namespace detail {
inline constexpr std::uint32_t kMul0 = 0xD2511F53u;
inline constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
inline constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

constexpr Counter round(const Counter& c, const Key& k) noexcept {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * c[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * c[2];
  const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
  const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
  return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}
}  // namespace detail

constexpr Counter generate(Counter ctr, Key key) noexcept {
  for (int r = 0; r < 10; ++r) {
    if (r > 0) {
      key[0] += detail::kWeyl0;
      key[1] += detail::kWeyl1;
    }
    ctr = detail::round(ctr, key);
  }
  return ctr;
}

constexpr Key key_from_seed(std::uint64_t seed) noexcept {
  return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

/// Uniform double in the open interval (0, 1) from 64 random bits.
constexpr double to_open_unit(std::uint32_t hi, std::uint32_t lo) noexcept {
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

/// Two independent standard normals from one Philox block (Box-Muller).
inline std::pair<double, double> normal_pair(const Counter& ctr, std::uint64_t seed) noexcept {
  const Counter r = generate(ctr, key_from_seed(seed));
  const double u1 = to_open_unit(r[0], r[1]);
  const double u2 = to_open_unit(r[2], r[3]);
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

}  // namespace sse::philox
