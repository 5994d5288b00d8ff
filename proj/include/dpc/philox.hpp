#pragma once

// Philox4x32-10 counter-based generator (Salmon et al., SC'11 Random123 family).
// Stateless: every output block is a pure function of (counter, key).

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace dpc {

class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Counter block(Counter ctr, Key key) {
    ctr = round(ctr, key);
    for (int r = 1; r < 10; ++r) {
      key[0] += kW0;
      key[1] += kW1;
      ctr = round(ctr, key);
    }
    return ctr;
  }

 private:
  static constexpr std::uint32_t kM0 = 0xD2511F53u;
  static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kW0 = 0x9E3779B9u;
  static constexpr std::uint32_t kW1 = 0xBB67AE85u;

  static constexpr std::pair<std::uint32_t, std::uint32_t> mulhilo(std::uint32_t a,
                                                                   std::uint32_t b) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    return {static_cast<std::uint32_t>(p >> 32), static_cast<std::uint32_t>(p)};
  }

  static constexpr Counter round(const Counter& c, const Key& k) {
    const auto [hi0, lo0] = mulhilo(kM0, c[0]);
    const auto [hi1, lo1] = mulhilo(kM1, c[2]);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
  }
};

/// Uniform on (0, 1] from 64 random bits: ((x >> 11) + 1) * 2^-53.
inline double uniform_open_closed(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t x = (static_cast<std::uint64_t>(hi) << 32) | lo;
  return static_cast<double>((x >> 11) + 1) * 0x1.0p-53;
}

/// Two independent standard normals (Box-Muller) from one Philox block.
inline std::pair<double, double> normal_pair(const Philox4x32::Counter& ctr,
                                             const Philox4x32::Key& key) {
  const auto b = Philox4x32::block(ctr, key);
  const double u1 = uniform_open_closed(b[0], b[1]);
  const double u2 = uniform_open_closed(b[2], b[3]);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double t = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(t), r * std::sin(t)};
}

}  // namespace dpc
