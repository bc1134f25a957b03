/*
 Copyright 2026 The ruinbound Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace ruinbound {

/// Philox4x32-10 counter-based generator (Salmon et al., Random123).
/// Output is a pure function of (counter, key).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter generate(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += 0x9E3779B9u;
        key[1] += 0xBB67AE85u;
      }
      const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }
};

inline Philox4x32::Key philox_key(std::uint64_t seed) {
  return {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
}

/// Uniform in the open interval (0, 1) on the grid (k + 1/2) 2^-52, so that
/// 1 - u is exact and also on the grid.
inline double open_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = ((std::uint64_t{hi} << 32) | lo) >> 12;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-52;
}

/// xoshiro256++ (Blackman and Vigna) whose 256-bit state is the Philox
/// output at counters {0, 0, lane, stream} and {1, 0, lane, stream}, so each
/// (seed, lane, stream) triple owns an independent sequential stream.
/// Satisfies UniformRandomBitGenerator.
class PathEngine {
 public:
  using result_type = std::uint64_t;

  PathEngine(std::uint64_t seed, std::uint32_t lane, std::uint32_t stream) {
    const auto key = philox_key(seed);
    const auto a = Philox4x32::generate({0, 0, lane, stream}, key);
    const auto b = Philox4x32::generate({1, 0, lane, stream}, key);
    s_[0] = (std::uint64_t{a[0]} << 32) | a[1];
    s_[1] = (std::uint64_t{a[2]} << 32) | a[3];
    s_[2] = (std::uint64_t{b[0]} << 32) | b[1];
    s_[3] = (std::uint64_t{b[2]} << 32) | b[3];
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 0x9E3779B97F4A7C15ull;
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~std::uint64_t{0}; }

  result_type operator()() {
    const std::uint64_t out = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return out;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::uint64_t s_[4];
};

/// Random access into the counter space: the draw at {w0, w1, lane, stream}.
class PhiloxIndexed {
 public:
  explicit PhiloxIndexed(std::uint64_t seed) : key_(philox_key(seed)) {}

  double uniform(std::uint32_t w0, std::uint32_t w1, std::uint32_t lane,
                 std::uint32_t stream) const {
    const auto out = Philox4x32::generate({w0, w1, lane, stream}, key_);
    return open_unit(out[0], out[1]);
  }

  /// Standard normal by Box-Muller on the four words at one counter.
  double normal(std::uint32_t w0, std::uint32_t w1, std::uint32_t lane,
                std::uint32_t stream) const {
    const auto out = Philox4x32::generate({w0, w1, lane, stream}, key_);
    const double u1 = open_unit(out[0], out[1]);
    const double u2 = open_unit(out[2], out[3]);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

 private:
  Philox4x32::Key key_;
};

}  // namespace ruinbound
