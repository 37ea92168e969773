//
// Copyright 2026 The potacc Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <limits>

namespace potacc {

/// xorshift64* (Vigna 2016): state ^= state >> 12; state ^= state << 25;
/// state ^= state >> 27; output = state * 0x2545F4914F6CDD1D.
/// A zero seed is replaced by 0x9E3779B97F4A7C15 since the all-zero state is a fixed point.
/// The sequence is part of the benchmark contract; do not change it.
class Xorshift64Star {
 public:
  using result_type = std::uint64_t;

  explicit Xorshift64Star(std::uint64_t seed = 1) noexcept
      : state_(seed == 0 ? 0x9E3779B97F4A7C15ULL : seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545F4914F6CDD1DULL;
  }

  /// Uniform integer in [lo, hi] for spans up to 2^32: the top 32 output bits scaled by the span.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) noexcept {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<std::int64_t>((((*this)() >> 32) * span) >> 32);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  std::int8_t next_int8() noexcept { return static_cast<std::int8_t>(uniform_int(-128, 127)); }

 private:
  std::uint64_t state_;
};

}  // namespace potacc
