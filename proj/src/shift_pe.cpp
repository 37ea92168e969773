//
// Copyright 2026 The potacc Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "potacc/shift_pe.hpp"

#include <cmath>
#include <string>

#include "potacc/error.hpp"

namespace potacc {

std::string_view to_string(PEKind kind) noexcept {
  switch (kind) {
    case PEKind::ShiftQKeras: return "shift_qkeras";
    case PEKind::ShiftMsq: return "shift_msq";
    case PEKind::ShiftApot: return "shift_apot";
    case PEKind::MultUniform: return "mult_uniform";
  }
  return "unknown";
}

std::int32_t pe_multiply(std::int8_t act, WeightCode code, PEKind kind) {
  if (!is_shift(kind) || code.method() != method_of(kind)) {
    throw Error(ErrorCode::MethodMismatch, std::string(to_string(code.method())) + " code on " +
                                               std::string(to_string(kind)) + " PE");
  }
  return datapath::shift(kind, act, code.raw());
}

Accumulator accumulate(Accumulator acc, std::int32_t product) {
  std::int32_t sum = 0;
  if (__builtin_add_overflow(acc.value, product, &sum)) {
    throw Error(ErrorCode::AccumulatorOverflow,
                std::to_string(acc.value) + " + " + std::to_string(product) + " exceeds 32 bits");
  }
  return {sum};
}

Accumulator pe_mac(Accumulator acc, std::int8_t act, WeightCode code, PEKind kind) {
  return accumulate(acc, pe_multiply(act, code, kind));
}

Accumulator pe_mac(Accumulator acc, std::int8_t act, std::int8_t weight) {
  return accumulate(acc, pe_multiply(act, weight));
}

std::int32_t dot_product(std::span<const std::int8_t> acts, std::span<const WeightCode> codes, PEKind kind) {
  if (acts.size() != codes.size()) {
    throw Error(ErrorCode::LengthMismatch,
                std::to_string(acts.size()) + " activations vs " + std::to_string(codes.size()) + " weights");
  }
  Accumulator acc;
  for (std::size_t i = 0; i < acts.size(); ++i) acc = pe_mac(acc, acts[i], codes[i], kind);
  return acc.value;
}

std::int32_t dot_product(std::span<const std::int8_t> acts, std::span<const std::int8_t> weights) {
  if (acts.size() != weights.size()) {
    throw Error(ErrorCode::LengthMismatch,
                std::to_string(acts.size()) + " activations vs " + std::to_string(weights.size()) + " weights");
  }
  Accumulator acc;
  for (std::size_t i = 0; i < acts.size(); ++i) acc = pe_mac(acc, acts[i], weights[i]);
  return acc.value;
}

PECheckResult pe_check(PEKind kind, const LevelOracle& oracle) {
  PECheckResult result{kind, 0, {}};
  if (!is_shift(kind)) {
    for (int act = -128; act <= 127; ++act) {
      for (int w = -128; w <= 127; ++w) {
        ++result.cases;
        const std::int64_t expected = static_cast<std::int64_t>(act) * w;
        const std::int64_t actual = pe_multiply(static_cast<std::int8_t>(act), static_cast<std::int8_t>(w));
        if (actual != expected) result.failures.push_back({kind, act, w, expected, actual});
      }
    }
    return result;
  }

  const Method method = method_of(kind);
  const int f = fraction_bits(kind);
  for (int act = -128; act <= 127; ++act) {
    for (std::uint8_t raw = 0; raw < 16; ++raw) {
      ++result.cases;
      const WeightCode code(raw, method);
      // level * 2^F is an integer for every valid level, so the product below is exact.
      const double scaled_level = std::ldexp(oracle ? oracle(code) : decode(code), f);
      const double expected_real = static_cast<double>(act) * scaled_level;
      const auto expected = static_cast<std::int64_t>(std::llround(expected_real));
      const std::int64_t actual = pe_multiply(static_cast<std::int8_t>(act), code, kind);
      if (static_cast<double>(expected) != expected_real || actual != expected) {
        result.failures.push_back({kind, act, raw, expected, actual});
      }
    }
  }
  return result;
}

}  // namespace potacc
