//
// Copyright 2026 The potacc Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "potacc/pot_codec.hpp"

namespace potacc {

enum class PEKind : std::uint8_t { ShiftQKeras, ShiftMsq, ShiftApot, MultUniform };

inline constexpr PEKind kAllPEKinds[] = {PEKind::ShiftQKeras, PEKind::ShiftMsq, PEKind::ShiftApot,
                                         PEKind::MultUniform};

std::string_view to_string(PEKind kind) noexcept;

constexpr Method method_of(PEKind kind) noexcept {
  switch (kind) {
    case PEKind::ShiftQKeras: return Method::QKeras;
    case PEKind::ShiftMsq: return Method::Msq;
    case PEKind::ShiftApot: return Method::Apot;
    case PEKind::MultUniform: return Method::Uniform;
  }
  return Method::Uniform;
}

constexpr PEKind pe_kind_for(Method method) noexcept {
  switch (method) {
    case Method::QKeras: return PEKind::ShiftQKeras;
    case Method::Msq: return PEKind::ShiftMsq;
    case Method::Apot: return PEKind::ShiftApot;
    case Method::Uniform: return PEKind::MultUniform;
  }
  return PEKind::MultUniform;
}

/// F: products leave the PE scaled by 2^F.
constexpr int fraction_bits(PEKind kind) noexcept {
  switch (kind) {
    case PEKind::ShiftMsq: return 3;
    case PEKind::ShiftApot: return 4;
    default: return 0;
  }
}

constexpr bool is_shift(PEKind kind) noexcept { return kind != PEKind::MultUniform; }

namespace datapath {

// Each datapath takes the sign-extended activation and the raw 4-bit code. Shifts are
// left shifts on int32, exact for negative activations in two's complement.

constexpr std::int32_t qkeras(std::int32_t act, std::uint8_t raw) noexcept {
  const std::int32_t m = act << (raw & 0x7);
  return (raw & 0x8) ? -m : m;
}

// F = 3: first field e1 in {1,2,3} is the shift 2^-e1, realised as << (3 - e1);
// the second term 2^-1 becomes << 2. A zero field bypasses its shifter.
constexpr std::int32_t msq(std::int32_t act, std::uint8_t raw) noexcept {
  const int e1 = (raw >> 1) & 0x3;
  const int e2 = raw & 0x1;
  const std::int32_t t1 = e1 == 0 ? 0 : act << (3 - e1);
  const std::int32_t t2 = e2 == 0 ? 0 : act << 2;
  const std::int32_t m = t1 + t2;
  return (raw & 0x8) ? -m : m;
}

// F = 4: first field 3 is remapped to shift 4; second term 2^-3 becomes << 1.
constexpr std::int32_t apot(std::int32_t act, std::uint8_t raw) noexcept {
  const int e1 = (raw >> 1) & 0x3;
  const int e2 = raw & 0x1;
  const int s1 = e1 == 3 ? 4 : e1;
  const std::int32_t t1 = e1 == 0 ? 0 : act << (4 - s1);
  const std::int32_t t2 = e2 == 0 ? 0 : act << 1;
  const std::int32_t m = t1 + t2;
  return (raw & 0x8) ? -m : m;
}

constexpr std::int32_t shift(PEKind kind, std::int32_t act, std::uint8_t raw) noexcept {
  switch (kind) {
    case PEKind::ShiftQKeras: return qkeras(act, raw);
    case PEKind::ShiftMsq: return msq(act, raw);
    case PEKind::ShiftApot: return apot(act, raw);
    case PEKind::MultUniform: break;
  }
  return 0;
}

}  // namespace datapath

/// Shift-PE product act * level * 2^F. Throws MethodMismatch if the code's method does not
/// belong to `kind` (MULT_UNIFORM takes int8 weights, see the overload below).
std::int32_t pe_multiply(std::int8_t act, WeightCode code, PEKind kind);

/// Multiplier PE: act * weight.
constexpr std::int32_t pe_multiply(std::int8_t act, std::int8_t weight) noexcept {
  return static_cast<std::int32_t>(act) * static_cast<std::int32_t>(weight);
}

/// 32-bit PE accumulator in units of act * 2^-F * tensor_scale.
struct Accumulator {
  std::int32_t value = 0;
  friend constexpr bool operator==(Accumulator, Accumulator) noexcept = default;
};

/// acc + product; throws AccumulatorOverflow instead of wrapping.
Accumulator accumulate(Accumulator acc, std::int32_t product);

Accumulator pe_mac(Accumulator acc, std::int8_t act, WeightCode code, PEKind kind);
Accumulator pe_mac(Accumulator acc, std::int8_t act, std::int8_t weight);

/// Left fold of pe_mac from zero. Throws LengthMismatch for unequal lengths.
std::int32_t dot_product(std::span<const std::int8_t> acts, std::span<const WeightCode> codes, PEKind kind);
std::int32_t dot_product(std::span<const std::int8_t> acts, std::span<const std::int8_t> weights);

struct PECheckFailure {
  PEKind kind;
  int act;
  int weight;  ///< raw code for shift kinds, int8 weight for MULT_UNIFORM
  std::int64_t expected;
  std::int64_t actual;
};

struct PECheckResult {
  PEKind kind;
  std::size_t cases = 0;
  std::vector<PECheckFailure> failures;
  bool passed() const noexcept { return failures.empty(); }
};

/// Level oracle used by pe_check; defaults to decode().
using LevelOracle = std::function<double(WeightCode)>;

/// Exhaustive sweep: every activation in [-128, 127] against every raw code (shift kinds,
/// 4,096 cases) or every int8 weight (MULT_UNIFORM, 65,536 cases). Expected products are
/// act * level * 2^F evaluated exactly.
PECheckResult pe_check(PEKind kind, const LevelOracle& oracle = {});

}  // namespace potacc
