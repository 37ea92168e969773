//
// Copyright 2026 The potacc Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

#include "potacc/shift_pe.hpp"

namespace potacc {

/// ANALYTIC follows synthesized cycle counts; MEASURED follows benchmarked speedups.
enum class TimingProfile : std::uint8_t { Analytic, Measured };

std::string_view to_string(TimingProfile profile) noexcept;
std::optional<TimingProfile> parse_profile(std::string_view name) noexcept;

struct PECostProfile {
  PEKind kind;
  std::uint32_t lut;
  std::uint32_t ff;
  std::uint32_t shift_cycles;
  double measured_speedup;           ///< suite average vs MULT_UNIFORM
  double measured_energy_reduction;  ///< suite average vs MULT_UNIFORM

  friend bool operator==(const PECostProfile&, const PECostProfile&) = default;
};

// HLS synthesis (LUT, FF, cycles) and synthetic-suite averages, indexed by PEKind.
inline constexpr std::array<PECostProfile, 4> kDefaultPECosts = {{
    {PEKind::ShiftQKeras, 33, 0, 1, 1.60, 1.55},
    {PEKind::ShiftMsq, 89, 17, 2, 1.33, 1.31},
    {PEKind::ShiftApot, 118, 19, 3, 1.14, 1.14},
    {PEKind::MultUniform, 41, 0, 2, 1.00, 1.00},
}};

struct ClockConfig {
  double accel_hz = 250e6;
  double cpu_hz = 650e6;
  /// Board power while the accelerator runs: mean of the VM-accelerator energy/time quotients
  /// (0.40/0.247, 0.81/0.530, 0.50/0.321).
  double accel_power_watts = (0.40 / 0.247 + 0.81 / 0.530 + 0.50 / 0.321) / 3.0;
  /// CPU-only board power: 0.45 J / 0.362 s.
  double cpu_power_watts = 0.45 / 0.362;
  double bus_bytes_per_cycle = 4.0;

  friend bool operator==(const ClockConfig&, const ClockConfig&) = default;
};

struct ResourceEstimate {
  std::uint64_t lut = 0;
  std::uint64_t ff = 0;
  friend bool operator==(ResourceEstimate, ResourceEstimate) = default;
};

class CostModel {
 public:
  CostModel() = default;

  const PECostProfile& pe(PEKind kind) const noexcept { return pe_[static_cast<std::size_t>(kind)]; }
  PECostProfile& pe(PEKind kind) noexcept { return pe_[static_cast<std::size_t>(kind)]; }

  ClockConfig clock;
  double dram_joules_per_byte = 100e-12;
  double cpu_cycles_per_op = 2.0;

  /// n_pes * per-PE (LUT, FF). Throws InvalidInput when n_pes == 0.
  ResourceEstimate resource_estimate(PEKind kind, std::uint32_t n_pes) const;

  /// Time per MAC relative to MULT_UNIFORM.
  double mac_time_factor(PEKind kind, TimingProfile profile) const;

  /// Energy per MAC relative to MULT_UNIFORM: 1 / measured energy reduction.
  double energy_per_mac_factor(PEKind kind) const;

  /// Cycles per MAC of the multiplier baseline; every timing formula is anchored to it.
  double base_mac_cycles() const noexcept { return pe(PEKind::MultUniform).shift_cycles; }

  /// Throws InvalidConfig if any constant is non-positive or non-finite.
  void validate() const;

  friend bool operator==(const CostModel&, const CostModel&) = default;

 private:
  std::array<PECostProfile, 4> pe_ = kDefaultPECosts;
};

/// Convenience wrappers over the default constants.
ResourceEstimate resource_estimate(PEKind kind, std::uint32_t n_pes);
double mac_time_factor(PEKind kind, TimingProfile profile);
double energy_per_mac_factor(PEKind kind);

}  // namespace potacc
