//
// Copyright 2026 The potacc Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "potacc/cost_model.hpp"

#include <cmath>
#include <string>

#include "potacc/error.hpp"

namespace potacc {

std::string_view to_string(TimingProfile profile) noexcept {
  return profile == TimingProfile::Analytic ? "analytic" : "measured";
}

std::optional<TimingProfile> parse_profile(std::string_view name) noexcept {
  if (name == "analytic") return TimingProfile::Analytic;
  if (name == "measured") return TimingProfile::Measured;
  return std::nullopt;
}

ResourceEstimate CostModel::resource_estimate(PEKind kind, std::uint32_t n_pes) const {
  if (n_pes == 0) throw Error(ErrorCode::InvalidInput, "resource estimate needs at least one PE");
  const auto& p = pe(kind);
  return {std::uint64_t{p.lut} * n_pes, std::uint64_t{p.ff} * n_pes};
}

double CostModel::mac_time_factor(PEKind kind, TimingProfile profile) const {
  if (profile == TimingProfile::Analytic) {
    return static_cast<double>(pe(kind).shift_cycles) / base_mac_cycles();
  }
  return 1.0 / pe(kind).measured_speedup;
}

double CostModel::energy_per_mac_factor(PEKind kind) const { return 1.0 / pe(kind).measured_energy_reduction; }

void CostModel::validate() const {
  auto check = [](double v, const char* what) {
    if (!std::isfinite(v) || v <= 0.0) throw Error(ErrorCode::InvalidConfig, std::string(what) + " must be positive");
  };
  for (const auto& p : pe_) {
    if (p.shift_cycles == 0) throw Error(ErrorCode::InvalidConfig, "shift_cycles must be positive");
    check(p.measured_speedup, "measured_speedup");
    check(p.measured_energy_reduction, "measured_energy_reduction");
  }
  check(clock.accel_hz, "accel_hz");
  check(clock.cpu_hz, "cpu_hz");
  check(clock.accel_power_watts, "accel_power_watts");
  check(clock.cpu_power_watts, "cpu_power_watts");
  check(clock.bus_bytes_per_cycle, "bus_bytes_per_cycle");
  check(cpu_cycles_per_op, "cpu_cycles_per_op");
  if (!std::isfinite(dram_joules_per_byte) || dram_joules_per_byte < 0.0) {
    throw Error(ErrorCode::InvalidConfig, "dram_joules_per_byte must be nonnegative");
  }
}

ResourceEstimate resource_estimate(PEKind kind, std::uint32_t n_pes) {
  return CostModel{}.resource_estimate(kind, n_pes);
}

double mac_time_factor(PEKind kind, TimingProfile profile) { return CostModel{}.mac_time_factor(kind, profile); }

double energy_per_mac_factor(PEKind kind) { return CostModel{}.energy_per_mac_factor(kind); }

}  // namespace potacc
