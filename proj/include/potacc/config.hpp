//
// Copyright 2026 The potacc Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "potacc/accel_sim.hpp"

namespace potacc {

/// Everything the CLI reads from a config file. The PE kind comes from the command line.
struct SimConfig {
  AcceleratorConfig accel;
  std::uint64_t seed = 1;
};

/// Flat JSON object; every key is optional and overrides the built-in default. Keys:
///   accel_hz cpu_hz accel_power_watts cpu_power_watts bus_bytes_per_cycle
///   dram_joules_per_byte cpu_cycles_per_op
///   n_gemm_units macs_per_unit weight_buffer_bytes overlap_transfer
///   tile_m tile_n tile_k per_tile_overhead_cycles seed
///   <pe>.lut <pe>.ff <pe>.shift_cycles <pe>.measured_speedup <pe>.measured_energy_reduction
/// with <pe> one of qkeras, msq, apot, uniform. Unknown keys are rejected (InvalidConfig).
SimConfig config_from_json(std::string_view text);
std::string config_to_json(const SimConfig& config);
SimConfig load_config(const std::filesystem::path& path);

}  // namespace potacc
