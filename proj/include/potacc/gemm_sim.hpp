//
// Copyright 2026 The potacc Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "potacc/cost_model.hpp"
#include "potacc/matrix.hpp"
#include "potacc/pot_codec.hpp"
#include "potacc/prng.hpp"
#include "potacc/shift_pe.hpp"

namespace potacc {

/// A is m x k, B is k x n, C is m x n.
struct BenchmarkCase {
  std::uint32_t m = 0;
  std::uint32_t n = 0;
  std::uint32_t k = 0;

  std::uint64_t macs() const noexcept { return std::uint64_t{m} * n * k; }
  friend bool operator==(const BenchmarkCase&, const BenchmarkCase&) = default;
};

std::string to_string(const BenchmarkCase& c);
/// Parses "MxNxK"; returns nullopt on malformed or zero dimensions.
std::optional<BenchmarkCase> parse_case(std::string_view text);

/// The 27 synthetic cases: m in {128,256,512}, n in {64,256,1024}, k in {256,512,1024};
/// ordered m-major, then n, then k.
std::vector<BenchmarkCase> synthetic_suite();

struct TileConfig {
  std::uint32_t tile_m = 64;
  std::uint32_t tile_n = 64;
  std::uint32_t tile_k = 64;
  std::uint32_t per_tile_overhead_cycles = 16;

  void validate() const;
  friend bool operator==(const TileConfig&, const TileConfig&) = default;
};

/// ceil(m/tile_m) * ceil(n/tile_n) * ceil(k/tile_k)
std::uint64_t tile_count(std::uint64_t m, std::uint64_t n, std::uint64_t k, const TileConfig& tiles);

/// PE count of the matrix-multiply accelerator.
inline constexpr std::uint32_t kMMAccelPEs = 64;

/// Rank-2 view of a PoT weight tensor as raw codes.
CodeMatrix to_code_matrix(const QuantizedTensor& weights);

/// Tiled GEMM through the shift PEs: C(i,j) = sum_l pe_multiply(A(i,l), W(l,j)), scaled by 2^F.
/// Throws ShapeMismatch / MethodMismatch / AccumulatorOverflow.
MatrixI32 gemm_execute(const MatrixI8& a, const CodeMatrix& w, PEKind kind, const TileConfig& tiles = {});
MatrixI32 gemm_execute(const MatrixI8& a, const QuantizedTensor& w, PEKind kind, const TileConfig& tiles = {});
/// Tiled GEMM through the multiplier PEs.
MatrixI32 gemm_execute(const MatrixI8& a, const MatrixI8& w, const TileConfig& tiles = {});

/// Compute-only cycles on an accelerator with `n_pes` PEs:
/// ceil(m*n*k / n_pes) * base_mac_cycles * mac_time_factor + tiles * per_tile_overhead.
double gemm_compute_cycles(const BenchmarkCase& c, PEKind kind, const TileConfig& tiles, TimingProfile profile,
                           const CostModel& cost = {}, std::uint32_t n_pes = kMMAccelPEs);

/// Compute energy in joules: MAC cycles are charged at accel power scaled by the kind's
/// energy-per-MAC factor, tile overhead cycles at plain accel power.
double gemm_compute_energy(const BenchmarkCase& c, PEKind kind, const TileConfig& tiles, const CostModel& cost = {},
                           std::uint32_t n_pes = kMMAccelPEs);

struct CaseResult {
  BenchmarkCase bench;
  PEKind kind;
  double cycles = 0;
  double baseline_cycles = 0;
  double speedup = 0;
  double energy_joules = 0;
  double baseline_energy_joules = 0;
  double energy_reduction = 0;
};

struct SuiteResult {
  PEKind kind;
  TimingProfile profile;
  std::vector<CaseResult> cases;
  double average_speedup = 0;           ///< arithmetic mean over cases
  double average_energy_reduction = 0;  ///< arithmetic mean over cases
};

/// Runs the cases (default: the full synthetic suite) against the MULT_UNIFORM baseline.
SuiteResult run_suite(PEKind kind, TimingProfile profile, const TileConfig& tiles, const CostModel& cost = {},
                      std::span<const BenchmarkCase> cases = {});

/// CSV columns: m,n,k,kind,profile,cycles,speedup,energy_joules,energy_reduction
inline constexpr std::string_view kSuiteCsvHeader = "m,n,k,kind,profile,cycles,speedup,energy_joules,energy_reduction";
void write_suite_csv(std::ostream& out, std::span<const SuiteResult> results);

MatrixI8 random_int8_matrix(Eigen::Index rows, Eigen::Index cols, Xorshift64Star& rng);
/// Uniformly random raw codes (all 16 patterns, including negative zero).
CodeMatrix random_code_matrix(Eigen::Index rows, Eigen::Index cols, Xorshift64Star& rng);

}  // namespace potacc
