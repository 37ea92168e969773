//
// Copyright 2026 The potacc Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "potacc/gemm_sim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "potacc/error.hpp"

namespace potacc {

std::string to_string(const BenchmarkCase& c) { return fmt::format("{}x{}x{}", c.m, c.n, c.k); }

std::optional<BenchmarkCase> parse_case(std::string_view text) {
  std::uint32_t dims[3] = {};
  const char* p = text.data();
  const char* end = text.data() + text.size();
  for (int i = 0; i < 3; ++i) {
    auto [next, ec] = std::from_chars(p, end, dims[i]);
    if (ec != std::errc{} || dims[i] == 0) return std::nullopt;
    p = next;
    if (i < 2) {
      if (p == end || (*p != 'x' && *p != 'X')) return std::nullopt;
      ++p;
    }
  }
  if (p != end) return std::nullopt;
  return BenchmarkCase{dims[0], dims[1], dims[2]};
}

std::vector<BenchmarkCase> synthetic_suite() {
  std::vector<BenchmarkCase> suite;
  for (std::uint32_t m : {128U, 256U, 512U}) {
    for (std::uint32_t n : {64U, 256U, 1024U}) {
      for (std::uint32_t k : {256U, 512U, 1024U}) suite.push_back({m, n, k});
    }
  }
  return suite;
}

void TileConfig::validate() const {
  if (tile_m == 0 || tile_n == 0 || tile_k == 0) throw Error(ErrorCode::InvalidConfig, "tile sizes must be positive");
}

std::uint64_t tile_count(std::uint64_t m, std::uint64_t n, std::uint64_t k, const TileConfig& tiles) {
  tiles.validate();
  auto ceil_div = [](std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; };
  return ceil_div(m, tiles.tile_m) * ceil_div(n, tiles.tile_n) * ceil_div(k, tiles.tile_k);
}

CodeMatrix to_code_matrix(const QuantizedTensor& weights) {
  if (weights.shape().size() != 2) {
    throw Error(ErrorCode::ShapeMismatch, "GEMM weights must be rank 2, got rank " +
                                              std::to_string(weights.shape().size()));
  }
  CodeMatrix codes(weights.shape()[0], weights.shape()[1]);
  for (std::size_t i = 0; i < weights.size(); ++i) codes.data()[i] = weights.raw(i);
  return codes;
}

namespace {

// Tile loops in (m, n, k) order; partial sums live in C between k-tiles.
template <typename WeightMatrix, typename Multiply>
MatrixI32 tiled_gemm(const MatrixI8& a, const WeightMatrix& w, const TileConfig& tiles, Multiply multiply) {
  tiles.validate();
  if (a.cols() != w.rows()) {
    throw Error(ErrorCode::ShapeMismatch, fmt::format("A is {}x{} but W is {}x{}", a.rows(), a.cols(), w.rows(), w.cols()));
  }
  const Eigen::Index m = a.rows(), n = w.cols(), k = a.cols();
  MatrixI32 c = MatrixI32::Zero(m, n);
  for (Eigen::Index i0 = 0; i0 < m; i0 += tiles.tile_m) {
    const Eigen::Index i1 = std::min<Eigen::Index>(i0 + tiles.tile_m, m);
    for (Eigen::Index j0 = 0; j0 < n; j0 += tiles.tile_n) {
      const Eigen::Index j1 = std::min<Eigen::Index>(j0 + tiles.tile_n, n);
      for (Eigen::Index l0 = 0; l0 < k; l0 += tiles.tile_k) {
        const Eigen::Index l1 = std::min<Eigen::Index>(l0 + tiles.tile_k, k);
        for (Eigen::Index i = i0; i < i1; ++i) {
          for (Eigen::Index j = j0; j < j1; ++j) {
            Accumulator acc{c(i, j)};
            for (Eigen::Index l = l0; l < l1; ++l) acc = accumulate(acc, multiply(a(i, l), w(l, j)));
            c(i, j) = acc.value;
          }
        }
      }
    }
  }
  return c;
}

}  // namespace

MatrixI32 gemm_execute(const MatrixI8& a, const CodeMatrix& w, PEKind kind, const TileConfig& tiles) {
  if (!is_shift(kind)) throw Error(ErrorCode::MethodMismatch, "PoT codes cannot drive a multiplier PE");
  if ((w.array() > 0xF).any()) throw Error(ErrorCode::InvalidInput, "weight code exceeds 4 bits");
  return tiled_gemm(a, w, tiles, [kind](std::int8_t act, std::uint8_t raw) { return datapath::shift(kind, act, raw); });
}

MatrixI32 gemm_execute(const MatrixI8& a, const QuantizedTensor& w, PEKind kind, const TileConfig& tiles) {
  if (w.method() != method_of(kind)) {
    throw Error(ErrorCode::MethodMismatch, fmt::format("{} weights on {} PEs", to_string(w.method()), to_string(kind)));
  }
  return gemm_execute(a, to_code_matrix(w), kind, tiles);
}

MatrixI32 gemm_execute(const MatrixI8& a, const MatrixI8& w, const TileConfig& tiles) {
  return tiled_gemm(a, w, tiles, [](std::int8_t act, std::int8_t weight) { return pe_multiply(act, weight); });
}

namespace {

double mac_slots(const BenchmarkCase& c, std::uint32_t n_pes) {
  if (n_pes == 0) throw Error(ErrorCode::InvalidConfig, "PE count must be positive");
  return static_cast<double>((c.macs() + n_pes - 1) / n_pes);
}

}  // namespace

double gemm_compute_cycles(const BenchmarkCase& c, PEKind kind, const TileConfig& tiles, TimingProfile profile,
                           const CostModel& cost, std::uint32_t n_pes) {
  return mac_slots(c, n_pes) * cost.base_mac_cycles() * cost.mac_time_factor(kind, profile) +
         static_cast<double>(tile_count(c.m, c.n, c.k, tiles)) * tiles.per_tile_overhead_cycles;
}

double gemm_compute_energy(const BenchmarkCase& c, PEKind kind, const TileConfig& tiles, const CostModel& cost,
                           std::uint32_t n_pes) {
  const double weighted_cycles =
      mac_slots(c, n_pes) * cost.base_mac_cycles() * cost.energy_per_mac_factor(kind) +
      static_cast<double>(tile_count(c.m, c.n, c.k, tiles)) * tiles.per_tile_overhead_cycles;
  return weighted_cycles / cost.clock.accel_hz * cost.clock.accel_power_watts;
}

SuiteResult run_suite(PEKind kind, TimingProfile profile, const TileConfig& tiles, const CostModel& cost,
                      std::span<const BenchmarkCase> cases) {
  const std::vector<BenchmarkCase> suite = cases.empty() ? synthetic_suite()
                                                         : std::vector<BenchmarkCase>(cases.begin(), cases.end());
  SuiteResult result{kind, profile, {}, 0.0, 0.0};
  for (const BenchmarkCase& c : suite) {
    CaseResult r{c, kind};
    r.cycles = gemm_compute_cycles(c, kind, tiles, profile, cost);
    r.baseline_cycles = gemm_compute_cycles(c, PEKind::MultUniform, tiles, profile, cost);
    r.speedup = r.baseline_cycles / r.cycles;
    r.energy_joules = gemm_compute_energy(c, kind, tiles, cost);
    r.baseline_energy_joules = gemm_compute_energy(c, PEKind::MultUniform, tiles, cost);
    r.energy_reduction = r.baseline_energy_joules / r.energy_joules;
    result.average_speedup += r.speedup;
    result.average_energy_reduction += r.energy_reduction;
    result.cases.push_back(r);
  }
  if (!result.cases.empty()) {
    result.average_speedup /= static_cast<double>(result.cases.size());
    result.average_energy_reduction /= static_cast<double>(result.cases.size());
  }
  return result;
}

void write_suite_csv(std::ostream& out, std::span<const SuiteResult> results) {
  out << kSuiteCsvHeader << '\n';
  for (const auto& suite : results) {
    for (const auto& r : suite.cases) {
      out << fmt::format("{},{},{},{},{},{},{},{},{}\n", r.bench.m, r.bench.n, r.bench.k, to_string(r.kind),
                         to_string(suite.profile), r.cycles, r.speedup, r.energy_joules, r.energy_reduction);
    }
  }
}

MatrixI8 random_int8_matrix(Eigen::Index rows, Eigen::Index cols, Xorshift64Star& rng) {
  MatrixI8 m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.next_int8();
  return m;
}

CodeMatrix random_code_matrix(Eigen::Index rows, Eigen::Index cols, Xorshift64Star& rng) {
  CodeMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<std::uint8_t>(rng.uniform_int(0, 15));
  return m;
}

}  // namespace potacc
