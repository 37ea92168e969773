//
// Copyright 2026 The potacc Authors
// SPDX-License-Identifier: Apache-2.0
//

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "potacc/cost_model.hpp"
#include "potacc/gemm_sim.hpp"
#include "potacc/matrix.hpp"
#include "potacc/pot_codec.hpp"
#include "potacc/shift_pe.hpp"

namespace potacc {

enum class LayerKind : std::uint8_t { Conv2D, DepthwiseConv2D, Dense, Other };
enum class Padding : std::uint8_t { Same, Valid };
enum class Placement : std::uint8_t { Accel, Cpu };

std::string_view to_string(LayerKind kind) noexcept;
std::string_view to_string(Padding padding) noexcept;
std::string_view to_string(Placement placement) noexcept;
std::optional<LayerKind> parse_layer_kind(std::string_view name) noexcept;
std::optional<Padding> parse_padding(std::string_view name) noexcept;
std::optional<Placement> parse_placement(std::string_view name) noexcept;

/// One layer. Inputs and outputs are HWC; conv weights are [out_c, kh, kw, in_c],
/// depthwise weights [kh, kw, c], dense weights [out_c, in_h*in_w*in_c].
struct LayerConfig {
  std::string name;
  LayerKind kind = LayerKind::Conv2D;
  std::uint32_t in_h = 1;
  std::uint32_t in_w = 1;
  std::uint32_t in_c = 1;
  std::uint32_t out_c = 1;
  std::uint32_t kernel_h = 1;
  std::uint32_t kernel_w = 1;
  std::uint32_t stride = 1;
  Padding padding = Padding::Same;
  std::uint64_t op_count = 0;  ///< CPU operations of an OTHER layer
  int output_shift = 0;        ///< requantization right shift applied after removing the 2^F scale

  bool is_gemm_layer() const noexcept { return kind != LayerKind::Other; }
  std::uint32_t out_h() const noexcept;
  std::uint32_t out_w() const noexcept;
  /// Leading (top/left) zero padding; SAME splits the total padding with the extra row at the end.
  std::uint32_t pad_top() const noexcept;
  std::uint32_t pad_left() const noexcept;
  /// Throws MalformedModel on zero dimensions, a kernel larger than a VALID input, or a
  /// depthwise layer whose out_c differs from in_c.
  void validate() const;
};

/// GEMM view of a layer: `groups` independent GEMMs of M x K times K x N.
struct GemmDims {
  std::uint64_t m = 0;
  std::uint64_t k = 0;
  std::uint64_t n = 0;
  std::uint64_t groups = 1;

  std::uint64_t macs() const noexcept { return m * k * n * groups; }
  friend bool operator==(const GemmDims&, const GemmDims&) = default;
};

/// M = out_c, K = kh*kw*in_c, N = out_h*out_w; depthwise lowers to in_c GEMMs with M = 1,
/// K = kh*kw; dense to M = out_c, K = in_h*in_w*in_c, N = 1. Throws UnsupportedLayer for OTHER.
GemmDims im2col_lower(const LayerConfig& layer);

struct AcceleratorConfig {
  std::uint32_t n_gemm_units = 4;
  std::uint32_t macs_per_unit = 64;
  std::uint64_t weight_buffer_bytes = 131072;
  PEKind pe_kind = PEKind::ShiftQKeras;
  TileConfig tiles;
  bool overlap_transfer = false;  ///< max(compute, transfer) instead of their sum
  CostModel cost;

  std::uint32_t total_macs() const noexcept { return n_gemm_units * macs_per_unit; }
  /// 4 for shift PEs, 8 for the multiplier baseline.
  std::uint32_t weight_bits() const noexcept { return is_shift(pe_kind) ? 4 : 8; }
  void validate() const;
};

/// HWC activation tensor stored as (h*w) x c, one pixel per row.
template <typename Scalar>
struct FeatureMap {
  std::uint32_t h = 0;
  std::uint32_t w = 0;
  std::uint32_t c = 0;
  Matrix<Scalar> data;

  static FeatureMap zeros(std::uint32_t h, std::uint32_t w, std::uint32_t c) {
    return {h, w, c, Matrix<Scalar>::Zero(Eigen::Index{h} * w, c)};
  }
  Scalar& at(std::uint32_t y, std::uint32_t x, std::uint32_t ch) { return data(Eigen::Index{y} * w + x, ch); }
  Scalar at(std::uint32_t y, std::uint32_t x, std::uint32_t ch) const { return data(Eigen::Index{y} * w + x, ch); }

  friend bool operator==(const FeatureMap& a, const FeatureMap& b) {
    return a.h == b.h && a.w == b.w && a.c == b.c && a.data == b.data;
  }
};

using FeatureMapI8 = FeatureMap<std::int8_t>;
using FeatureMapI32 = FeatureMap<std::int32_t>;

FeatureMapI8 random_feature_map(std::uint32_t h, std::uint32_t w, std::uint32_t c, Xorshift64Star& rng);

/// Plain int8 weights for the multiplier baseline.
struct Int8Tensor {
  std::vector<std::uint32_t> shape;
  std::vector<std::int8_t> values;
  friend bool operator==(const Int8Tensor&, const Int8Tensor&) = default;
};

using LayerWeights = std::variant<QuantizedTensor, Int8Tensor>;

/// Expected weight-tensor shape for the layer.
std::vector<std::uint32_t> weight_shape(const LayerConfig& layer);

/// Patch matrix (out_h*out_w) x (kh*kw*c) for a conv layer; padded taps are zero.
/// Column order (ky, kx, ci) matches the flattened [out_c, kh, kw, in_c] weights.
MatrixI8 im2col(const FeatureMapI8& input, const LayerConfig& layer);

/// Executes a conv, depthwise or dense layer on the accelerator datapath (im2col + tiled GEMM).
/// Results are scaled by 2^F of `kind`. Throws ShapeMismatch / MethodMismatch / UnsupportedLayer.
FeatureMapI32 conv_execute(const FeatureMapI8& input, const LayerWeights& weights, const LayerConfig& layer,
                           PEKind kind, const TileConfig& tiles = {});
FeatureMapI32 conv_execute(const FeatureMapI8& input, const LayerWeights& weights, const LayerConfig& layer,
                           const AcceleratorConfig& config);

/// Shift-only requantization: round(v / 2^shift) half away from zero, saturated to int8.
std::int8_t requantize_value(std::int32_t v, int shift);

template <typename Derived>
Matrix<std::int8_t> requantize(const Eigen::MatrixBase<Derived>& acc, int shift) {
  return acc.unaryExpr([shift](std::int32_t v) { return requantize_value(v, shift); });
}

struct LayerTiming {
  std::uint64_t macs = 0;
  double compute_cycles = 0;
  double compute_energy_cycles = 0;  ///< compute cycles weighted by the energy-per-MAC factor
  double transfer_cycles = 0;
  std::uint64_t input_bytes = 0;
  std::uint64_t output_bytes = 0;
  std::uint64_t weight_bytes = 0;
  std::uint64_t weight_chunks = 0;           ///< buffer fills needed to hold every weight once
  std::uint64_t weight_transfer_bytes = 0;
  std::uint64_t input_transfer_bytes = 0;
  std::uint64_t transfer_bytes() const noexcept { return input_transfer_bytes + output_bytes + weight_transfer_bytes; }
};

/// Packed weight footprint: ceil(weights * bits / 8).
std::uint64_t packed_weight_bytes(const GemmDims& dims, std::uint32_t weight_bits);

/// Accelerator timing of a conv/dense layer. Weights are split by output rows into buffer-sized
/// chunks and each weight byte crosses the bus once; the input is streamed once per chunk
/// (depthwise chunks need only their own channels, so the input crosses once).
LayerTiming layer_timing(const LayerConfig& layer, const AcceleratorConfig& config, TimingProfile profile);

struct LayerReport {
  std::string name;
  LayerKind kind = LayerKind::Other;
  Placement placement = Placement::Cpu;
  std::uint64_t ops = 0;  ///< MACs for GEMM layers, op_count for OTHER
  double compute_cycles = 0;
  double transfer_cycles = 0;
  std::uint64_t weight_transfer_bytes = 0;
  double time_ms = 0;
  double energy_joules = 0;
};

struct SimReport {
  std::string model;
  PEKind pe_kind = PEKind::ShiftQKeras;
  Placement placement = Placement::Accel;
  TimingProfile profile = TimingProfile::Measured;
  std::vector<LayerReport> layers;
  double accel_cycles = 0;
  double cpu_cycles = 0;
  double time_ms = 0;
  double energy_joules = 0;
  std::optional<FeatureMapI8> output;  ///< final activations when the model carried weights
};

struct ModelLayer {
  LayerConfig config;
  std::optional<LayerWeights> weights;
};

struct Model {
  std::string name;
  std::array<std::uint32_t, 3> input{};  ///< h, w, c
  std::vector<ModelLayer> layers;
  /// Throws MalformedModel for an empty layer list, an invalid layer, or weights on only some layers.
  void validate() const;
  bool has_weights() const noexcept;
};

struct RunOptions {
  Placement placement = Placement::Accel;
  TimingProfile profile = TimingProfile::Measured;
  std::optional<FeatureMapI8> input;  ///< numeric input; random from `seed` when absent
  std::uint64_t seed = 1;
  bool execute = true;  ///< run the numeric path when every GEMM layer has weights
};

/// Times every layer (GEMM layers on the accelerator unless CPU placement is forced, OTHER layers
/// on the CPU) and, for models with weights, executes them bit-exactly, requantizing between
/// layers by F + output_shift. OTHER layers pass activations through unchanged.
SimReport run_model(const Model& model, const AcceleratorConfig& config, const RunOptions& options = {});

/// FNV-1a over the int8 activations, row-major.
std::uint64_t checksum(const FeatureMapI8& fm) noexcept;

inline constexpr std::string_view kReportCsvHeader =
    "layer,kind,placement,ops,compute_cycles,transfer_cycles,weight_transfer_bytes,time_ms,energy_joules";
void write_report_csv(std::ostream& out, const SimReport& report);
std::string report_to_json(const SimReport& report);

}  // namespace potacc
