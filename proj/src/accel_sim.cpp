//
// Copyright 2026 The potacc Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "potacc/accel_sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <fmt/format.h>

#include "json.hpp"
#include "potacc/error.hpp"

namespace potacc {

std::string_view to_string(LayerKind kind) noexcept {
  switch (kind) {
    case LayerKind::Conv2D: return "conv2d";
    case LayerKind::DepthwiseConv2D: return "depthwise_conv2d";
    case LayerKind::Dense: return "dense";
    case LayerKind::Other: return "other";
  }
  return "unknown";
}

std::string_view to_string(Padding padding) noexcept { return padding == Padding::Same ? "same" : "valid"; }

std::string_view to_string(Placement placement) noexcept { return placement == Placement::Accel ? "accel" : "cpu"; }

std::optional<LayerKind> parse_layer_kind(std::string_view name) noexcept {
  for (LayerKind k : {LayerKind::Conv2D, LayerKind::DepthwiseConv2D, LayerKind::Dense, LayerKind::Other}) {
    if (name == to_string(k)) return k;
  }
  return std::nullopt;
}

std::optional<Padding> parse_padding(std::string_view name) noexcept {
  if (name == "same") return Padding::Same;
  if (name == "valid") return Padding::Valid;
  return std::nullopt;
}

std::optional<Placement> parse_placement(std::string_view name) noexcept {
  if (name == "accel") return Placement::Accel;
  if (name == "cpu") return Placement::Cpu;
  return std::nullopt;
}

namespace {

std::uint64_t ceil_div(std::uint64_t a, std::uint64_t b) { return (a + b - 1) / b; }

std::uint32_t out_extent(std::uint32_t in, std::uint32_t kernel, std::uint32_t stride, Padding padding) {
  if (padding == Padding::Same) return static_cast<std::uint32_t>(ceil_div(in, stride));
  return in < kernel ? 0 : (in - kernel) / stride + 1;
}

std::uint32_t leading_pad(std::uint32_t in, std::uint32_t out, std::uint32_t kernel, std::uint32_t stride,
                          Padding padding) {
  if (padding == Padding::Valid || out == 0) return 0;
  const std::int64_t total = std::int64_t{out - 1} * stride + kernel - in;
  return total > 0 ? static_cast<std::uint32_t>(total / 2) : 0;
}

}  // namespace

std::uint32_t LayerConfig::out_h() const noexcept {
  switch (kind) {
    case LayerKind::Dense: return 1;
    case LayerKind::Other: return in_h;
    default: return out_extent(in_h, kernel_h, stride, padding);
  }
}

std::uint32_t LayerConfig::out_w() const noexcept {
  switch (kind) {
    case LayerKind::Dense: return 1;
    case LayerKind::Other: return in_w;
    default: return out_extent(in_w, kernel_w, stride, padding);
  }
}

std::uint32_t LayerConfig::pad_top() const noexcept {
  return is_gemm_layer() && kind != LayerKind::Dense ? leading_pad(in_h, out_h(), kernel_h, stride, padding) : 0;
}

std::uint32_t LayerConfig::pad_left() const noexcept {
  return is_gemm_layer() && kind != LayerKind::Dense ? leading_pad(in_w, out_w(), kernel_w, stride, padding) : 0;
}

void LayerConfig::validate() const {
  auto fail = [this](const std::string& why) {
    throw Error(ErrorCode::MalformedModel, fmt::format("layer '{}': {}", name, why));
  };
  if (kind == LayerKind::Other) return;
  if (in_h == 0 || in_w == 0 || in_c == 0 || out_c == 0) fail("dimensions must be positive");
  if (kind == LayerKind::Dense) return;
  if (kernel_h == 0 || kernel_w == 0 || stride == 0) fail("kernel and stride must be positive");
  if (padding == Padding::Valid && (kernel_h > in_h || kernel_w > in_w)) fail("kernel larger than VALID input");
  if (kind == LayerKind::DepthwiseConv2D && out_c != in_c) fail("depthwise out_channels must equal in_channels");
}

GemmDims im2col_lower(const LayerConfig& layer) {
  layer.validate();
  const std::uint64_t pixels = std::uint64_t{layer.out_h()} * layer.out_w();
  const std::uint64_t taps = std::uint64_t{layer.kernel_h} * layer.kernel_w;
  switch (layer.kind) {
    case LayerKind::Conv2D: return {layer.out_c, taps * layer.in_c, pixels, 1};
    case LayerKind::DepthwiseConv2D: return {1, taps, pixels, layer.in_c};
    case LayerKind::Dense: return {layer.out_c, std::uint64_t{layer.in_h} * layer.in_w * layer.in_c, 1, 1};
    case LayerKind::Other: break;
  }
  throw Error(ErrorCode::UnsupportedLayer, fmt::format("layer '{}' is not a conv or dense layer", layer.name));
}

void AcceleratorConfig::validate() const {
  if (n_gemm_units == 0 || macs_per_unit == 0) throw Error(ErrorCode::InvalidConfig, "MAC array must be non-empty");
  if (weight_buffer_bytes == 0) throw Error(ErrorCode::InvalidConfig, "weight buffer must be non-empty");
  tiles.validate();
  cost.validate();
}

FeatureMapI8 random_feature_map(std::uint32_t h, std::uint32_t w, std::uint32_t c, Xorshift64Star& rng) {
  return {h, w, c, random_int8_matrix(Eigen::Index{h} * w, c, rng)};
}

std::vector<std::uint32_t> weight_shape(const LayerConfig& layer) {
  switch (layer.kind) {
    case LayerKind::Conv2D: return {layer.out_c, layer.kernel_h, layer.kernel_w, layer.in_c};
    case LayerKind::DepthwiseConv2D: return {layer.kernel_h, layer.kernel_w, layer.in_c};
    case LayerKind::Dense: return {layer.out_c, layer.in_h * layer.in_w * layer.in_c};
    case LayerKind::Other: break;
  }
  throw Error(ErrorCode::UnsupportedLayer, fmt::format("layer '{}' has no weights", layer.name));
}

MatrixI8 im2col(const FeatureMapI8& input, const LayerConfig& layer) {
  const std::uint32_t oh = layer.out_h(), ow = layer.out_w();
  const std::int64_t top = layer.pad_top(), left = layer.pad_left();
  const Eigen::Index k = Eigen::Index{layer.kernel_h} * layer.kernel_w * input.c;
  MatrixI8 patches = MatrixI8::Zero(Eigen::Index{oh} * ow, k);
  for (std::uint32_t oy = 0; oy < oh; ++oy) {
    for (std::uint32_t ox = 0; ox < ow; ++ox) {
      const Eigen::Index row = Eigen::Index{oy} * ow + ox;
      for (std::uint32_t ky = 0; ky < layer.kernel_h; ++ky) {
        const std::int64_t iy = std::int64_t{oy} * layer.stride + ky - top;
        if (iy < 0 || iy >= input.h) continue;
        for (std::uint32_t kx = 0; kx < layer.kernel_w; ++kx) {
          const std::int64_t ix = std::int64_t{ox} * layer.stride + kx - left;
          if (ix < 0 || ix >= input.w) continue;
          const Eigen::Index col = (Eigen::Index{ky} * layer.kernel_w + kx) * input.c;
          patches.row(row).segment(col, input.c) = input.data.row(iy * input.w + ix);
        }
      }
    }
  }
  return patches;
}

namespace {

using WeightMatrix = std::variant<CodeMatrix, MatrixI8>;

// Weight tensor reshaped to (rows x cols) row-major.
WeightMatrix reshape_weights(const LayerWeights& weights, const LayerConfig& layer, PEKind kind, Eigen::Index rows,
                             Eigen::Index cols) {
  if (const auto* q = std::get_if<QuantizedTensor>(&weights)) {
    if (!is_shift(kind) || q->method() != method_of(kind)) {
      throw Error(ErrorCode::MethodMismatch,
                  fmt::format("layer '{}': {} weights on {} PEs", layer.name, to_string(q->method()), to_string(kind)));
    }
    if (q->shape() != weight_shape(layer)) {
      throw Error(ErrorCode::ShapeMismatch, fmt::format("layer '{}': weight shape does not match layer", layer.name));
    }
    CodeMatrix codes(rows, cols);
    for (std::size_t i = 0; i < q->size(); ++i) codes.data()[i] = q->raw(i);
    return codes;
  }
  const auto& t = std::get<Int8Tensor>(weights);
  if (is_shift(kind)) {
    throw Error(ErrorCode::MethodMismatch,
                fmt::format("layer '{}': int8 weights on {} PEs", layer.name, to_string(kind)));
  }
  if (t.shape != weight_shape(layer) || t.values.size() != static_cast<std::size_t>(rows * cols)) {
    throw Error(ErrorCode::ShapeMismatch, fmt::format("layer '{}': weight shape does not match layer", layer.name));
  }
  return MatrixI8(Eigen::Map<const MatrixI8>(t.values.data(), rows, cols));
}

MatrixI32 run_gemm(const MatrixI8& a, const WeightMatrix& w, PEKind kind, const TileConfig& tiles) {
  if (const auto* codes = std::get_if<CodeMatrix>(&w)) return gemm_execute(a, *codes, kind, tiles);
  return gemm_execute(a, std::get<MatrixI8>(w), tiles);
}

WeightMatrix column_of(const WeightMatrix& w, Eigen::Index col) {
  return std::visit([col](const auto& m) -> WeightMatrix {
    using M = std::decay_t<decltype(m)>;
    return M(m.col(col));
  }, w);
}

WeightMatrix transposed(const WeightMatrix& w) {
  return std::visit([](const auto& m) -> WeightMatrix {
    using M = std::decay_t<decltype(m)>;
    return M(m.transpose());
  }, w);
}

}  // namespace

FeatureMapI32 conv_execute(const FeatureMapI8& input, const LayerWeights& weights, const LayerConfig& layer,
                           PEKind kind, const TileConfig& tiles) {
  layer.validate();
  if (layer.kind == LayerKind::Other) {
    throw Error(ErrorCode::UnsupportedLayer, fmt::format("layer '{}' is not a conv or dense layer", layer.name));
  }
  const GemmDims dims = im2col_lower(layer);

  if (layer.kind == LayerKind::Dense) {
    const auto k = static_cast<Eigen::Index>(dims.k);
    if (std::uint64_t{input.h} * input.w * input.c != dims.k) {
      throw Error(ErrorCode::ShapeMismatch, fmt::format("layer '{}': dense input has {} elements, expected {}",
                                                        layer.name, input.data.size(), dims.k));
    }
    const MatrixI8 flat = Eigen::Map<const MatrixI8>(input.data.data(), 1, k);
    const WeightMatrix w = transposed(reshape_weights(weights, layer, kind, layer.out_c, k));
    return {1, 1, layer.out_c, run_gemm(flat, w, kind, tiles)};
  }

  if (input.h != layer.in_h || input.w != layer.in_w || input.c != layer.in_c) {
    throw Error(ErrorCode::ShapeMismatch, fmt::format("layer '{}': input is {}x{}x{}, expected {}x{}x{}", layer.name,
                                                      input.h, input.w, input.c, layer.in_h, layer.in_w, layer.in_c));
  }
  const std::uint32_t oh = layer.out_h(), ow = layer.out_w();

  if (layer.kind == LayerKind::Conv2D) {
    const WeightMatrix w =
        transposed(reshape_weights(weights, layer, kind, layer.out_c, static_cast<Eigen::Index>(dims.k)));
    return {oh, ow, layer.out_c, run_gemm(im2col(input, layer), w, kind, tiles)};
  }

  // Depthwise: one single-channel GEMM per channel.
  const WeightMatrix w = reshape_weights(weights, layer, kind, static_cast<Eigen::Index>(dims.k), layer.in_c);
  FeatureMapI32 out = FeatureMapI32::zeros(oh, ow, layer.out_c);
  LayerConfig single = layer;
  single.in_c = single.out_c = 1;
  for (std::uint32_t ch = 0; ch < layer.in_c; ++ch) {
    const FeatureMapI8 plane{input.h, input.w, 1, input.data.col(ch)};
    out.data.col(ch) = run_gemm(im2col(plane, single), column_of(w, ch), kind, tiles);
  }
  return out;
}

FeatureMapI32 conv_execute(const FeatureMapI8& input, const LayerWeights& weights, const LayerConfig& layer,
                           const AcceleratorConfig& config) {
  return conv_execute(input, weights, layer, config.pe_kind, config.tiles);
}

std::int8_t requantize_value(std::int32_t v, int shift) {
  if (shift < 0 || shift > 31) throw Error(ErrorCode::InvalidInput, "requantization shift must be in 0..31");
  std::int64_t mag = std::abs(static_cast<std::int64_t>(v));
  if (shift > 0) mag = (mag + (std::int64_t{1} << (shift - 1))) >> shift;
  const std::int64_t q = v < 0 ? -mag : mag;
  return static_cast<std::int8_t>(std::clamp<std::int64_t>(q, -128, 127));
}

std::uint64_t packed_weight_bytes(const GemmDims& dims, std::uint32_t weight_bits) {
  return ceil_div(dims.m * dims.k * dims.groups * weight_bits, 8);
}

LayerTiming layer_timing(const LayerConfig& layer, const AcceleratorConfig& config, TimingProfile profile) {
  config.validate();
  const GemmDims dims = im2col_lower(layer);
  const CostModel& cost = config.cost;
  const TileConfig& tiles = config.tiles;
  const std::uint32_t bits = config.weight_bits();

  LayerTiming t;
  t.macs = dims.macs();
  const auto slots = static_cast<double>(ceil_div(dims.m * dims.k * dims.n, config.total_macs()));
  const auto overhead = static_cast<double>(tile_count(dims.m, dims.n, dims.k, tiles)) * tiles.per_tile_overhead_cycles;
  const auto groups = static_cast<double>(dims.groups);
  t.compute_cycles = groups * (slots * cost.base_mac_cycles() * cost.mac_time_factor(config.pe_kind, profile) + overhead);
  t.compute_energy_cycles =
      groups * (slots * cost.base_mac_cycles() * cost.energy_per_mac_factor(config.pe_kind) + overhead);

  t.weight_bytes = packed_weight_bytes(dims, bits);
  const std::uint64_t rows = dims.m * dims.groups;
  const std::uint64_t row_bytes = ceil_div(dims.k * bits, 8);
  if (row_bytes <= config.weight_buffer_bytes) {
    t.weight_chunks = ceil_div(rows, config.weight_buffer_bytes / row_bytes);
  } else {
    t.weight_chunks = rows * ceil_div(row_bytes, config.weight_buffer_bytes);
  }
  t.weight_transfer_bytes = t.weight_bytes;

  t.input_bytes = std::uint64_t{layer.in_h} * layer.in_w * layer.in_c;
  t.output_bytes = std::uint64_t{layer.out_h()} * layer.out_w() * layer.out_c;
  t.input_transfer_bytes =
      layer.kind == LayerKind::DepthwiseConv2D ? t.input_bytes : t.input_bytes * t.weight_chunks;
  t.transfer_cycles = std::ceil(static_cast<double>(t.transfer_bytes()) / cost.clock.bus_bytes_per_cycle);
  return t;
}

bool Model::has_weights() const noexcept {
  return std::any_of(layers.begin(), layers.end(), [](const ModelLayer& l) { return l.weights.has_value(); });
}

void Model::validate() const {
  if (layers.empty()) throw Error(ErrorCode::MalformedModel, fmt::format("model '{}' has no layers", name));
  bool any = false, all = true;
  for (const auto& l : layers) {
    l.config.validate();
    if (!l.config.is_gemm_layer()) {
      if (l.weights) throw Error(ErrorCode::MalformedModel, fmt::format("layer '{}' cannot carry weights", l.config.name));
      continue;
    }
    any = any || l.weights.has_value();
    all = all && l.weights.has_value();
  }
  if (any && !all) {
    throw Error(ErrorCode::MalformedModel, fmt::format("model '{}': weights given for only some layers", name));
  }
}

SimReport run_model(const Model& model, const AcceleratorConfig& config, const RunOptions& options) {
  model.validate();
  config.validate();
  const CostModel& cost = config.cost;

  SimReport report;
  report.model = model.name;
  report.pe_kind = config.pe_kind;
  report.placement = options.placement;
  report.profile = options.profile;

  std::optional<FeatureMapI8> act;
  if (options.execute && model.has_weights()) {
    if (options.input) {
      act = options.input;
    } else {
      Xorshift64Star rng(options.seed);
      act = random_feature_map(model.input[0], model.input[1], model.input[2], rng);
    }
    if (act->h != model.input[0] || act->w != model.input[1] || act->c != model.input[2]) {
      throw Error(ErrorCode::ShapeMismatch, fmt::format("model '{}': input tensor does not match model input", model.name));
    }
  }

  for (const auto& ml : model.layers) {
    const LayerConfig& layer = ml.config;
    LayerReport r{layer.name, layer.kind};

    const bool on_accel = layer.is_gemm_layer() && options.placement == Placement::Accel;
    if (on_accel) {
      const LayerTiming t = layer_timing(layer, config, options.profile);
      r.placement = Placement::Accel;
      r.ops = t.macs;
      r.compute_cycles = t.compute_cycles;
      r.transfer_cycles = t.transfer_cycles;
      r.weight_transfer_bytes = t.weight_transfer_bytes;
      const double cycles = config.overlap_transfer ? std::max(t.compute_cycles, t.transfer_cycles)
                                                    : t.compute_cycles + t.transfer_cycles;
      r.time_ms = cycles / cost.clock.accel_hz * 1e3;
      r.energy_joules = (t.compute_energy_cycles + t.transfer_cycles) / cost.clock.accel_hz *
                            cost.clock.accel_power_watts +
                        static_cast<double>(t.transfer_bytes()) * cost.dram_joules_per_byte;
      report.accel_cycles += cycles;
    } else {
      r.placement = Placement::Cpu;
      r.ops = layer.is_gemm_layer() ? im2col_lower(layer).macs() : layer.op_count;
      r.compute_cycles = static_cast<double>(r.ops) * cost.cpu_cycles_per_op;
      r.time_ms = r.compute_cycles / cost.clock.cpu_hz * 1e3;
      r.energy_joules = r.compute_cycles / cost.clock.cpu_hz * cost.clock.cpu_power_watts;
      report.cpu_cycles += r.compute_cycles;
    }
    report.time_ms += r.time_ms;
    report.energy_joules += r.energy_joules;
    report.layers.push_back(std::move(r));

    if (act && layer.is_gemm_layer()) {
      const FeatureMapI32 acc = conv_execute(*act, *ml.weights, layer, config.pe_kind, config.tiles);
      act = FeatureMapI8{acc.h, acc.w, acc.c, requantize(acc.data, fraction_bits(config.pe_kind) + layer.output_shift)};
    }
  }
  report.output = std::move(act);
  return report;
}

std::uint64_t checksum(const FeatureMapI8& fm) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (Eigen::Index i = 0; i < fm.data.size(); ++i) {
    h ^= static_cast<std::uint8_t>(fm.data.data()[i]);
    h *= 0x100000001b3ULL;
  }
  return h;
}

void write_report_csv(std::ostream& out, const SimReport& report) {
  out << kReportCsvHeader << '\n';
  std::uint64_t ops = 0, wbytes = 0;
  double compute = 0, transfer = 0;
  for (const auto& l : report.layers) {
    out << fmt::format("{},{},{},{},{},{},{},{},{}\n", l.name, to_string(l.kind), to_string(l.placement), l.ops,
                       l.compute_cycles, l.transfer_cycles, l.weight_transfer_bytes, l.time_ms, l.energy_joules);
    ops += l.ops;
    wbytes += l.weight_transfer_bytes;
    compute += l.compute_cycles;
    transfer += l.transfer_cycles;
  }
  out << fmt::format("TOTAL,,,{},{},{},{},{},{}\n", ops, compute, transfer, wbytes, report.time_ms,
                     report.energy_joules);
}

std::string report_to_json(const SimReport& report) {
  nlohmann::ordered_json j;
  j["model"] = report.model;
  j["pe_kind"] = to_string(report.pe_kind);
  j["placement"] = to_string(report.placement);
  j["profile"] = to_string(report.profile);
  auto& layers = j["layers"] = nlohmann::ordered_json::array();
  for (const auto& l : report.layers) {
    layers.push_back({{"name", l.name},
                      {"kind", to_string(l.kind)},
                      {"placement", to_string(l.placement)},
                      {"ops", l.ops},
                      {"compute_cycles", l.compute_cycles},
                      {"transfer_cycles", l.transfer_cycles},
                      {"weight_transfer_bytes", l.weight_transfer_bytes},
                      {"time_ms", l.time_ms},
                      {"energy_joules", l.energy_joules}});
  }
  j["totals"] = {{"accel_cycles", report.accel_cycles},
                 {"cpu_cycles", report.cpu_cycles},
                 {"time_ms", report.time_ms},
                 {"energy_joules", report.energy_joules}};
  if (report.output) {
    j["output"] = {{"shape", {report.output->h, report.output->w, report.output->c}},
                   {"checksum", fmt::format("{:016x}", checksum(*report.output))}};
  } else {
    j["output"] = nullptr;
  }
  return j.dump(2);
}

}  // namespace potacc
