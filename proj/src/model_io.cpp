//
// Copyright 2026 The potacc Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "potacc/model_io.hpp"

#include <string>

#include <fmt/format.h>

#include "json.hpp"
#include "potacc/error.hpp"
#include "potacc/potq_io.hpp"

namespace potacc {

namespace {

using Json = nlohmann::json;

[[noreturn]] void malformed(const std::string& what) { throw Error(ErrorCode::MalformedModel, what); }

std::uint32_t positive(const Json& v, const std::string& what) {
  if (!v.is_number_unsigned() || v.get<std::uint64_t>() == 0 || v.get<std::uint64_t>() > 0xFFFFFFFFULL) {
    malformed(what + " must be a positive integer");
  }
  return v.get<std::uint32_t>();
}

std::array<std::uint32_t, 3> dims3(const Json& v, const std::string& what) {
  if (!v.is_array() || v.size() != 3) malformed(what + " must be [h, w, c]");
  return {positive(v[0], what), positive(v[1], what), positive(v[2], what)};
}

LayerWeights load_weights(const Json& rec, const LayerConfig& layer, const std::filesystem::path& base_dir) {
  const auto path = base_dir / rec.at("weights").get<std::string>();
  std::string format = rec.value("weights_format", path.extension() == ".potq" ? "potq" : "int8");
  if (format == "potq") {
    QuantizedTensor q = read_potq(path);
    if (q.shape() != weight_shape(layer)) {
      throw Error(ErrorCode::ShapeMismatch,
                  fmt::format("layer '{}': {} does not have the layer's weight shape", layer.name, path.string()));
    }
    if (rec.contains("scale_exp") && rec["scale_exp"].get<int>() != q.scale_exp()) {
      malformed(fmt::format("layer '{}': scale_exp {} differs from {} in {}", layer.name, rec["scale_exp"].get<int>(),
                            q.scale_exp(), path.string()));
    }
    return q;
  }
  if (format == "int8") {
    Int8Tensor t{weight_shape(layer), read_i8_file(path)};
    if (t.values.size() != element_count(t.shape)) {
      throw Error(ErrorCode::ShapeMismatch, fmt::format("layer '{}': {} holds {} weights, expected {}", layer.name,
                                                        path.string(), t.values.size(), element_count(t.shape)));
    }
    return t;
  }
  malformed(fmt::format("layer '{}': unknown weights_format '{}'", layer.name, format));
}

ModelLayer parse_layer(const Json& rec, std::size_t index, const std::filesystem::path& base_dir) {
  if (!rec.is_object()) malformed(fmt::format("layer {} is not an object", index));
  ModelLayer ml;
  LayerConfig& l = ml.config;
  l.name = rec.value("name", fmt::format("layer{}", index));
  const auto kind = parse_layer_kind(rec.value("kind", ""));
  if (!kind) malformed(fmt::format("layer '{}': unknown kind '{}'", l.name, rec.value("kind", "")));
  l.kind = *kind;

  if (rec.contains("in")) {
    const auto d = dims3(rec["in"], "layer '" + l.name + "' in");
    l.in_h = d[0];
    l.in_w = d[1];
    l.in_c = d[2];
  } else if (l.kind != LayerKind::Other) {
    malformed(fmt::format("layer '{}': missing 'in'", l.name));
  }

  if (l.kind == LayerKind::Other) {
    if (!rec.contains("op_count") || !rec["op_count"].is_number_unsigned()) {
      malformed(fmt::format("layer '{}': other layers need a nonnegative op_count", l.name));
    }
    l.op_count = rec["op_count"].get<std::uint64_t>();
  } else {
    l.out_c = l.kind == LayerKind::DepthwiseConv2D && !rec.contains("out_channels")
                  ? l.in_c
                  : positive(rec.value("out_channels", Json()), "layer '" + l.name + "' out_channels");
    if (rec.contains("kernel")) {
      const Json& k = rec["kernel"];
      if (k.is_array()) {
        if (k.size() != 2) malformed(fmt::format("layer '{}': kernel must be k or [kh, kw]", l.name));
        l.kernel_h = positive(k[0], "kernel");
        l.kernel_w = positive(k[1], "kernel");
      } else {
        l.kernel_h = l.kernel_w = positive(k, "kernel");
      }
    }
    if (rec.contains("stride")) l.stride = positive(rec["stride"], "stride");
    const auto padding = parse_padding(rec.value("padding", "same"));
    if (!padding) malformed(fmt::format("layer '{}': padding must be same or valid", l.name));
    l.padding = *padding;
    if (rec.contains("output_shift")) {
      if (!rec["output_shift"].is_number_unsigned()) malformed("output_shift must be a nonnegative integer");
      l.output_shift = rec["output_shift"].get<int>();
    }
  }
  l.validate();
  if (rec.contains("weights")) {
    if (l.kind == LayerKind::Other) malformed(fmt::format("layer '{}': other layers carry no weights", l.name));
    ml.weights = load_weights(rec, l, base_dir);
  }
  return ml;
}

}  // namespace

Model model_from_json(std::string_view text, const std::filesystem::path& base_dir) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    malformed(e.what());
  }
  if (!j.is_object()) malformed("model must be a JSON object");
  Model model;
  try {
    model.name = j.value("name", "model");
    if (!j.contains("layers") || !j["layers"].is_array()) malformed("model needs a 'layers' array");
    for (std::size_t i = 0; i < j["layers"].size(); ++i) model.layers.push_back(parse_layer(j["layers"][i], i, base_dir));
    if (j.contains("input")) {
      model.input = dims3(j["input"], "input");
    } else if (!model.layers.empty()) {
      const auto& first = model.layers.front().config;
      model.input = {first.in_h, first.in_w, first.in_c};
    }
  } catch (const Json::exception& e) {
    malformed(e.what());
  }
  model.validate();
  return model;
}

Model load_model(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  return model_from_json(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()),
                         path.parent_path());
}

}  // namespace potacc
