//
// Copyright 2026 The potacc Authors
// SPDX-License-Identifier: Apache-2.0
//

#include <vector>

#include "doctest.h"
#include "potacc/error.hpp"
#include "potacc/model_io.hpp"
#include "potacc/potq_io.hpp"
#include "potacc/prng.hpp"
#include "temp_dir.hpp"

using namespace potacc;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidConfig;  // sentinel: nothing thrown
}

}  // namespace

TEST_CASE("POTQ byte layout") {
  const QuantizedTensor t = QuantizedTensor::from_codes(
      {3}, std::vector{WeightCode(0x1, Method::Apot), WeightCode(0xA, Method::Apot), WeightCode(0xF, Method::Apot)}, -3);
  const auto bytes = encode_potq(t);
  const std::vector<std::uint8_t> expected = {'P', 'O', 'T', 'Q', 1, 2, 1, 3, 0, 0, 0, 0xFD, 0xA1, 0x0F};
  CHECK(bytes == expected);
  CHECK(decode_potq(bytes) == t);

  const QuantizedTensor empty(Method::Msq, {0}, 0);
  CHECK(decode_potq(encode_potq(empty)) == empty);
  CHECK(encode_potq(empty).size() == 4 + 3 + 4 + 1);
}

TEST_CASE("POTQ round trip") {
  TempDir dir;
  Xorshift64Star rng(8);
  for (int i = 0; i < 200; ++i) {
    const Method m = static_cast<Method>(rng.uniform_int(0, 2));
    std::vector<std::uint32_t> shape(static_cast<std::size_t>(rng.uniform_int(1, 4)));
    for (auto& d : shape) d = static_cast<std::uint32_t>(rng.uniform_int(1, 7));
    QuantizedTensor t(m, shape, static_cast<int>(rng.uniform_int(-10, 3)));
    for (std::size_t j = 0; j < t.size(); ++j) t.set_code(j, WeightCode(static_cast<std::uint8_t>(rng.uniform_int(0, 15)), m));
    write_potq(dir / "t.potq", t);
    const QuantizedTensor back = read_potq(dir / "t.potq");
    REQUIRE(back == t);
    REQUIRE(back.dequantize() == t.dequantize());
  }
}

TEST_CASE("malformed POTQ") {
  const QuantizedTensor t = QuantizedTensor::from_codes({2}, std::vector{WeightCode(1, Method::Msq), WeightCode(2, Method::Msq)}, 0);
  const auto good = encode_potq(t);
  auto mutate = [&](auto fn) {
    auto b = good;
    fn(b);
    return code_of([&] { decode_potq(b); });
  };
  CHECK(mutate([](auto& b) { b[0] = 'X'; }) == ErrorCode::InvalidInput);
  CHECK(mutate([](auto& b) { b[4] = 2; }) == ErrorCode::InvalidInput);
  CHECK(mutate([](auto& b) { b[5] = 3; }) == ErrorCode::InvalidInput);  // uniform has no codes
  CHECK(mutate([](auto& b) { b.pop_back(); }) == ErrorCode::InvalidInput);
  CHECK(mutate([](auto& b) { b.push_back(0); }) == ErrorCode::InvalidInput);
  CHECK(mutate([](auto& b) { b.resize(6); }) == ErrorCode::InvalidInput);
  CHECK(mutate([](auto& b) { b[7] = 9; }) == ErrorCode::InvalidInput);  // dims no longer match payload
  CHECK(code_of([] { read_potq("/nonexistent/dir/x.potq"); }) == ErrorCode::Io);
}

TEST_CASE("raw tensor files") {
  TempDir dir;
  const std::vector<float> f = {0.25f, -1.5f, 3e-8f};
  write_f32_file(dir / "f.bin", f);
  CHECK(read_f32_file(dir / "f.bin") == f);
  CHECK(std::filesystem::file_size(dir / "f.bin") == 12);
  dir.write("bad.bin", "abc");
  CHECK(code_of([&] { read_f32_file(dir / "bad.bin"); }) == ErrorCode::InvalidInput);

  const std::vector<std::int8_t> w = {-128, 0, 127};
  write_i8_file(dir / "w.bin", w);
  CHECK(read_i8_file(dir / "w.bin") == w);
  CHECK(code_of([&] { read_i8_file(dir / "missing.bin"); }) == ErrorCode::Io);
}

TEST_CASE("model loader") {
  TempDir dir;
  const QuantizedTensor w(Method::Msq, {4, 3, 3, 2}, -2);
  write_potq(dir / "c1.potq", w);
  write_i8_file(dir / "fc.bin", std::vector<std::int8_t>(4 * 8 * 8 * 3, 1));

  const auto path = dir.write("m.json", R"({
    "name": "tiny", "input": [8, 8, 2],
    "layers": [
      {"name": "c1", "kind": "conv2d", "in": [8, 8, 2], "out_channels": 4, "kernel": 3,
       "stride": 1, "padding": "same", "output_shift": 1, "weights": "c1.potq", "scale_exp": -2},
      {"name": "relu", "kind": "other", "op_count": 256},
      {"name": "dw", "kind": "depthwise_conv2d", "in": [8, 8, 4], "kernel": [3, 1], "padding": "valid"}
    ]})");
  CHECK(code_of([&] { load_model(path); }) == ErrorCode::MalformedModel);  // weights on only some layers

  const auto timing = dir.write("timing.json", R"({
    "name": "tiny",
    "layers": [
      {"name": "c1", "kind": "conv2d", "in": [8, 8, 2], "out_channels": 4, "kernel": 3},
      {"name": "relu", "kind": "other", "op_count": 256},
      {"name": "dw", "kind": "depthwise_conv2d", "in": [8, 8, 4], "kernel": [3, 1], "padding": "valid", "stride": 2},
      {"name": "fc", "kind": "dense", "in": [3, 4, 4], "out_channels": 10}
    ]})");
  const Model m = load_model(timing);
  CHECK(m.name == "tiny");
  CHECK(m.input == std::array<std::uint32_t, 3>{8, 8, 2});
  REQUIRE(m.layers.size() == 4);
  CHECK(m.layers[1].config.op_count == 256);
  CHECK(m.layers[2].config.out_c == 4);
  CHECK(m.layers[2].config.kernel_h == 3);
  CHECK(m.layers[2].config.kernel_w == 1);
  CHECK(m.layers[2].config.out_h() == 3);
  CHECK_FALSE(m.has_weights());

  const auto full = dir.write("full.json", R"({
    "name": "tiny",
    "layers": [
      {"name": "c1", "kind": "conv2d", "in": [8, 8, 2], "out_channels": 4, "kernel": 3, "weights": "c1.potq", "scale_exp": -2},
      {"name": "fc", "kind": "dense", "in": [8, 8, 4], "out_channels": 3, "weights": "fc.bin"}
    ]})");
  const Model mf = load_model(full);
  CHECK(mf.has_weights());
  CHECK(std::holds_alternative<QuantizedTensor>(*mf.layers[0].weights));
  CHECK(std::holds_alternative<Int8Tensor>(*mf.layers[1].weights));
}

TEST_CASE("model loader errors") {
  TempDir dir;
  write_potq(dir / "c.potq", QuantizedTensor(Method::Msq, {4, 3, 3, 2}, -2));
  const auto load = [&](const std::string& text) { return code_of([&] { model_from_json(text, dir.path()); }); };
  const std::string conv = R"("kind": "conv2d", "in": [8, 8, 2], "out_channels": 4, "kernel": 3)";

  CHECK(load("{") == ErrorCode::MalformedModel);
  CHECK(load("[]") == ErrorCode::MalformedModel);
  CHECK(load(R"({"layers": []})") == ErrorCode::MalformedModel);
  CHECK(load(R"({"layers": [{"kind": "pool"}]})") == ErrorCode::MalformedModel);
  CHECK(load(R"({"layers": [{"kind": "conv2d", "out_channels": 4}]})") == ErrorCode::MalformedModel);
  CHECK(load(R"({"layers": [{"kind": "conv2d", "in": [8, 8], "out_channels": 4}]})") == ErrorCode::MalformedModel);
  CHECK(load(R"({"layers": [{"kind": "conv2d", "in": [8, 0, 2], "out_channels": 4}]})") == ErrorCode::MalformedModel);
  CHECK(load(R"({"layers": [{"kind": "other"}]})") == ErrorCode::MalformedModel);
  CHECK(load(R"({"layers": [{)" + conv + R"(, "padding": "full"}]})") == ErrorCode::MalformedModel);
  CHECK(load(R"({"layers": [{)" + conv + R"(, "weights": "missing.potq"}]})") == ErrorCode::Io);
  CHECK(load(R"({"layers": [{)" + conv + R"(, "weights": "c.potq", "scale_exp": 0}]})") == ErrorCode::MalformedModel);
  CHECK(load(R"({"layers": [{)" + conv + R"(, "weights": "c.potq", "weights_format": "f16"}]})") ==
        ErrorCode::MalformedModel);
  CHECK(load(R"({"layers": [{"kind": "conv2d", "in": [8, 8, 2], "out_channels": 5, "kernel": 3, "weights": "c.potq"}]})") ==
        ErrorCode::ShapeMismatch);
}
