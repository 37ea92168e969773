//
// Copyright 2026 The potacc Authors
// SPDX-License-Identifier: Apache-2.0
//

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "potacc/accel_sim.hpp"
#include "potacc/cli.hpp"
#include "potacc/potq_io.hpp"
#include "potacc/prng.hpp"
#include "temp_dir.hpp"

using namespace potacc;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "potacc");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p);
  return {std::istreambuf_iterator<char>(f), {}};
}

const std::string kModels = std::string(POTACC_SOURCE_DIR) + "/data/models/";

}  // namespace

TEST_CASE("quantize") {
  TempDir dir;
  write_f32_file(dir / "w.f32", std::vector<float>{0.25f, -0.5f, 0.3f, 0.6f});
  const auto r = run({"quantize", "--input", (dir / "w.f32").string(), "--output", (dir / "w.potq").string(),
                      "--method", "qkeras", "--scale-exp", "-8", "--shape", "2x2"});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("mse") != std::string::npos);
  CHECK(r.out.find("max_abs_error") != std::string::npos);
  const QuantizedTensor q = read_potq(dir / "w.potq");
  CHECK(q.shape() == std::vector<std::uint32_t>{2, 2});
  CHECK(q.scale_exp() == -8);
  CHECK(q.code(0) == WeightCode::qkeras(false, 6));
  CHECK(q.code(1) == WeightCode::qkeras(true, 7));
  CHECK(q.code(2) == WeightCode::qkeras(false, 6));
  CHECK(q.code(3) == WeightCode::qkeras(false, 7));

  SUBCASE("empty tensor") {
    write_f32_file(dir / "e.f32", std::vector<float>{});
    const auto e = run({"quantize", "--input", (dir / "e.f32").string(), "--output", (dir / "e.potq").string(),
                        "--method", "msq"});
    REQUIRE(e.code == 0);
    CHECK(e.out.find("mse 0\n") != std::string::npos);
    CHECK(e.out.find("max_abs_error 0\n") != std::string::npos);
    CHECK(read_potq(dir / "e.potq").empty());
  }

  SUBCASE("levels stay within 2^-8 .. 2^-1") {
    Xorshift64Star rng(6);
    std::vector<float> v(1000);
    for (auto& x : v) x = static_cast<float>(rng.uniform01() - 0.5);
    write_f32_file(dir / "r.f32", v);
    REQUIRE(run({"quantize", "--input", (dir / "r.f32").string(), "--output", (dir / "r.potq").string(), "--method",
                 "qkeras", "--scale-exp", "-8"}).code == 0);
    for (double d : read_potq(dir / "r.potq").dequantize()) {
      CHECK(std::fabs(d) >= std::ldexp(1.0, -8));
      CHECK(std::fabs(d) <= 0.5);
    }
  }

  SUBCASE("int8 PoT weights") {
    write_i8_file(dir / "p.i8", std::vector<std::int8_t>{1, -2, 64, -128});
    const auto p = run({"quantize", "--input", (dir / "p.i8").string(), "--output", (dir / "p.potq").string(),
                        "--from-int8-pot", "--scale-exp", "-8"});
    REQUIRE(p.code == 0);
    CHECK(read_potq(dir / "p.potq").code(3) == WeightCode::qkeras(true, 7));
    write_i8_file(dir / "bad.i8", std::vector<std::int8_t>{4, 3});
    const auto bad = run({"quantize", "--input", (dir / "bad.i8").string(), "--output", (dir / "bad.potq").string(),
                          "--from-int8-pot"});
    CHECK(bad.code == 1);
    CHECK(bad.err.find("NotPoTWeight") != std::string::npos);
    CHECK(bad.err.find("index 1") != std::string::npos);
  }

  CHECK(run({"quantize", "--input", (dir / "nope.f32").string(), "--output", (dir / "x.potq").string()}).code == 2);
  CHECK(run({"quantize", "--input", (dir / "w.f32").string(), "--output", (dir / "x.potq").string(), "--shape",
             "3x3"}).code == 1);
  CHECK(run({"quantize", "--input", (dir / "w.f32").string(), "--output", (dir / "x.potq").string(), "--method",
             "uniform"}).code == 1);
}

TEST_CASE("pe-check") {
  const auto r = run({"pe-check"});
  CHECK(r.code == 0);
  CHECK(r.out.find("PASS shift_qkeras 4096/4096") != std::string::npos);
  CHECK(r.out.find("PASS shift_msq 4096/4096") != std::string::npos);
  CHECK(r.out.find("PASS shift_apot 4096/4096") != std::string::npos);
  CHECK(run({"pe-check", "--method", "uniform"}).out.find("PASS mult_uniform 65536/65536") != std::string::npos);
}

TEST_CASE("bench") {
  TempDir dir;
  const auto r = run({"bench", "--csv", (dir / "s.csv").string(), "--json", (dir / "s.json").string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("27 case(s)") != std::string::npos);
  CHECK(r.out.find("shift_qkeras       1.600x    1.60x") != std::string::npos);
  const std::string csv = slurp(dir / "s.csv");
  CHECK(csv.rfind(std::string(kSuiteCsvHeader) + "\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 4 * 27);
  const auto j = nlohmann::json::parse(slurp(dir / "s.json"));
  REQUIRE(j.size() == 4);
  CHECK(j[2]["kind"] == "shift_apot");
  CHECK(j[2]["average_speedup"].get<double>() == doctest::Approx(1.14));

  const auto analytic = run({"bench", "--profile", "analytic", "--method", "apot"});
  CHECK(analytic.code == 0);
  CHECK(analytic.out.find("note: analytic timing") != std::string::npos);
  CHECK(analytic.out.find("0.667x") != std::string::npos);

  const auto one = run({"bench", "--case", "128x64x256", "--method", "msq", "--verify"});
  CHECK(one.code == 0);
  CHECK(one.out.find("1 case(s)") != std::string::npos);
  CHECK(one.out.find("verify 128x64x256 shift_msq: PASS") != std::string::npos);

  CHECK(run({"bench", "--case", "12x3"}).code == 1);
  CHECK(run({"bench", "--bogus"}).code == 1);
  CHECK(run({"bench", "--profile", "fast"}).code == 1);
  CHECK(run({"bench", "--config", (dir / "missing.json").string()}).code == 2);

  // Config from the environment.
  dir.write("cfg.json", R"({"qkeras.measured_speedup": 2.0})");
  ::setenv("POTACC_CONFIG", (dir / "cfg.json").c_str(), 1);
  const auto env = run({"bench", "--method", "qkeras"});
  ::unsetenv("POTACC_CONFIG");
  CHECK(env.out.find("2.000x") != std::string::npos);
  dir.write("bad.json", R"({"nonsense": 1})");
  CHECK(run({"bench", "--config", (dir / "bad.json").string()}).code == 1);
}

TEST_CASE("run-model") {
  TempDir dir;
  const auto r = run({"run-model", "--model", kModels + "resnet18.json", "--method", "qkeras", "--json",
                      (dir / "r.json").string(), "--csv", (dir / "r.csv").string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("TOTAL") != std::string::npos);
  CHECK(r.out.find("board measurement") != std::string::npos);
  const auto j = nlohmann::json::parse(slurp(dir / "r.json"));
  CHECK(j["model"] == "ResNet18");
  CHECK(j["output"].is_null());
  CHECK(slurp(dir / "r.csv").rfind(std::string(kReportCsvHeader), 0) == 0);

  const auto cpu = run({"run-model", "--model", kModels + "resnet18.json", "--placement", "cpu", "--json",
                        (dir / "c.json").string()});
  REQUIRE(cpu.code == 0);
  const auto jc = nlohmann::json::parse(slurp(dir / "c.json"));
  CHECK(jc["totals"]["accel_cycles"] == 0);
  CHECK(jc["totals"]["time_ms"].get<double>() > j["totals"]["time_ms"].get<double>());

  // Missing weight file: clear message, I/O exit code.
  dir.write("m.json", R"({"name": "m", "layers": [{"kind": "conv2d", "in": [4, 4, 1], "out_channels": 1,
                          "kernel": 1, "weights": "gone.potq"}]})");
  const auto missing = run({"run-model", "--model", (dir / "m.json").string()});
  CHECK(missing.code == 2);
  CHECK(missing.err.find("gone.potq") != std::string::npos);

  CHECK(run({"run-model", "--model", (dir / "none.json").string()}).code == 2);
  CHECK(run({"run-model"}).code == 1);
  CHECK(run({"run-model", "--model", kModels + "resnet18.json", "--unknown-flag"}).code == 1);
}

TEST_CASE("run-model with weights") {
  TempDir dir;
  QuantizedTensor w(Method::Apot, {2, 3, 3, 1}, -4);
  for (std::size_t i = 0; i < w.size(); ++i) w.set_code(i, WeightCode(static_cast<std::uint8_t>(i % 16), Method::Apot));
  write_potq(dir / "w.potq", w);
  dir.write("m.json", R"({"name": "m", "layers": [{"kind": "conv2d", "in": [4, 4, 1], "out_channels": 2,
                          "kernel": 3, "weights": "w.potq"}]})");
  const auto a = run({"run-model", "--model", (dir / "m.json").string(), "--method", "apot", "--seed", "3"});
  const auto b = run({"run-model", "--model", (dir / "m.json").string(), "--method", "apot", "--seed", "3"});
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("output 4x4x2 checksum") != std::string::npos);
  CHECK(run({"run-model", "--model", (dir / "m.json").string(), "--method", "msq"}).code == 1);
}

TEST_CASE("report") {
  TempDir dir;
  const auto r = run({"report", "--model", kModels + "resnet18.json", "--model", kModels + "mobilenetv2.json",
                      "--json", (dir / "r.json").string(), "--csv", (dir / "r.csv").string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("ResNet18") != std::string::npos);
  CHECK(r.out.find("shift vs VM") != std::string::npos);
  CHECK(slurp(dir / "r.csv").find("MobileNetV2") != std::string::npos);
}

TEST_CASE("usage") {
  CHECK(run({"--help"}).code == 0);
  CHECK(run({"frobnicate"}).code == 1);
  CHECK(run({"pe-check", "--method", "int4"}).code == 1);
}
