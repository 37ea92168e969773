//
// Copyright 2026 The potacc Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "doctest.h"
#include "potacc/config.hpp"
#include "potacc/cost_model.hpp"
#include "potacc/error.hpp"

using namespace potacc;

TEST_CASE("synthesis constants") {
  CHECK(resource_estimate(PEKind::ShiftQKeras, 1) == ResourceEstimate{33, 0});
  CHECK(resource_estimate(PEKind::ShiftMsq, 1) == ResourceEstimate{89, 17});
  CHECK(resource_estimate(PEKind::ShiftApot, 1) == ResourceEstimate{118, 19});
  CHECK(resource_estimate(PEKind::MultUniform, 1) == ResourceEstimate{41, 0});
  CHECK(resource_estimate(PEKind::ShiftApot, 2) == ResourceEstimate{236, 38});
  CHECK(resource_estimate(PEKind::ShiftMsq, 64) == ResourceEstimate{89 * 64, 17 * 64});
  CHECK_THROWS_AS(resource_estimate(PEKind::MultUniform, 0), Error);

  const CostModel cost;
  CHECK(cost.pe(PEKind::ShiftQKeras).shift_cycles == 1);
  CHECK(cost.pe(PEKind::ShiftMsq).shift_cycles == 2);
  CHECK(cost.pe(PEKind::ShiftApot).shift_cycles == 3);
  CHECK(cost.pe(PEKind::MultUniform).shift_cycles == 2);
  CHECK(cost.base_mac_cycles() == 2);
}

TEST_CASE("timing and energy factors") {
  CHECK(mac_time_factor(PEKind::ShiftQKeras, TimingProfile::Analytic) == 0.5);
  CHECK(mac_time_factor(PEKind::ShiftMsq, TimingProfile::Analytic) == 1.0);
  CHECK(mac_time_factor(PEKind::ShiftApot, TimingProfile::Analytic) == 1.5);
  CHECK(mac_time_factor(PEKind::ShiftQKeras, TimingProfile::Measured) == doctest::Approx(0.625).epsilon(1e-15));
  CHECK(mac_time_factor(PEKind::ShiftMsq, TimingProfile::Measured) == 1 / 1.33);
  CHECK(mac_time_factor(PEKind::MultUniform, TimingProfile::Measured) == 1.0);
  CHECK(mac_time_factor(PEKind::MultUniform, TimingProfile::Analytic) == 1.0);

  CHECK(energy_per_mac_factor(PEKind::ShiftQKeras) == 1 / 1.55);
  CHECK(energy_per_mac_factor(PEKind::ShiftMsq) == 1 / 1.31);
  CHECK(energy_per_mac_factor(PEKind::ShiftApot) == 1 / 1.14);
  CHECK(energy_per_mac_factor(PEKind::MultUniform) == 1.0);
}

TEST_CASE("profiles disagree on ordering") {
  const auto a = [](PEKind k) { return mac_time_factor(k, TimingProfile::Analytic); };
  const auto m = [](PEKind k) { return mac_time_factor(k, TimingProfile::Measured); };
  CHECK(a(PEKind::ShiftQKeras) < a(PEKind::ShiftMsq));
  CHECK(a(PEKind::ShiftMsq) == a(PEKind::MultUniform));
  CHECK(a(PEKind::MultUniform) < a(PEKind::ShiftApot));
  // Measured: every shift PE beats the multiplier.
  CHECK(m(PEKind::ShiftQKeras) < m(PEKind::ShiftMsq));
  CHECK(m(PEKind::ShiftMsq) < m(PEKind::ShiftApot));
  CHECK(m(PEKind::ShiftApot) < m(PEKind::MultUniform));
}

TEST_CASE("profile names") {
  CHECK(parse_profile("analytic") == TimingProfile::Analytic);
  CHECK(parse_profile("measured") == TimingProfile::Measured);
  CHECK_FALSE(parse_profile("fast").has_value());
  CHECK(to_string(TimingProfile::Measured) == "measured");
}

TEST_CASE("validation") {
  CostModel cost;
  CHECK_NOTHROW(cost.validate());
  cost.pe(PEKind::ShiftMsq).measured_speedup = 0;
  CHECK_THROWS_AS(cost.validate(), Error);
  cost = {};
  cost.clock.accel_hz = -1;
  CHECK_THROWS_AS(cost.validate(), Error);
}

TEST_CASE("config round trip and overrides") {
  SimConfig c;
  c.seed = 42;
  c.accel.cost.pe(PEKind::ShiftApot).lut = 120;
  c.accel.cost.clock.bus_bytes_per_cycle = 8;
  c.accel.tiles.tile_k = 32;
  c.accel.overlap_transfer = true;
  const SimConfig back = config_from_json(config_to_json(c));
  CHECK(back.seed == 42);
  CHECK(back.accel.cost == c.accel.cost);
  CHECK(back.accel.tiles == c.accel.tiles);
  CHECK(back.accel.overlap_transfer);

  const SimConfig d = config_from_json(R"({"msq.shift_cycles": 4, "cpu_hz": 1e9})");
  CHECK(d.accel.cost.pe(PEKind::ShiftMsq).shift_cycles == 4);
  CHECK(d.accel.cost.clock.cpu_hz == 1e9);
  CHECK(d.accel.cost.pe(PEKind::ShiftQKeras) == kDefaultPECosts[0]);

  const auto code_of = [](const char* text) {
    try {
      config_from_json(text);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Io;
  };
  CHECK(code_of(R"({"bogus": 1})") == ErrorCode::InvalidConfig);
  CHECK(code_of(R"({"cpu_hz": "fast"})") == ErrorCode::InvalidConfig);
  CHECK(code_of(R"({"cpu_hz": -5})") == ErrorCode::InvalidConfig);
  CHECK(code_of(R"({"tile_m": 0})") == ErrorCode::InvalidConfig);
  CHECK(code_of("[1, 2") == ErrorCode::InvalidConfig);
}
