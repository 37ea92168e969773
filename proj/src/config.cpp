//
// Copyright 2026 The potacc Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "potacc/config.hpp"

#include <functional>
#include <map>
#include <string>
#include <type_traits>

#include "json.hpp"
#include "potacc/error.hpp"
#include "potacc/potq_io.hpp"

namespace potacc {

namespace {

using Json = nlohmann::ordered_json;

// Binds every config key to a field so that loading and saving share one table.
struct Field {
  std::function<void(SimConfig&, const Json&)> load;
  std::function<Json(const SimConfig&)> save;
};

template <typename T, typename Get>
Field bind(Get get) {
  return {[get](SimConfig& c, const Json& v) {
            const bool ok = std::is_same_v<T, bool>        ? v.is_boolean()
                            : std::is_floating_point_v<T> ? v.is_number()
                                                          : v.is_number_unsigned();
            if (!ok) throw Error(ErrorCode::InvalidConfig, "value " + v.dump() + " has the wrong type");
            get(c) = v.get<T>();
          },
          [get](const SimConfig& c) { return Json(get(const_cast<SimConfig&>(c))); }};
}

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = [] {
    std::map<std::string, Field> t;
    t["accel_hz"] = bind<double>([](SimConfig& c) -> double& { return c.accel.cost.clock.accel_hz; });
    t["cpu_hz"] = bind<double>([](SimConfig& c) -> double& { return c.accel.cost.clock.cpu_hz; });
    t["accel_power_watts"] = bind<double>([](SimConfig& c) -> double& { return c.accel.cost.clock.accel_power_watts; });
    t["cpu_power_watts"] = bind<double>([](SimConfig& c) -> double& { return c.accel.cost.clock.cpu_power_watts; });
    t["bus_bytes_per_cycle"] =
        bind<double>([](SimConfig& c) -> double& { return c.accel.cost.clock.bus_bytes_per_cycle; });
    t["dram_joules_per_byte"] = bind<double>([](SimConfig& c) -> double& { return c.accel.cost.dram_joules_per_byte; });
    t["cpu_cycles_per_op"] = bind<double>([](SimConfig& c) -> double& { return c.accel.cost.cpu_cycles_per_op; });
    t["n_gemm_units"] = bind<std::uint32_t>([](SimConfig& c) -> std::uint32_t& { return c.accel.n_gemm_units; });
    t["macs_per_unit"] = bind<std::uint32_t>([](SimConfig& c) -> std::uint32_t& { return c.accel.macs_per_unit; });
    t["weight_buffer_bytes"] =
        bind<std::uint64_t>([](SimConfig& c) -> std::uint64_t& { return c.accel.weight_buffer_bytes; });
    t["overlap_transfer"] = bind<bool>([](SimConfig& c) -> bool& { return c.accel.overlap_transfer; });
    t["tile_m"] = bind<std::uint32_t>([](SimConfig& c) -> std::uint32_t& { return c.accel.tiles.tile_m; });
    t["tile_n"] = bind<std::uint32_t>([](SimConfig& c) -> std::uint32_t& { return c.accel.tiles.tile_n; });
    t["tile_k"] = bind<std::uint32_t>([](SimConfig& c) -> std::uint32_t& { return c.accel.tiles.tile_k; });
    t["per_tile_overhead_cycles"] =
        bind<std::uint32_t>([](SimConfig& c) -> std::uint32_t& { return c.accel.tiles.per_tile_overhead_cycles; });
    t["seed"] = bind<std::uint64_t>([](SimConfig& c) -> std::uint64_t& { return c.seed; });

    static constexpr std::pair<const char*, PEKind> kPrefixes[] = {{"qkeras", PEKind::ShiftQKeras},
                                                                   {"msq", PEKind::ShiftMsq},
                                                                   {"apot", PEKind::ShiftApot},
                                                                   {"uniform", PEKind::MultUniform}};
    for (const auto& [prefix, kind] : kPrefixes) {
      const std::string p = std::string(prefix) + ".";
      const PEKind k = kind;
      t[p + "lut"] = bind<std::uint32_t>([k](SimConfig& c) -> std::uint32_t& { return c.accel.cost.pe(k).lut; });
      t[p + "ff"] = bind<std::uint32_t>([k](SimConfig& c) -> std::uint32_t& { return c.accel.cost.pe(k).ff; });
      t[p + "shift_cycles"] =
          bind<std::uint32_t>([k](SimConfig& c) -> std::uint32_t& { return c.accel.cost.pe(k).shift_cycles; });
      t[p + "measured_speedup"] =
          bind<double>([k](SimConfig& c) -> double& { return c.accel.cost.pe(k).measured_speedup; });
      t[p + "measured_energy_reduction"] =
          bind<double>([k](SimConfig& c) -> double& { return c.accel.cost.pe(k).measured_energy_reduction; });
    }
    return t;
  }();
  return table;
}

}  // namespace

SimConfig config_from_json(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::InvalidConfig, e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "config must be a flat JSON object");

  SimConfig config;
  for (const auto& [key, value] : j.items()) {
    const auto it = fields().find(key);
    if (it == fields().end()) throw Error(ErrorCode::InvalidConfig, "unknown config key '" + key + "'");
    if (value.is_structured() || value.is_null() || value.is_string()) {
      throw Error(ErrorCode::InvalidConfig, "config key '" + key + "' must be a scalar number or boolean");
    }
    try {
      it->second.load(config, value);
    } catch (const std::exception& e) {
      throw Error(ErrorCode::InvalidConfig, "config key '" + key + "': " + e.what());
    }
  }
  config.accel.validate();
  return config;
}

std::string config_to_json(const SimConfig& config) {
  Json j = Json::object();
  for (const auto& [key, field] : fields()) j[key] = field.save(config);
  return j.dump(2);
}

SimConfig load_config(const std::filesystem::path& path) {
  const auto bytes = read_bytes(path);
  return config_from_json(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

}  // namespace potacc
