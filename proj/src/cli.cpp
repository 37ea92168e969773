//
// Copyright 2026 The potacc Authors
// SPDX-License-Identifier: Apache-2.0
//

#include "potacc/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "potacc/accel_sim.hpp"
#include "potacc/config.hpp"
#include "potacc/error.hpp"
#include "potacc/gemm_sim.hpp"
#include "potacc/model_io.hpp"
#include "potacc/pot_codec.hpp"
#include "potacc/potq_io.hpp"
#include "potacc/shift_pe.hpp"

namespace potacc {

namespace {

const std::vector<std::string> kMethodNames = {"qkeras", "msq", "apot", "uniform"};

struct BoardRow {
  double time_ms;
  double energy_j;
};

// End-to-end measurements on the PYNQ board: CPU, VM accelerator, shift accelerator.
const std::map<std::string, std::array<BoardRow, 3>>& board_end_to_end() {
  static const std::map<std::string, std::array<BoardRow, 3>> rows = {
      {"MobileNetV2", {{{362, 0.45}, {247, 0.40}, {239, 0.38}}}},
      {"ResNet18", {{{1027, 1.16}, {530, 0.81}, {361, 0.55}}}},
      {"InceptionV1", {{{821, 0.93}, {321, 0.50}, {270, 0.43}}}},
  };
  return rows;
}

PEKind kind_from_name(const std::string& name) { return pe_kind_for(*parse_method(name)); }

std::vector<PEKind> kinds_from_names(const std::vector<std::string>& names) {
  if (names.empty()) return {std::begin(kAllPEKinds), std::end(kAllPEKinds)};
  std::vector<PEKind> kinds;
  for (const auto& n : names) kinds.push_back(kind_from_name(n));
  return kinds;
}

std::vector<std::uint32_t> parse_shape(const std::string& text) {
  std::vector<std::uint32_t> shape;
  std::string token;
  auto flush = [&] {
    if (token.empty()) throw Error(ErrorCode::InvalidInput, "malformed shape '" + text + "'");
    std::size_t used = 0;
    const unsigned long v = std::stoul(token, &used);
    if (used != token.size()) throw Error(ErrorCode::InvalidInput, "malformed shape '" + text + "'");
    shape.push_back(static_cast<std::uint32_t>(v));
    token.clear();
  };
  for (char ch : text) {
    if (ch == 'x' || ch == 'X' || ch == ',') {
      flush();
    } else {
      token.push_back(ch);
    }
  }
  flush();
  return shape;
}

SimConfig resolve_config(const std::string& path) {
  return path.empty() ? SimConfig{} : load_config(path);
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw Error(ErrorCode::Io, "cannot open " + path + " for writing");
  return f;
}

struct QuantizeArgs {
  std::string input, output, method = "qkeras", shape;
  std::optional<int> scale_exp;
  bool from_int8_pot = false;
};

int cmd_quantize(const QuantizeArgs& a, std::ostream& out) {
  const Method method = *parse_method(a.method);
  if (!is_pot(method)) throw Error(ErrorCode::InvalidInput, "quantize needs a PoT method (qkeras, msq or apot)");
  const int scale_exp = a.scale_exp.value_or(pot_method(method).default_scale_exp);

  std::vector<double> reference;
  QuantizedTensor q;
  if (a.from_int8_pot) {
    if (method != Method::QKeras) throw Error(ErrorCode::InvalidInput, "--from-int8-pot produces QKeras codes");
    const auto raw = read_i8_file(a.input);
    const auto shape = a.shape.empty() ? std::vector<std::uint32_t>{static_cast<std::uint32_t>(raw.size())}
                                       : parse_shape(a.shape);
    const std::vector<std::int32_t> widened(raw.begin(), raw.end());
    q = preprocess_weights(widened, shape, scale_exp);
    for (std::int8_t v : raw) reference.push_back(std::ldexp(static_cast<double>(v), scale_exp));
  } else {
    const auto values = read_f32_file(a.input);
    const auto shape = a.shape.empty() ? std::vector<std::uint32_t>{static_cast<std::uint32_t>(values.size())}
                                       : parse_shape(a.shape);
    q = quantize_tensor(values, shape, method, scale_exp);
    reference.assign(values.begin(), values.end());
  }
  write_potq(a.output, q);

  const auto deq = q.dequantize();
  double sq = 0.0, max_abs = 0.0;
  std::map<double, std::size_t> histogram;
  for (std::size_t i = 0; i < deq.size(); ++i) {
    const double e = std::fabs(reference[i] - deq[i]);
    sq += e * e;
    max_abs = std::max(max_abs, e);
    ++histogram[deq[i]];
  }
  const double mse = deq.empty() ? 0.0 : sq / static_cast<double>(deq.size());
  out << fmt::format("method {} scale 2^{} elements {}\n", pot_method(method).name, scale_exp, q.size());
  out << fmt::format("mse {:.6g}\nmax_abs_error {:.6g}\n", mse, max_abs);
  out << "level histogram:\n";
  for (const auto& [level, count] : histogram) out << fmt::format("  {:>12.8g} {}\n", level, count);
  out << "wrote " << a.output << '\n';
  return kExitOk;
}

int cmd_pe_check(const std::vector<std::string>& methods, std::ostream& out) {
  bool ok = true;
  for (PEKind kind : kinds_from_names(methods)) {
    const PECheckResult r = pe_check(kind);
    out << fmt::format("{} {} {}/{} cases\n", r.passed() ? "PASS" : "FAIL", to_string(kind),
                       r.cases - r.failures.size(), r.cases);
    for (std::size_t i = 0; i < std::min<std::size_t>(r.failures.size(), 20); ++i) {
      const auto& f = r.failures[i];
      out << fmt::format("  act={} code={} kind={} expected={} got={}\n", f.act, f.weight, to_string(f.kind),
                         f.expected, f.actual);
    }
    ok = ok && r.passed();
  }
  return ok ? kExitOk : kExitValidation;
}

struct BenchArgs {
  std::vector<std::string> methods;
  std::string profile = "measured", config, csv, json, bench_case;
  std::uint32_t overhead = 0;
  std::optional<std::uint64_t> seed;
  bool verify = false;
};

// Checks the tiled shift GEMM against an int64 product of decoded levels.
bool verify_case(const BenchmarkCase& c, PEKind kind, const TileConfig& tiles, Xorshift64Star& rng) {
  const MatrixI8 a = random_int8_matrix(c.m, c.k, rng);
  if (!is_shift(kind)) {
    const MatrixI8 w = random_int8_matrix(c.k, c.n, rng);
    const MatrixI64 expected = a.cast<std::int64_t>() * w.cast<std::int64_t>();
    return gemm_execute(a, w, tiles).cast<std::int64_t>() == expected;
  }
  const CodeMatrix w = random_code_matrix(c.k, c.n, rng);
  const Method method = method_of(kind);
  const MatrixI64 levels = w.unaryExpr([method](std::uint8_t raw) {
    return static_cast<std::int64_t>(decode_scaled(WeightCode(raw, method)));
  });
  const MatrixI64 expected = a.cast<std::int64_t>() * levels;
  return gemm_execute(a, w, kind, tiles).cast<std::int64_t>() == expected;
}

int cmd_bench(const BenchArgs& a, std::ostream& out) {
  SimConfig cfg = resolve_config(a.config);
  const std::uint64_t seed = a.seed.value_or(cfg.seed);
  const TimingProfile profile = *parse_profile(a.profile);
  TileConfig tiles = cfg.accel.tiles;
  tiles.per_tile_overhead_cycles = a.overhead;

  std::vector<BenchmarkCase> cases = synthetic_suite();
  if (!a.bench_case.empty()) {
    const auto c = parse_case(a.bench_case);
    if (!c) throw Error(ErrorCode::InvalidInput, "--case expects MxNxK, got '" + a.bench_case + "'");
    cases = {*c};
  }

  std::vector<SuiteResult> results;
  for (PEKind kind : kinds_from_names(a.methods)) results.push_back(run_suite(kind, profile, tiles, cfg.accel.cost, cases));

  out << fmt::format("{} case(s), {} profile, tile {}x{}x{}, overhead {} cycles/tile\n", cases.size(), to_string(profile),
                     tiles.tile_m, tiles.tile_n, tiles.tile_k, tiles.per_tile_overhead_cycles);
  out << fmt::format("{:<14} {:>10} {:>8} {:>12} {:>8} {:>12}\n", "kind", "speedup", "table", "energy_red", "table",
                     "time/MAC");
  for (const auto& r : results) {
    const auto& pe = cfg.accel.cost.pe(r.kind);
    out << fmt::format("{:<14} {:>9.3f}x {:>7.2f}x {:>11.3f}x {:>7.2f}x {:>12.4f}\n", to_string(r.kind),
                       r.average_speedup, pe.measured_speedup, r.average_energy_reduction,
                       pe.measured_energy_reduction, cfg.accel.cost.mac_time_factor(r.kind, profile));
  }
  if (profile == TimingProfile::Analytic) {
    out << "note: analytic timing follows synthesized cycle counts (1/2/3/2), so APoT is slower than the\n"
           "      multiplier here while the measured suite shows it faster; use --profile measured to\n"
           "      reproduce the benchmarked averages.\n";
  }

  int status = kExitOk;
  if (a.verify) {
    Xorshift64Star rng(seed);
    for (const auto& c : cases) {
      for (const auto& r : results) {
        const bool ok = verify_case(c, r.kind, tiles, rng);
        out << fmt::format("verify {} {}: {}\n", to_string(c), to_string(r.kind), ok ? "PASS" : "FAIL");
        if (!ok) status = kExitValidation;
      }
    }
  }

  if (!a.csv.empty()) {
    auto f = open_output(a.csv);
    write_suite_csv(f, results);
  }
  if (!a.json.empty()) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& r : results) {
      j.push_back({{"kind", to_string(r.kind)},
                   {"profile", to_string(r.profile)},
                   {"cases", r.cases.size()},
                   {"average_speedup", r.average_speedup},
                   {"average_energy_reduction", r.average_energy_reduction},
                   {"table_speedup", cfg.accel.cost.pe(r.kind).measured_speedup},
                   {"table_energy_reduction", cfg.accel.cost.pe(r.kind).measured_energy_reduction}});
    }
    open_output(a.json) << j.dump(2) << '\n';
  }
  return status;
}

struct RunModelArgs {
  std::string model, method = "qkeras", profile = "measured", placement = "accel", config, json, csv, input;
  std::optional<std::uint64_t> seed;
};

int cmd_run_model(const RunModelArgs& a, std::ostream& out) {
  SimConfig cfg = resolve_config(a.config);
  cfg.accel.pe_kind = kind_from_name(a.method);
  const Model model = load_model(a.model);

  RunOptions opts;
  opts.placement = *parse_placement(a.placement);
  opts.profile = *parse_profile(a.profile);
  opts.seed = a.seed.value_or(cfg.seed);
  if (!a.input.empty()) {
    auto values = read_i8_file(a.input);
    const auto [h, w, c] = model.input;
    if (values.size() != std::size_t{h} * w * c) {
      throw Error(ErrorCode::ShapeMismatch, fmt::format("{} holds {} values, model input is {}x{}x{}", a.input,
                                                        values.size(), h, w, c));
    }
    opts.input = FeatureMapI8{h, w, c, Eigen::Map<const MatrixI8>(values.data(), Eigen::Index{h} * w, c)};
  }

  const SimReport report = run_model(model, cfg.accel, opts);
  const std::string setup = report.placement == Placement::Cpu ? "CPU" : std::string(to_string(report.pe_kind));
  out << fmt::format("{} on {} ({} profile)\n", report.model, setup, to_string(report.profile));
  out << fmt::format("{:<28} {:>10} {:>12} {:>14} {:>12}\n", "layer", "placement", "time_ms", "energy_J", "wt_bytes");
  for (const auto& l : report.layers) {
    out << fmt::format("{:<28} {:>10} {:>12.4f} {:>14.6f} {:>12}\n", l.name, to_string(l.placement), l.time_ms,
                       l.energy_joules, l.weight_transfer_bytes);
  }
  out << fmt::format("{:<28} {:>10} {:>12.4f} {:>14.6f}\n", "TOTAL", "", report.time_ms, report.energy_joules);
  if (report.output) {
    out << fmt::format("output {}x{}x{} checksum {:016x}\n", report.output->h, report.output->w, report.output->c,
                       checksum(*report.output));
  }
  if (const auto it = board_end_to_end().find(report.model); it != board_end_to_end().end()) {
    const auto& rows = it->second;
    const std::size_t idx = report.placement == Placement::Cpu ? 0 : (report.pe_kind == PEKind::MultUniform ? 1 : 2);
    out << fmt::format("board measurement for this setup: {} ms, {} J\n", rows[idx].time_ms, rows[idx].energy_j);
  }
  if (!a.json.empty()) open_output(a.json) << report_to_json(report) << '\n';
  if (!a.csv.empty()) {
    auto f = open_output(a.csv);
    write_report_csv(f, report);
  }
  return kExitOk;
}

struct ReportArgs {
  std::vector<std::string> models;
  std::string method = "qkeras", profile = "measured", config, csv, json;
};

inline constexpr std::string_view kComparisonCsvHeader =
    "model,setup,time_ms,speedup,energy_joules,energy_reduction,board_time_ms,board_speedup,board_energy_joules,"
    "board_energy_reduction";

int cmd_report(const ReportArgs& a, std::ostream& out) {
  const SimConfig cfg = resolve_config(a.config);
  const PEKind shift_kind = kind_from_name(a.method);
  if (!is_shift(shift_kind)) throw Error(ErrorCode::InvalidInput, "report compares a shift method against the baselines");
  const TimingProfile profile = *parse_profile(a.profile);

  std::string csv = std::string(kComparisonCsvHeader) + "\n";
  nlohmann::ordered_json json = nlohmann::ordered_json::array();
  out << fmt::format("{:<12} {:<14} {:>10} {:>8} {:>10} {:>8} | {:>8} {:>7} {:>7} {:>7}\n", "model", "setup", "time_ms",
                     "speedup", "energy_J", "reduct", "board_ms", "speedup", "board_J", "reduct");
  for (const auto& path : a.models) {
    const Model model = load_model(path);
    RunOptions opts;
    opts.profile = profile;
    opts.execute = false;

    AcceleratorConfig cpu = cfg.accel, vm = cfg.accel, shift = cfg.accel;
    vm.pe_kind = PEKind::MultUniform;
    shift.pe_kind = shift_kind;
    RunOptions cpu_opts = opts;
    cpu_opts.placement = Placement::Cpu;
    const std::array<SimReport, 3> reports = {run_model(model, cpu, cpu_opts), run_model(model, vm, opts),
                                              run_model(model, shift, opts)};
    const std::array<std::string, 3> setups = {"CPU", "VM", "Shift(" + a.method + ")"};
    const auto measured = board_end_to_end().find(model.name);

    for (std::size_t i = 0; i < 3; ++i) {
      const auto& r = reports[i];
      const double speedup = reports[0].time_ms / r.time_ms;
      const double reduction = reports[0].energy_joules / r.energy_joules;
      std::string board = fmt::format("{:>8} {:>7} {:>7} {:>7}", "-", "-", "-", "-");
      std::string board_csv = ",,,";
      nlohmann::ordered_json row = {{"model", model.name},      {"setup", setups[i]},
                                    {"time_ms", r.time_ms},     {"speedup", speedup},
                                    {"energy_joules", r.energy_joules}, {"energy_reduction", reduction}};
      if (measured != board_end_to_end().end()) {
        const auto& p = measured->second[i];
        const double p_speed = measured->second[0].time_ms / p.time_ms;
        const double p_red = measured->second[0].energy_j / p.energy_j;
        board = fmt::format("{:>8.0f} {:>6.2f}x {:>7.2f} {:>6.2f}x", p.time_ms, p_speed, p.energy_j, p_red);
        board_csv = fmt::format("{},{},{},{}", p.time_ms, p_speed, p.energy_j, p_red);
        row["board"] = {{"time_ms", p.time_ms}, {"speedup", p_speed}, {"energy_joules", p.energy_j},
                        {"energy_reduction", p_red}};
      }
      out << fmt::format("{:<12} {:<14} {:>10.3f} {:>7.2f}x {:>10.5f} {:>7.2f}x | {}\n", model.name, setups[i],
                         r.time_ms, speedup, r.energy_joules, reduction, board);
      csv += fmt::format("{},{},{},{},{},{},{}\n", model.name, setups[i], r.time_ms, speedup, r.energy_joules,
                         reduction, board_csv);
      json.push_back(row);
    }
    out << fmt::format("{:<12} shift vs VM: {:.3f}x speedup, {:.3f}x energy reduction\n", model.name,
                       reports[1].time_ms / reports[2].time_ms, reports[1].energy_joules / reports[2].energy_joules);
  }
  out << "board columns are end-to-end PYNQ measurements, shown for reference; the simulator reproduces\n"
         "their ordering, not their absolute values.\n";
  if (!a.csv.empty()) open_output(a.csv) << csv;
  if (!a.json.empty()) open_output(a.json) << json.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"potacc: power-of-two quantized DNN inference on shift-PE accelerators"};
  app.name(args.empty() ? "potacc" : std::filesystem::path(args.front()).filename().string());
  app.require_subcommand(1);

  QuantizeArgs qa;
  auto* quantize = app.add_subcommand("quantize", "quantize a float32 tensor (or int8 PoT weights) to a POTQ file");
  quantize->add_option("--input", qa.input, "raw little-endian float32 file (int8 with --from-int8-pot)")->required();
  quantize->add_option("--output", qa.output, "POTQ output path")->required();
  quantize->add_option("--method", qa.method)->check(CLI::IsMember(kMethodNames))->capture_default_str();
  quantize->add_option("--scale-exp", qa.scale_exp, "tensor scale exponent (default: method default)");
  quantize->add_option("--shape", qa.shape, "tensor shape, e.g. 64x3x3x32 (default: 1-D)");
  quantize->add_flag("--from-int8-pot", qa.from_int8_pot, "input holds int8 PoT weights +-2^0..+-2^7");

  std::vector<std::string> check_methods;
  auto* pe_check_cmd = app.add_subcommand("pe-check", "exhaustive PE datapath sweep against exact products");
  pe_check_cmd->add_option("--method", check_methods)->check(CLI::IsMember(kMethodNames));

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "synthetic GEMM suite against the multiplier baseline");
  bench->add_option("--method", ba.methods, "PE kinds to run (default: all)")->check(CLI::IsMember(kMethodNames));
  bench->add_option("--profile", ba.profile)->check(CLI::IsMember({"analytic", "measured"}))->capture_default_str();
  bench->add_option("--overhead", ba.overhead, "per-tile overhead cycles")->capture_default_str();
  bench->add_option("--seed", ba.seed, "PRNG seed for --verify matrices");
  bench->add_option("--case", ba.bench_case, "run a single MxNxK case");
  bench->add_option("--config", ba.config, "config file")->envname("POTACC_CONFIG");
  bench->add_option("--csv", ba.csv, "per-case CSV output");
  bench->add_option("--json", ba.json, "suite summary JSON output");
  bench->add_flag("--verify", ba.verify, "execute the selected cases bit-exactly and check them");

  RunModelArgs ra;
  auto* run_model_cmd = app.add_subcommand("run-model", "simulate a model description end to end");
  run_model_cmd->add_option("--model", ra.model, "model JSON")->required();
  run_model_cmd->add_option("--method", ra.method)->check(CLI::IsMember(kMethodNames))->capture_default_str();
  run_model_cmd->add_option("--profile", ra.profile)->check(CLI::IsMember({"analytic", "measured"}))->capture_default_str();
  run_model_cmd->add_option("--placement", ra.placement)->check(CLI::IsMember({"accel", "cpu"}))->capture_default_str();
  run_model_cmd->add_option("--config", ra.config, "config file")->envname("POTACC_CONFIG");
  run_model_cmd->add_option("--seed", ra.seed, "PRNG seed for the generated input");
  run_model_cmd->add_option("--input", ra.input, "raw int8 HWC input tensor");
  run_model_cmd->add_option("--json", ra.json, "report JSON output");
  run_model_cmd->add_option("--csv", ra.csv, "report CSV output");

  ReportArgs rp;
  auto* report = app.add_subcommand("report", "CPU / VM / shift-accelerator comparison per model");
  report->add_option("--model", rp.models, "model JSON (repeatable)")->required();
  report->add_option("--method", rp.method, "shift method")->check(CLI::IsMember({"qkeras", "msq", "apot"}))->capture_default_str();
  report->add_option("--profile", rp.profile)->check(CLI::IsMember({"analytic", "measured"}))->capture_default_str();
  report->add_option("--config", rp.config, "config file")->envname("POTACC_CONFIG");
  report->add_option("--csv", rp.csv, "comparison CSV output");
  report->add_option("--json", rp.json, "comparison JSON output");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*quantize) return cmd_quantize(qa, out);
    if (*pe_check_cmd) return cmd_pe_check(check_methods, out);
    if (*bench) return cmd_bench(ba, out);
    if (*run_model_cmd) return cmd_run_model(ra, out);
    if (*report) return cmd_report(rp, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::Io ? kExitIo : kExitValidation;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitValidation;
}

}  // namespace potacc
