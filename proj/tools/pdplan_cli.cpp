/* Copyright 2026 The pdplan Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Command line frontend over the pdplan C API.
//
// Exit codes (stable interface):
//   0  success
//   1  internal error
//   2  malformed input: bad flags, unreadable or malformed profile files,
//      invalid parameter values
//   3  TTFT target infeasible (prefill)
//   4  TPOT target infeasible (decode)
//
// Results go to standard output, diagnostics and warnings to the error
// stream. All numbers are printed with the shortest round-trip decimal form,
// independent of the process locale.

#include <charconv>
#include <cstdint>
#include <iostream>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "CLI11.hpp"
#include "pdplan/pdplan.h"

namespace {

constexpr double kMtpmPerTps = 60.0 / 1e6;

std::string fmt(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

std::string fmt(long long value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

int exit_code_for(pdplan_status status) {
  switch (status) {
    case PDPLAN_OK:
      return 0;
    case PDPLAN_ERR_INFEASIBLE_SLO_PREFILL:
      return 3;
    case PDPLAN_ERR_INFEASIBLE_SLO_DECODE:
      return 4;
    case PDPLAN_ERR_INTERNAL:
      return 1;
    default:
      return 2;
  }
}

int fail(pdplan_status status) {
  std::cerr << "error: " << pdplan_last_error_message() << "\n";
  return exit_code_for(status);
}

int fail_usage(const std::string& message) {
  std::cerr << "error: " << message << "\n";
  return 2;
}

struct PrefillFree {
  void operator()(pdplan_prefill_profile* p) const {
    pdplan_prefill_profile_free(p);
  }
};
struct DecodeFree {
  void operator()(pdplan_decode_profile* p) const {
    pdplan_decode_profile_free(p);
  }
};
struct PlanFree {
  void operator()(pdplan_plan* p) const { pdplan_plan_free(p); }
};
struct SweepFree {
  void operator()(pdplan_sweep* p) const { pdplan_sweep_free(p); }
};

using PrefillHandle = std::unique_ptr<pdplan_prefill_profile, PrefillFree>;
using DecodeHandle = std::unique_ptr<pdplan_decode_profile, DecodeFree>;
using PlanHandle = std::unique_ptr<pdplan_plan, PlanFree>;
using SweepHandle = std::unique_ptr<pdplan_sweep, SweepFree>;

bool parse_double_field(std::string_view text, double& out) {
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

// "a:b:c" or "a,b,c" style lists of doubles.
bool parse_list(std::string_view text, char sep, std::vector<double>& out) {
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    const std::string_view field =
        pos == std::string_view::npos ? text.substr(start)
                                      : text.substr(start, pos - start);
    double value = 0.0;
    if (!parse_double_field(field, value)) {
      return false;
    }
    out.push_back(value);
    if (pos == std::string_view::npos) {
      return true;
    }
    start = pos + 1;
  }
}

struct PlanningArgs {
  double tpm = 0.0;
  double input_len = 0.0;
  double output_len = 0.0;
  double ttft = 0.0;
  double tpot = 0.0;
  double overhead = 0.0;
  double effective_in = 0.0;  // 0: unset
  std::string prefill_path;
  std::string decode_path;
  std::string policy = "nearest";
  std::string decode_shape;  // "IN:OUT", overrides file metadata
  int np = 0;                // 0: derive from the workload
  int nd = 0;
};

struct SimArgs {
  bool simulate = false;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::uint64_t requests = 20000;
  double warmup = 0.2;
  std::string service = "exp";
};

void add_planning_flags(CLI::App* cmd, PlanningArgs& args) {
  cmd->add_option("--tpm", args.tpm,
                  "target total throughput, M TPM (million tokens/minute)")
      ->required();
  cmd->add_option("--in", args.input_len, "mean input length, tokens")
      ->required();
  cmd->add_option("--out", args.output_len, "mean output length, tokens")
      ->required();
  cmd->add_option("--ttft", args.ttft, "TTFT target, seconds")->required();
  cmd->add_option("--tpot", args.tpot, "TPOT target, seconds")->required();
  cmd->add_option("--overhead", args.overhead,
                  "fixed transfer overhead inside TTFT, seconds");
  cmd->add_option("--effective-in", args.effective_in,
                  "prefix-cache-adjusted prefill length, tokens");
  cmd->add_option("--prefill-profile", args.prefill_path,
                  "prefill profile CSV (input_len,chunk_size,"
                  "max_throughput_tps)")
      ->required();
  cmd->add_option("--decode-profile", args.decode_path,
                  "decode profile CSV (batch,tpot_ms[,throughput_tps])")
      ->required();
  cmd->add_option("--policy", args.policy, "instance rounding policy")
      ->check(CLI::IsMember({"nearest", "ceil"}));
  cmd->add_option("--decode-shape", args.decode_shape,
                  "benchmark shape of the decode profile as IN:OUT tokens, "
                  "overriding file metadata");
  cmd->add_option("--np", args.np,
                  "force the prefill instance count (set --nd too)");
  cmd->add_option("--nd", args.nd,
                  "force the decode instance count (set --np too)");
}

void add_sim_flags(CLI::App* cmd, SimArgs& args, bool optional_simulate) {
  if (optional_simulate) {
    cmd->add_flag("--simulate", args.simulate,
                  "also run the discrete-event simulator per grid point");
  }
  cmd->add_option("--seed", args.seed, "simulation seed (required to simulate)")
      ->each([&args](const std::string&) { args.seed_set = true; });
  cmd->add_option("--sim-requests", args.requests,
                  "simulated requests per grid point");
  cmd->add_option("--warmup", args.warmup,
                  "leading fraction of each run excluded from statistics");
  cmd->add_option("--service", args.service,
                  "prefill service time model: exp (exponential) or det "
                  "(deterministic)")
      ->check(CLI::IsMember({"exp", "det"}));
}

void to_workload(const PlanningArgs& args, pdplan_workload& workload) {
  workload.total_throughput_tps = args.tpm * PDPLAN_TPS_PER_MTPM;
  workload.mean_input_len = args.input_len;
  workload.mean_output_len = args.output_len;
  workload.effective_input_len = args.effective_in;
}

void to_slo(const PlanningArgs& args, pdplan_slo& slo) {
  slo.ttft_target_s = args.ttft;
  slo.tpot_target_s = args.tpot;
  slo.overhead_s = args.overhead;
}

// Loads both profiles and applies the --decode-shape override. Returns
// PDPLAN_OK or the failing status (error message already set).
pdplan_status load_profiles(const PlanningArgs& args, PrefillHandle& prefill,
                            DecodeHandle& decode, std::string& usage_error) {
  pdplan_prefill_profile* prefill_raw = nullptr;
  pdplan_status status =
      pdplan_prefill_profile_from_file(args.prefill_path.c_str(), &prefill_raw);
  if (status != PDPLAN_OK) {
    return status;
  }
  prefill.reset(prefill_raw);

  pdplan_decode_profile* decode_raw = nullptr;
  status = pdplan_decode_profile_from_file(args.decode_path.c_str(),
                                           &decode_raw);
  if (status != PDPLAN_OK) {
    return status;
  }
  decode.reset(decode_raw);

  if (!args.decode_shape.empty()) {
    std::vector<double> shape;
    if (!parse_list(args.decode_shape, ':', shape) || shape.size() != 2) {
      usage_error = "--decode-shape expects IN:OUT, e.g. 6144:512";
      return PDPLAN_ERR_INVALID_ARGUMENT;
    }
    pdplan_decode_profile* reshaped = nullptr;
    status = pdplan_decode_profile_with_shape(decode.get(), shape[0], shape[1],
                                              &reshaped);
    if (status != PDPLAN_OK) {
      return status;
    }
    decode.reset(reshaped);
  }
  return PDPLAN_OK;
}

pdplan_status make_plan(const PlanningArgs& args,
                        const pdplan_workload& workload,
                        const pdplan_slo& slo,
                        const PrefillHandle& prefill,
                        const DecodeHandle& decode, PlanHandle& plan,
                        std::string& usage_error) {
  if ((args.np > 0) != (args.nd > 0)) {
    usage_error = "--np and --nd must be set together";
    return PDPLAN_ERR_INVALID_ARGUMENT;
  }
  pdplan_plan* raw = nullptr;
  pdplan_status status;
  if (args.np > 0) {
    status = pdplan_plan_create_with_counts(&workload, &slo, prefill.get(),
                                            decode.get(), args.np, args.nd,
                                            &raw);
  } else {
    const pdplan_round_policy policy = args.policy == "ceil"
                                           ? PDPLAN_ROUND_CEIL
                                           : PDPLAN_ROUND_NEAREST;
    status = pdplan_plan_create(&workload, &slo, prefill.get(), decode.get(),
                                policy, &raw);
  }
  if (status == PDPLAN_OK) {
    plan.reset(raw);
  }
  return status;
}

void print_warnings(const PlanHandle& plan) {
  const size_t count = pdplan_plan_warning_count(plan.get());
  for (size_t i = 0; i < count; ++i) {
    pdplan_warning_code code;
    const char* message = pdplan_plan_warning(plan.get(), i, &code);
    std::cerr << "warning [" << pdplan_warning_code_name(code)
              << "]: " << message << "\n";
  }
}

int cmd_plan(const PlanningArgs& args) {
  pdplan_workload workload;
  pdplan_slo slo;
  to_workload(args, workload);
  to_slo(args, slo);

  PrefillHandle prefill;
  DecodeHandle decode;
  std::string usage_error;
  pdplan_status status = load_profiles(args, prefill, decode, usage_error);
  if (status != PDPLAN_OK) {
    return usage_error.empty() ? fail(status) : fail_usage(usage_error);
  }

  PlanHandle plan;
  status = make_plan(args, workload, slo, prefill, decode, plan, usage_error);
  if (status != PDPLAN_OK) {
    return usage_error.empty() ? fail(status) : fail_usage(usage_error);
  }

  pdplan_plan_summary s;
  status = pdplan_plan_summary_get(plan.get(), &s);
  if (status != PDPLAN_OK) {
    return fail(status);
  }

  double row_in = 0.0, row_chunk = 0.0, row_tp = 0.0;
  pdplan_prefill_profile_row(prefill.get(), s.selected_prefill_row, &row_in,
                             &row_chunk, &row_tp);
  double min_batch = 0.0, max_batch = 0.0;
  pdplan_decode_min_batch(decode.get(), &min_batch);
  pdplan_decode_max_batch(decode.get(), &max_batch);

  std::cout << "inputs\n"
            << "  demand: " << fmt(args.tpm) << " M TPM ("
            << fmt(workload.total_throughput_tps) << " tok/s)\n"
            << "  request shape: input " << fmt(args.input_len)
            << " tok, output " << fmt(args.output_len) << " tok\n";
  if (args.effective_in > 0.0) {
    std::cout << "  effective prefill length: " << fmt(args.effective_in)
              << " tok\n";
  }
  std::cout << "  slo: ttft <= " << fmt(args.ttft) << " s, tpot <= "
            << fmt(args.tpot) << " s, overhead " << fmt(args.overhead)
            << " s\n"
            << "profiles\n"
            << "  prefill row " << fmt((long long)s.selected_prefill_row)
            << ": input_len " << fmt(row_in) << ", chunk " << fmt(row_chunk)
            << ", max throughput " << fmt(row_tp) << " tok/s\n"
            << "  decode curve: "
            << fmt((long long)pdplan_decode_profile_points(decode.get()))
            << " points, batch " << fmt(min_batch) << ".." << fmt(max_batch)
            << "\n"
            << "derived\n"
            << "  effective prefill throughput: "
            << fmt(s.eff_prefill_throughput_tps) << " tok/s per instance\n"
            << "  decode operating point: batch " << fmt(s.decode_batch)
            << ", throughput " << fmt(s.eff_decode_throughput_tps)
            << " tok/s per instance\n"
            << "  fractional counts: " << fmt(s.frac_prefill) << " prefill, "
            << fmt(s.frac_decode) << " decode\n"
            << "  p:d ratio: " << fmt(s.pd_ratio) << ":1\n"
            << "plan\n"
            << "  deployment: " << fmt((long long)s.n_prefill) << "P"
            << fmt((long long)s.n_decode) << "D\n"
            << "  achievable throughput: "
            << fmt(s.achievable_total_throughput_tps) << " tok/s ("
            << fmt(s.achievable_total_throughput_tps * kMtpmPerTps)
            << " M TPM)\n"
            << "  binding phase: "
            << (s.binding_phase == PDPLAN_PHASE_PREFILL ? "prefill" : "decode")
            << "\n";
  print_warnings(plan);
  return 0;
}

int cmd_sweep(const PlanningArgs& args, const SimArgs& sim,
              const std::string& grid_spec) {
  std::vector<double> spec;
  if (!parse_list(grid_spec, ':', spec) || spec.size() != 3) {
    return fail_usage("--grid expects START:STOP:STEP in M TPM");
  }
  const double start = spec[0], stop = spec[1], step = spec[2];
  if (!(step > 0.0) || !(start >= 0.0) || stop < start) {
    return fail_usage("--grid needs START >= 0, STOP >= START, STEP > 0");
  }
  std::vector<double> grid_tpm;
  for (double v = start; v <= stop + step * 1e-9; v += step) {
    grid_tpm.push_back(v);
  }
  std::vector<double> grid_tps;
  grid_tps.reserve(grid_tpm.size());
  for (const double tpm : grid_tpm) {
    grid_tps.push_back(tpm * PDPLAN_TPS_PER_MTPM);
  }
  if (sim.simulate && !sim.seed_set) {
    return fail_usage("--simulate requires an explicit --seed");
  }

  pdplan_workload workload;
  pdplan_slo slo;
  to_workload(args, workload);
  to_slo(args, slo);

  PrefillHandle prefill;
  DecodeHandle decode;
  std::string usage_error;
  pdplan_status status = load_profiles(args, prefill, decode, usage_error);
  if (status != PDPLAN_OK) {
    return usage_error.empty() ? fail(status) : fail_usage(usage_error);
  }

  PlanHandle plan;
  status = make_plan(args, workload, slo, prefill, decode, plan, usage_error);
  if (status != PDPLAN_OK) {
    return usage_error.empty() ? fail(status) : fail_usage(usage_error);
  }
  print_warnings(plan);

  SweepHandle sweep;
  pdplan_sweep* raw = nullptr;
  if (sim.simulate) {
    pdplan_sim_settings settings;
    pdplan_sim_settings_init(&settings);
    settings.seed = sim.seed;
    settings.requests_per_point = sim.requests;
    settings.warmup_fraction = sim.warmup;
    settings.prefill_service = sim.service == "det"
                                   ? PDPLAN_SERVICE_DETERMINISTIC
                                   : PDPLAN_SERVICE_EXPONENTIAL;
    status = pdplan_sweep_run_simulated(plan.get(), &workload, &slo,
                                        prefill.get(), decode.get(),
                                        grid_tps.data(), grid_tps.size(),
                                        &settings, &raw);
  } else {
    status = pdplan_sweep_run(plan.get(), &workload, &slo, prefill.get(),
                              decode.get(), grid_tps.data(), grid_tps.size(),
                              &raw);
  }
  if (status != PDPLAN_OK) {
    return fail(status);
  }
  sweep.reset(raw);

  std::cout << "tpm,ttft_s,tpot_s,prefill_util,decode_batch,feasible";
  if (sim.simulate) {
    std::cout << ",sim_ttft_mean,sim_ttft_p99,sim_tpot_mean";
  }
  std::cout << "\n";
  for (size_t i = 0; i < pdplan_sweep_size(sweep.get()); ++i) {
    pdplan_sweep_point point;
    status = pdplan_sweep_point_get(sweep.get(), i, &point);
    if (status != PDPLAN_OK) {
      return fail(status);
    }
    std::cout << fmt(grid_tpm[i]) << "," << fmt(point.predicted_ttft_s) << ","
              << fmt(point.predicted_tpot_s) << ","
              << fmt(point.prefill_utilization) << ","
              << fmt(point.decode_batch) << "," << (point.feasible ? 1 : 0);
    if (sim.simulate) {
      pdplan_sim_result r;
      status = pdplan_sweep_sim_get(sweep.get(), i, &r);
      if (status != PDPLAN_OK) {
        return fail(status);
      }
      std::cout << "," << fmt(r.ttft_mean_s) << "," << fmt(r.ttft_p99_s)
                << "," << fmt(r.tpot_mean_s);
    }
    std::cout << "\n";
  }
  return 0;
}

int cmd_validate_mm1(const std::string& prefill_path, double input_len,
                     const std::string& rates_spec,
                     const std::string& rate_grid_spec, double overhead,
                     const SimArgs& sim) {
  std::vector<double> rates;
  if (!rates_spec.empty() && !parse_list(rates_spec, ',', rates)) {
    return fail_usage("--rates expects a comma-separated list, e.g. 1,2,3.5");
  }
  if (!rate_grid_spec.empty()) {
    std::vector<double> spec;
    if (!parse_list(rate_grid_spec, ':', spec) || spec.size() != 3) {
      return fail_usage("--rate-grid expects START:STOP:STEP in req/s");
    }
    const double start = spec[0], stop = spec[1], step = spec[2];
    if (!(step > 0.0) || stop < start) {
      return fail_usage("--rate-grid needs STOP >= START and STEP > 0");
    }
    for (double v = start; v <= stop + step * 1e-9; v += step) {
      rates.push_back(v);
    }
  }
  if (!rates.empty() && !sim.seed_set) {
    return fail_usage("validate-mm1 requires an explicit --seed");
  }

  pdplan_prefill_profile* prefill_raw = nullptr;
  pdplan_status status =
      pdplan_prefill_profile_from_file(prefill_path.c_str(), &prefill_raw);
  if (status != PDPLAN_OK) {
    return fail(status);
  }
  PrefillHandle prefill(prefill_raw);

  size_t row = 0;
  status = pdplan_prefill_profile_select(prefill.get(), input_len, &row);
  if (status != PDPLAN_OK) {
    return fail(status);
  }
  double max_tp = 0.0;
  pdplan_prefill_profile_row(prefill.get(), row, nullptr, nullptr, &max_tp);

  std::vector<pdplan_mm1_row> rows(rates.size());
  if (!rates.empty()) {
    pdplan_sim_settings settings;
    pdplan_sim_settings_init(&settings);
    settings.seed = sim.seed;
    settings.requests_per_point = sim.requests;
    settings.warmup_fraction = sim.warmup;
    status = pdplan_validate_mm1(max_tp, input_len, rates.data(),
                                 rates.size(), overhead, &settings,
                                 rows.data());
    if (status != PDPLAN_OK) {
      return fail(status);
    }
  }

  std::cout << "rate_rps,analytic_ttft_s,sim_ttft_s,rel_err,note\n";
  for (const pdplan_mm1_row& r : rows) {
    std::cout << fmt(r.rate_rps) << "," << fmt(r.analytic_ttft_s) << ","
              << fmt(r.sim_ttft_s) << "," << fmt(r.rel_err) << ","
              << (r.stable ? "" : "unstable") << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"capacity planner for prefill/decode disaggregated serving"};
  app.require_subcommand(1);

  PlanningArgs plan_args;
  CLI::App* plan_cmd = app.add_subcommand(
      "plan", "compute the instance plan for a target load");
  add_planning_flags(plan_cmd, plan_args);

  PlanningArgs sweep_args;
  SimArgs sweep_sim;
  std::string grid_spec;
  CLI::App* sweep_cmd = app.add_subcommand(
      "sweep", "predict TTFT/TPOT across a load grid, CSV on stdout");
  add_planning_flags(sweep_cmd, sweep_args);
  sweep_cmd->add_option("--grid", grid_spec, "load grid START:STOP:STEP, M TPM")
      ->required();
  add_sim_flags(sweep_cmd, sweep_sim, true);

  std::string mm1_prefill_path;
  double mm1_input_len = 0.0;
  std::string mm1_rates;
  std::string mm1_rate_grid;
  double mm1_overhead = 0.0;
  SimArgs mm1_sim;
  CLI::App* mm1_cmd = app.add_subcommand(
      "validate-mm1",
      "compare simulated prefill TTFT with the queueing prediction, CSV on "
      "stdout");
  mm1_cmd->add_option("--prefill-profile", mm1_prefill_path,
                      "prefill profile CSV")
      ->required();
  mm1_cmd->add_option("--in", mm1_input_len, "input length, tokens")
      ->required();
  mm1_cmd->add_option("--rates", mm1_rates,
                      "comma-separated arrival rates, req/s");
  mm1_cmd->add_option("--rate-grid", mm1_rate_grid,
                      "arrival rate grid START:STOP:STEP, req/s");
  mm1_cmd->add_option("--overhead", mm1_overhead,
                      "fixed overhead added to TTFT, seconds");
  add_sim_flags(mm1_cmd, mm1_sim, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (plan_cmd->parsed()) {
    return cmd_plan(plan_args);
  }
  if (sweep_cmd->parsed()) {
    return cmd_sweep(sweep_args, sweep_sim, grid_spec);
  }
  if (mm1_cmd->parsed()) {
    return cmd_validate_mm1(mm1_prefill_path, mm1_input_len, mm1_rates,
                            mm1_rate_grid, mm1_overhead, mm1_sim);
  }
  return 2;
}
