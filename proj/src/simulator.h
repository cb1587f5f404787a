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

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "decode_curve.h"
#include "planner.h"
#include "types.h"

// Discrete-event simulation of the disaggregated pipeline, used to validate
// the analytic predictions at desk scale. Poisson arrivals are routed to
// prefill instances by uniform random choice (random splitting keeps each
// per-instance stream Poisson); each prefill instance serves one request at a
// time FIFO; a completed prefill incurs the KV transfer delay and then joins
// the least-loaded decode instance; decode instances run step-synchronized
// continuous batching with step durations taken from the measured TPOT curve.
//
// A run is strictly sequential and bit-deterministic for a given config and
// seed. Independent runs derive their RNG streams from (seed, run index).

namespace pdplan::sim {

enum class ServiceModel { exponential, deterministic };

struct SimConfig {
  int n_prefill = 1;
  int n_decode = 1;
  double arrival_rate_rps = 0.0;  // aggregate Poisson rate
  double input_len = 1.0;         // tokens; accounting only
  int output_len = 1;             // decode steps per request
  ServiceModel prefill_service = ServiceModel::exponential;
  double prefill_service_mean_s = 0.0;  // input_len / max prefill throughput
  double kv_transfer_delay_s = 0.0;
  double decode_batch_cap = 0.0;  // <= 0: uncapped
  std::uint64_t seed = 0;
  // Horizons: at least one must be set. max_requests bounds the number of
  // arrivals; max_sim_time_s cuts off the arrival process. The run always
  // drains in-flight requests afterwards.
  std::uint64_t max_requests = 0;
  double max_sim_time_s = 0.0;
  double warmup_fraction = 0.2;  // leading fraction excluded from statistics
};

struct SimResult {
  double ttft_mean_s = 0.0;
  double ttft_p50_s = 0.0;
  double ttft_p99_s = 0.0;
  double tpot_mean_s = 0.0;
  std::uint64_t completed_requests = 0;  // whole run, full pipeline
  double total_token_throughput_tps = 0.0;
  double prefill_utilization = 0.0;  // busy-time fraction per instance
  double decode_utilization = 0.0;
  double mean_prefill_queue_len = 0.0;  // waiting + in service, time-averaged
  // Prefill-only sojourn (TTFT minus the KV delay), with a 95% batch-means
  // confidence half-width for the mean.
  double sojourn_mean_s = 0.0;
  double sojourn_ci_halfwidth_s = 0.0;
  double measured_arrival_rate_rps = 0.0;
  double measurement_time_s = 0.0;
  std::uint64_t counted_requests = 0;
  bool overloaded = false;  // per-instance lambda >= mu; throughput only
  std::string rng_name;     // generator identity, for cross-implementation
                            // statistical reproduction
};

SimResult run_sim(const SimConfig& config, const decode::DecodeCurve& curve);

struct SimSettings {
  std::uint64_t seed = 0;
  std::uint64_t requests_per_point = 20000;
  double warmup_fraction = 0.2;
  ServiceModel prefill_service = ServiceModel::exponential;
};

struct Mm1Row {
  double rate_rps = 0.0;
  double analytic_ttft_s = 0.0;  // 1/(mu - lambda) + overhead
  double sim_ttft_s = 0.0;
  double rel_err = 0.0;
  bool stable = true;  // unstable rates are flagged, not simulated
};

// Single-prefill-instance comparison of simulated TTFT against the M/M/1
// prediction over a grid of arrival rates. Service is exponential here; that
// is the assumption being validated.
std::vector<Mm1Row> validate_against_mm1(const PrefillProfile& profile,
                                         double input_len,
                                         std::span<const double> rates_rps,
                                         double overhead_s,
                                         const SimSettings& settings);

struct SweepComparison {
  planner::SweepPoint analytic;
  SimResult simulated;
};

// Pairs each analytic sweep point with a simulated measurement of the same
// deployment at the same load.
std::vector<SweepComparison> simulate_sweep(
    const AllocationPlan& plan, const WorkloadSpec& workload,
    const SloSpec& slo, const PrefillProfile& prefill,
    const decode::DecodeCurve& curve, std::span<const double> grid_tps,
    const SimSettings& settings);

// Stream seed for run `run_index` of a family seeded with `seed`.
std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t run_index);

// Generator identity recorded in every SimResult.
const char* rng_name();

}  // namespace pdplan::sim
