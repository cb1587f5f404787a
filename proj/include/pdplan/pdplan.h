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

/*
 * pdplan: capacity planning for prefill/decode-disaggregated LLM serving.
 *
 * Sizes a deployment (how many prefill and how many decode instances) so that
 * a target aggregate token throughput is met while staying inside latency
 * SLOs. Prefill is modeled as an M/M/1 queue per instance, which turns the
 * TTFT target into an effective prefill throughput; the TPOT target is looked
 * up on a benchmarked TPOT-vs-batch curve to get the effective decode
 * throughput; the two together fix the instance counts and the P:D ratio. A
 * discrete-event simulator replays the same deployment to validate the
 * analytic predictions.
 *
 * Conventions:
 *  - Throughputs are tokens/second, times are seconds, lengths are tokens,
 *    request rates are requests/second. Multiply tokens/second by
 *    60/1e6 to get M TPM (million tokens per minute).
 *  - Functions returning pdplan_status write outputs through pointers only on
 *    PDPLAN_OK. On failure, pdplan_last_error_message() describes the error
 *    for the calling thread.
 *  - Objects returned through pdplan_*_create / _from_file / _from_string
 *    are owned by the caller and released with the matching pdplan_*_free.
 *    Freeing NULL is a no-op. Handles are immutable after creation and safe
 *    to share across threads.
 */

#ifndef PDPLAN_H
#define PDPLAN_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define PDPLAN_API __declspec(dllexport)
#else
#define PDPLAN_API __attribute__((visibility("default")))
#endif

/* tokens/second per M TPM: 1e6 tokens / 60 seconds. */
#define PDPLAN_TPS_PER_MTPM (1e6 / 60.0)

typedef enum pdplan_status {
  PDPLAN_OK = 0,
  /* A precondition on an argument failed. */
  PDPLAN_ERR_INVALID_ARGUMENT = 1,
  /* Arrival rate at or above the service rate; the queue has no steady
     state. */
  PDPLAN_ERR_UNSTABLE_QUEUE = 2,
  /* The TTFT target is not reachable even at zero load. */
  PDPLAN_ERR_INFEASIBLE_SLO_PREFILL = 3,
  /* The TPOT target is below the fastest measured decode step. */
  PDPLAN_ERR_INFEASIBLE_SLO_DECODE = 4,
  /* A profile file or curve violates its format or monotonicity contract. */
  PDPLAN_ERR_MALFORMED_PROFILE = 5,
  /* A profile file could not be opened or read. */
  PDPLAN_ERR_IO = 6,
  /* Evaluation outside the measured batch range. */
  PDPLAN_ERR_OUT_OF_RANGE = 7,
  /* Unexpected internal failure (allocation, logic error). */
  PDPLAN_ERR_INTERNAL = 8,
} pdplan_status;

typedef enum pdplan_phase {
  PDPLAN_PHASE_PREFILL = 0,
  PDPLAN_PHASE_DECODE = 1,
} pdplan_phase;

typedef enum pdplan_round_policy {
  PDPLAN_ROUND_NEAREST = 0,
  PDPLAN_ROUND_CEIL = 1,
} pdplan_round_policy;

typedef enum pdplan_service_model {
  PDPLAN_SERVICE_EXPONENTIAL = 0,
  PDPLAN_SERVICE_DETERMINISTIC = 1,
} pdplan_service_model;

typedef enum pdplan_warning_code {
  /* Workload input length differs from the benchmarked prefill shape by more
     than 25%. */
  PDPLAN_WARN_PREFILL_SHAPE_MISMATCH = 0,
  /* Workload shape differs from the benchmarked decode shape by more than
     25%. */
  PDPLAN_WARN_DECODE_SHAPE_MISMATCH = 1,
  /* Chunk size exceeds the input length, so the FIFO service model is an
     approximation. */
  PDPLAN_WARN_CHUNKED_PREFILL_APPROXIMATION = 2,
  /* A TPOT or throughput dip within the 1% noise tolerance. */
  PDPLAN_WARN_DECODE_CURVE_NOISE = 3,
  /* Engine-reported throughput differs from batch/TPOT by more than 10%. */
  PDPLAN_WARN_ENGINE_THROUGHPUT_GAP = 4,
  /* TPOT target beyond the measured range; the largest measured batch was
     used instead of extrapolating. */
  PDPLAN_WARN_TPOT_SATURATED = 5,
  /* The rounded deployment falls short of the requested throughput. */
  PDPLAN_WARN_PLAN_SHORTFALL = 6,
} pdplan_warning_code;

/* Message for the most recent failing call on this thread. The pointer stays
 * valid until the thread's next failing pdplan call. */
PDPLAN_API const char* pdplan_last_error_message(void);

PDPLAN_API const char* pdplan_version(void);

PDPLAN_API const char* pdplan_status_name(pdplan_status status);
PDPLAN_API const char* pdplan_warning_code_name(pdplan_warning_code code);

/* Identity of the simulator's random number generator, recorded so results
 * can be reproduced statistically outside this library. */
PDPLAN_API const char* pdplan_rng_name(void);

/* ------------------------------------------------------------------ */
/* Inputs                                                             */
/* ------------------------------------------------------------------ */

typedef struct pdplan_workload {
  /* Aggregate demand, input + output tokens per second. */
  double total_throughput_tps;
  double mean_input_len;
  double mean_output_len;
  /* Prefix-cache-adjusted prefill length; the portion of the input that
     misses the KV cache. <= 0 means unset (use mean_input_len). Used in
     prefill work terms only; the tokens-per-request conversion always uses
     the mean lengths. */
  double effective_input_len;
} pdplan_workload;

typedef struct pdplan_slo {
  double ttft_target_s;
  double tpot_target_s;
  /* Fixed client<->server plus KV-transfer overhead inside TTFT. */
  double overhead_s;
} pdplan_slo;

/* ------------------------------------------------------------------ */
/* Prefill profiles                                                   */
/* ------------------------------------------------------------------ */

/* An ordered set of benchmarked prefill operating points, one per input
 * shape: (input_len, chunk_size, max_throughput_tps). */
typedef struct pdplan_prefill_profile pdplan_prefill_profile;

/* Parse a prefill profile CSV file: header
 * `input_len,chunk_size,max_throughput_tps`, one row per shape. */
PDPLAN_API pdplan_status pdplan_prefill_profile_from_file(
    const char* path, pdplan_prefill_profile** out);

/* Same format from an in-memory string; `origin` names the source in error
 * messages. */
PDPLAN_API pdplan_status pdplan_prefill_profile_from_string(
    const char* text, const char* origin, pdplan_prefill_profile** out);

/* Build a profile from parallel arrays of length n. */
PDPLAN_API pdplan_status pdplan_prefill_profile_create(
    const double* input_lens, const double* chunk_sizes,
    const double* max_throughputs_tps, size_t n, pdplan_prefill_profile** out);

PDPLAN_API size_t
pdplan_prefill_profile_rows(const pdplan_prefill_profile* profile);

PDPLAN_API pdplan_status pdplan_prefill_profile_row(
    const pdplan_prefill_profile* profile, size_t index, double* input_len,
    double* chunk_size, double* max_throughput_tps);

/* Index of the row whose input_len is nearest the target; earlier row wins
 * ties. */
PDPLAN_API pdplan_status pdplan_prefill_profile_select(
    const pdplan_prefill_profile* profile, double target_input_len,
    size_t* index);

PDPLAN_API void pdplan_prefill_profile_free(pdplan_prefill_profile* profile);

/* ------------------------------------------------------------------ */
/* Decode profiles                                                    */
/* ------------------------------------------------------------------ */

/* A validated TPOT-vs-batch curve with piecewise-linear interpolation. */
typedef struct pdplan_decode_profile pdplan_decode_profile;

/* Parse a decode profile CSV file: header `batch,tpot_ms[,throughput_tps]`.
 * Comments `# input_len=...` / `# output_len=...` record the benchmark
 * shape. Validation warnings (noise dips, engine throughput gaps) are kept
 * on the handle. */
PDPLAN_API pdplan_status pdplan_decode_profile_from_file(
    const char* path, pdplan_decode_profile** out);

PDPLAN_API pdplan_status pdplan_decode_profile_from_string(
    const char* text, const char* origin, pdplan_decode_profile** out);

/* Build a curve from parallel arrays of length n; TPOT in seconds here.
 * input_len/output_len record the benchmark shape, 0 if unknown. */
PDPLAN_API pdplan_status pdplan_decode_profile_create(
    const double* batches, const double* tpots_s, size_t n, double input_len,
    double output_len, pdplan_decode_profile** out);

/* Replace the recorded benchmark shape (for CLI flags overriding file
 * metadata). Returns a new handle; the input handle remains valid. */
PDPLAN_API pdplan_status pdplan_decode_profile_with_shape(
    const pdplan_decode_profile* profile, double input_len, double output_len,
    pdplan_decode_profile** out);

PDPLAN_API size_t
pdplan_decode_profile_points(const pdplan_decode_profile* profile);

PDPLAN_API pdplan_status pdplan_decode_profile_point(
    const pdplan_decode_profile* profile, size_t index, double* batch,
    double* tpot_s);

PDPLAN_API size_t
pdplan_decode_profile_warning_count(const pdplan_decode_profile* profile);

/* Warning at `index`; *code may be NULL. Returns NULL past the end. */
PDPLAN_API const char* pdplan_decode_profile_warning(
    const pdplan_decode_profile* profile, size_t index,
    pdplan_warning_code* code);

PDPLAN_API pdplan_status pdplan_decode_min_batch(
    const pdplan_decode_profile* profile, double* batch);
PDPLAN_API pdplan_status pdplan_decode_max_batch(
    const pdplan_decode_profile* profile, double* batch);

/* Piecewise-linear TPOT at `batch`; PDPLAN_ERR_OUT_OF_RANGE outside the
 * measured batch range. Exact at the measured points. */
PDPLAN_API pdplan_status pdplan_decode_tpot_at(
    const pdplan_decode_profile* profile, double batch, double* tpot_s);

/* batch / TPOT(batch); same range rule as pdplan_decode_tpot_at. */
PDPLAN_API pdplan_status pdplan_decode_throughput_at(
    const pdplan_decode_profile* profile, double batch,
    double* throughput_tps);

/* Largest batch whose interpolated TPOT still meets the target. When the
 * target is at or beyond the slowest measured TPOT the curve saturates:
 * *saturated is set and the largest measured batch is returned. A target
 * below the fastest measured TPOT fails with
 * PDPLAN_ERR_INFEASIBLE_SLO_DECODE. Output pointers may be NULL. */
PDPLAN_API pdplan_status pdplan_decode_max_batch_for_tpot(
    const pdplan_decode_profile* profile, double tpot_target_s, double* batch,
    double* tpot_s, int* saturated);

/* Decode throughput under the TPOT target: batch / TPOT at the operating
 * point chosen by pdplan_decode_max_batch_for_tpot. */
PDPLAN_API pdplan_status pdplan_decode_throughput_for_tpot(
    const pdplan_decode_profile* profile, double tpot_target_s,
    double* throughput_tps);

PDPLAN_API void pdplan_decode_profile_free(pdplan_decode_profile* profile);

/* ------------------------------------------------------------------ */
/* Prefill queueing analytics                                         */
/* ------------------------------------------------------------------ */

/* Service rate of one prefill instance: max_throughput / input_len. */
PDPLAN_API pdplan_status pdplan_service_rate(double max_throughput_tps,
                                             double input_len,
                                             double* rate_rps);

/* Utilization lambda/mu; PDPLAN_ERR_UNSTABLE_QUEUE when lambda >= mu. */
PDPLAN_API pdplan_status pdplan_utilization(double service_rate_rps,
                                            double arrival_rate_rps,
                                            double* utilization);

/* Mean queueing + computation time 1/(mu - lambda). */
PDPLAN_API pdplan_status pdplan_predicted_sojourn(double service_rate_rps,
                                                  double arrival_rate_rps,
                                                  double* sojourn_s);

/* Sojourn plus fixed overhead. */
PDPLAN_API pdplan_status pdplan_predicted_ttft(double service_rate_rps,
                                               double arrival_rate_rps,
                                               double overhead_s,
                                               double* ttft_s);

/* Prefill token throughput achievable under the TTFT target:
 * max_throughput - input_len / (ttft_target - overhead). Fails with
 * PDPLAN_ERR_INFEASIBLE_SLO_PREFILL when the zero-load sojourn alone
 * exceeds the budget. */
PDPLAN_API pdplan_status pdplan_effective_prefill_throughput(
    double max_throughput_tps, double input_len, double ttft_target_s,
    double overhead_s, double* throughput_tps);

/* Largest stable request rate under the TTFT target:
 * mu - 1/(ttft_target - overhead). */
PDPLAN_API pdplan_status pdplan_max_arrival_rate(double max_throughput_tps,
                                                 double input_len,
                                                 double ttft_target_s,
                                                 double overhead_s,
                                                 double* rate_rps);

/* ------------------------------------------------------------------ */
/* Planning                                                           */
/* ------------------------------------------------------------------ */

/* Aggregate token throughput: n_requests * (L_in + L_out) / total_time. */
PDPLAN_API pdplan_status pdplan_total_throughput(double n_requests,
                                                 double input_len,
                                                 double output_len,
                                                 double total_time_s,
                                                 double* throughput_tps);

/* Prefill:decode instance ratio (L_in * tp_decode) / (L_out * tp_prefill);
 * independent of the total throughput. */
PDPLAN_API pdplan_status pdplan_pd_ratio(double input_len, double output_len,
                                         double prefill_tps,
                                         double decode_tps, double* ratio);

typedef struct pdplan_plan pdplan_plan;

typedef struct pdplan_plan_summary {
  /* Real-valued instance counts before rounding. */
  double frac_prefill;
  double frac_decode;
  int n_prefill;
  int n_decode;
  double pd_ratio;
  /* Effective per-instance throughputs under the SLOs. */
  double eff_prefill_throughput_tps;
  double eff_decode_throughput_tps;
  /* TPOT-feasible batch size per decode instance. */
  double decode_batch;
  /* What the integer deployment can sustain, and which phase caps it. */
  double achievable_total_throughput_tps;
  pdplan_phase binding_phase;
  /* Index of the prefill profile row the plan was built on. */
  size_t selected_prefill_row;
} pdplan_plan_summary;

/* Full pipeline: select the nearest prefill shape, derive both effective
 * throughputs from the SLOs, compute fractional counts, round, and evaluate
 * the integer deployment. */
PDPLAN_API pdplan_status pdplan_plan_create(
    const pdplan_workload* workload, const pdplan_slo* slo,
    const pdplan_prefill_profile* prefill,
    const pdplan_decode_profile* decode, pdplan_round_policy policy,
    pdplan_plan** out);

/* Same pipeline with the instance counts imposed instead of derived, for
 * evaluating an alternative deployment against the same workload and SLOs. */
PDPLAN_API pdplan_status pdplan_plan_create_with_counts(
    const pdplan_workload* workload, const pdplan_slo* slo,
    const pdplan_prefill_profile* prefill,
    const pdplan_decode_profile* decode, int n_prefill, int n_decode,
    pdplan_plan** out);

PDPLAN_API pdplan_status pdplan_plan_summary_get(const pdplan_plan* plan,
                                                 pdplan_plan_summary* out);

PDPLAN_API size_t pdplan_plan_warning_count(const pdplan_plan* plan);

/* Warning at `index`; *code may be NULL. Returns NULL past the end. */
PDPLAN_API const char* pdplan_plan_warning(const pdplan_plan* plan,
                                           size_t index,
                                           pdplan_warning_code* code);

PDPLAN_API void pdplan_plan_free(pdplan_plan* plan);

/* ------------------------------------------------------------------ */
/* Load sweeps                                                        */
/* ------------------------------------------------------------------ */

typedef struct pdplan_sweep_point {
  double total_throughput_tps;
  /* +inf when the prefill queue is unstable at this load. */
  double predicted_ttft_s;
  double predicted_tpot_s;
  double prefill_utilization;
  /* Steady-state decode concurrency per instance (fixed point of the load
     balance on the TPOT curve). */
  double decode_batch;
  int stable;
  int converged;
  int in_curve_range;
  /* stable && converged && in range && both SLOs met. */
  int feasible;
} pdplan_sweep_point;

typedef struct pdplan_sim_result {
  double ttft_mean_s;
  double ttft_p50_s;
  double ttft_p99_s;
  double tpot_mean_s;
  uint64_t completed_requests;
  double total_token_throughput_tps;
  double prefill_utilization;
  double decode_utilization;
  double mean_prefill_queue_len;
  /* Prefill-only sojourn (TTFT minus KV delay) with a 95% batch-means
     confidence half-width. */
  double sojourn_mean_s;
  double sojourn_ci_halfwidth_s;
  double measured_arrival_rate_rps;
  double measurement_time_s;
  uint64_t counted_requests;
  /* Offered per-instance load at or beyond the service rate. */
  int overloaded;
} pdplan_sim_result;

typedef struct pdplan_sweep pdplan_sweep;

/* Predicted TTFT/TPOT at each grid load (tokens/s) for the fixed deployment
 * in `plan`. */
PDPLAN_API pdplan_status pdplan_sweep_run(
    const pdplan_plan* plan, const pdplan_workload* workload,
    const pdplan_slo* slo, const pdplan_prefill_profile* prefill,
    const pdplan_decode_profile* decode, const double* grid_tps,
    size_t n_points, pdplan_sweep** out);

typedef struct pdplan_sim_settings {
  uint64_t seed;
  uint64_t requests_per_point;
  /* Leading fraction of each run excluded from statistics. */
  double warmup_fraction;
  pdplan_service_model prefill_service;
} pdplan_sim_settings;

/* Fill defaults: seed 0, 20000 requests per point, 0.2 warmup,
 * exponential service. */
PDPLAN_API void pdplan_sim_settings_init(pdplan_sim_settings* settings);

/* pdplan_sweep_run plus a discrete-event simulation of every grid point.
 * Deterministic for a given settings->seed. */
PDPLAN_API pdplan_status pdplan_sweep_run_simulated(
    const pdplan_plan* plan, const pdplan_workload* workload,
    const pdplan_slo* slo, const pdplan_prefill_profile* prefill,
    const pdplan_decode_profile* decode, const double* grid_tps,
    size_t n_points, const pdplan_sim_settings* settings, pdplan_sweep** out);

PDPLAN_API size_t pdplan_sweep_size(const pdplan_sweep* sweep);

PDPLAN_API pdplan_status pdplan_sweep_point_get(const pdplan_sweep* sweep,
                                                size_t index,
                                                pdplan_sweep_point* out);

PDPLAN_API int pdplan_sweep_has_simulation(const pdplan_sweep* sweep);

PDPLAN_API pdplan_status pdplan_sweep_sim_get(const pdplan_sweep* sweep,
                                              size_t index,
                                              pdplan_sim_result* out);

PDPLAN_API void pdplan_sweep_free(pdplan_sweep* sweep);

/* ------------------------------------------------------------------ */
/* Simulation                                                         */
/* ------------------------------------------------------------------ */

typedef struct pdplan_sim_config {
  int n_prefill;
  int n_decode;
  /* Aggregate Poisson arrival rate. */
  double arrival_rate_rps;
  /* Tokens per request; accounting only. */
  double input_len;
  /* Decode steps per request. */
  int output_len;
  pdplan_service_model prefill_service;
  double prefill_service_mean_s;
  double kv_transfer_delay_s;
  /* <= 0: uncapped. */
  double decode_batch_cap;
  uint64_t seed;
  /* Horizons: at least one must be set. max_requests bounds arrivals;
     max_sim_time_s cuts off the arrival process. In-flight requests always
     drain. */
  uint64_t max_requests;
  double max_sim_time_s;
  double warmup_fraction;
} pdplan_sim_config;

/* Fill defaults: 1 instance per phase, exponential service, no cap, seed 0,
 * 0.2 warmup, no horizon (the caller must set one). */
PDPLAN_API void pdplan_sim_config_init(pdplan_sim_config* config);

/* One simulation run. Bit-deterministic for a given config and seed. */
PDPLAN_API pdplan_status pdplan_sim_run(const pdplan_sim_config* config,
                                        const pdplan_decode_profile* decode,
                                        pdplan_sim_result* out);

/* Stream seed for run `run_index` of a family seeded with `seed`; the
 * derivation used by the sweep and M/M/1 drivers. */
PDPLAN_API uint64_t pdplan_derive_stream_seed(uint64_t seed,
                                              uint64_t run_index);

/* ------------------------------------------------------------------ */
/* M/M/1 validation                                                   */
/* ------------------------------------------------------------------ */

typedef struct pdplan_mm1_row {
  double rate_rps;
  /* 1/(mu - lambda) + overhead; NaN when unstable. */
  double analytic_ttft_s;
  double sim_ttft_s;
  double rel_err;
  /* 0 when the rate is at or above the service rate; such rows are flagged,
     not simulated. */
  int stable;
} pdplan_mm1_row;

/* Simulated vs analytic TTFT for a single prefill instance over a grid of
 * arrival rates. Service is exponential with rate
 * max_throughput / input_len; `rows_out` must hold n_rates entries. */
PDPLAN_API pdplan_status pdplan_validate_mm1(
    double max_throughput_tps, double input_len, const double* rates_rps,
    size_t n_rates, double overhead_s, const pdplan_sim_settings* settings,
    pdplan_mm1_row* rows_out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* PDPLAN_H */
