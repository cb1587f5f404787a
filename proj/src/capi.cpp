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

#include "pdplan/pdplan.h"

#include <cstring>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "decode_curve.h"
#include "error.h"
#include "planner.h"
#include "profile_io.h"
#include "queueing.h"
#include "simulator.h"
#include "types.h"

/* Opaque handle definitions. The C tag names double as the C++ types. */

struct pdplan_prefill_profile {
  pdplan::PrefillProfileSet set;
};

struct pdplan_decode_profile {
  pdplan::decode::DecodeCurve curve;
};

struct pdplan_plan {
  pdplan::AllocationPlan plan;
};

struct pdplan_sweep {
  std::vector<pdplan::planner::SweepPoint> points;
  std::vector<pdplan::sim::SimResult> sims;
  bool has_sim = false;
};

namespace {

using pdplan::Error;
using pdplan::ErrorCode;

thread_local std::string g_last_error;

pdplan_status map_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument:
      return PDPLAN_ERR_INVALID_ARGUMENT;
    case ErrorCode::unstable_queue:
      return PDPLAN_ERR_UNSTABLE_QUEUE;
    case ErrorCode::infeasible_slo_prefill:
      return PDPLAN_ERR_INFEASIBLE_SLO_PREFILL;
    case ErrorCode::infeasible_slo_decode:
      return PDPLAN_ERR_INFEASIBLE_SLO_DECODE;
    case ErrorCode::malformed_profile:
      return PDPLAN_ERR_MALFORMED_PROFILE;
    case ErrorCode::out_of_range:
      return PDPLAN_ERR_OUT_OF_RANGE;
    case ErrorCode::io_error:
      return PDPLAN_ERR_IO;
  }
  return PDPLAN_ERR_INTERNAL;
}

template <typename F>
pdplan_status wrap(F&& body) noexcept {
  try {
    body();
    return PDPLAN_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return PDPLAN_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return PDPLAN_ERR_INTERNAL;
  }
}

void require(const void* ptr, const char* name) {
  if (ptr == nullptr) {
    throw Error(ErrorCode::invalid_argument,
                std::string(name) + " must not be NULL");
  }
}

/* The C enums mirror the C++ ones by value; keep them locked together. */
static_assert(static_cast<int>(pdplan::WarningCode::prefill_shape_mismatch) ==
              PDPLAN_WARN_PREFILL_SHAPE_MISMATCH);
static_assert(static_cast<int>(pdplan::WarningCode::decode_shape_mismatch) ==
              PDPLAN_WARN_DECODE_SHAPE_MISMATCH);
static_assert(
    static_cast<int>(pdplan::WarningCode::chunked_prefill_approximation) ==
    PDPLAN_WARN_CHUNKED_PREFILL_APPROXIMATION);
static_assert(static_cast<int>(pdplan::WarningCode::decode_curve_noise) ==
              PDPLAN_WARN_DECODE_CURVE_NOISE);
static_assert(static_cast<int>(pdplan::WarningCode::engine_throughput_gap) ==
              PDPLAN_WARN_ENGINE_THROUGHPUT_GAP);
static_assert(static_cast<int>(pdplan::WarningCode::tpot_saturated) ==
              PDPLAN_WARN_TPOT_SATURATED);
static_assert(static_cast<int>(pdplan::WarningCode::plan_shortfall) ==
              PDPLAN_WARN_PLAN_SHORTFALL);
static_assert(static_cast<int>(pdplan::Phase::prefill) ==
              PDPLAN_PHASE_PREFILL);
static_assert(static_cast<int>(pdplan::Phase::decode) == PDPLAN_PHASE_DECODE);
static_assert(static_cast<int>(pdplan::planner::RoundPolicy::nearest) ==
              PDPLAN_ROUND_NEAREST);
static_assert(static_cast<int>(pdplan::planner::RoundPolicy::ceil) ==
              PDPLAN_ROUND_CEIL);
static_assert(static_cast<int>(pdplan::sim::ServiceModel::exponential) ==
              PDPLAN_SERVICE_EXPONENTIAL);
static_assert(static_cast<int>(pdplan::sim::ServiceModel::deterministic) ==
              PDPLAN_SERVICE_DETERMINISTIC);

pdplan::WorkloadSpec to_workload(const pdplan_workload* w) {
  require(w, "workload");
  pdplan::WorkloadSpec spec;
  spec.total_throughput_tps = w->total_throughput_tps;
  spec.mean_input_len = w->mean_input_len;
  spec.mean_output_len = w->mean_output_len;
  if (w->effective_input_len > 0.0) {
    spec.effective_input_len = w->effective_input_len;
  }
  return spec;
}

pdplan::SloSpec to_slo(const pdplan_slo* s) {
  require(s, "slo");
  return {s->ttft_target_s, s->tpot_target_s, s->overhead_s};
}

/* SLO carrier for the TTFT-only scalar entry points; the TPOT value is not
 * consulted by them but must pass validation. */
pdplan::SloSpec ttft_only_slo(double ttft_target_s, double overhead_s) {
  return {ttft_target_s, 1.0, overhead_s};
}

pdplan::PrefillProfile scalar_profile(double max_throughput_tps,
                                      double input_len) {
  return {input_len, input_len, max_throughput_tps};
}

pdplan::planner::RoundPolicy to_policy(pdplan_round_policy policy) {
  switch (policy) {
    case PDPLAN_ROUND_NEAREST:
      return pdplan::planner::RoundPolicy::nearest;
    case PDPLAN_ROUND_CEIL:
      return pdplan::planner::RoundPolicy::ceil;
  }
  throw Error(ErrorCode::invalid_argument, "unknown rounding policy");
}

pdplan::sim::ServiceModel to_service_model(pdplan_service_model model) {
  switch (model) {
    case PDPLAN_SERVICE_EXPONENTIAL:
      return pdplan::sim::ServiceModel::exponential;
    case PDPLAN_SERVICE_DETERMINISTIC:
      return pdplan::sim::ServiceModel::deterministic;
  }
  throw Error(ErrorCode::invalid_argument, "unknown service model");
}

pdplan::sim::SimSettings to_settings(const pdplan_sim_settings* s) {
  require(s, "settings");
  pdplan::sim::SimSettings settings;
  settings.seed = s->seed;
  settings.requests_per_point = s->requests_per_point;
  settings.warmup_fraction = s->warmup_fraction;
  settings.prefill_service = to_service_model(s->prefill_service);
  return settings;
}

pdplan::sim::SimConfig to_sim_config(const pdplan_sim_config* c) {
  require(c, "config");
  pdplan::sim::SimConfig config;
  config.n_prefill = c->n_prefill;
  config.n_decode = c->n_decode;
  config.arrival_rate_rps = c->arrival_rate_rps;
  config.input_len = c->input_len;
  config.output_len = c->output_len;
  config.prefill_service = to_service_model(c->prefill_service);
  config.prefill_service_mean_s = c->prefill_service_mean_s;
  config.kv_transfer_delay_s = c->kv_transfer_delay_s;
  config.decode_batch_cap = c->decode_batch_cap;
  config.seed = c->seed;
  config.max_requests = c->max_requests;
  config.max_sim_time_s = c->max_sim_time_s;
  config.warmup_fraction = c->warmup_fraction;
  return config;
}

pdplan_sim_result to_c(const pdplan::sim::SimResult& r) {
  pdplan_sim_result out = {};
  out.ttft_mean_s = r.ttft_mean_s;
  out.ttft_p50_s = r.ttft_p50_s;
  out.ttft_p99_s = r.ttft_p99_s;
  out.tpot_mean_s = r.tpot_mean_s;
  out.completed_requests = r.completed_requests;
  out.total_token_throughput_tps = r.total_token_throughput_tps;
  out.prefill_utilization = r.prefill_utilization;
  out.decode_utilization = r.decode_utilization;
  out.mean_prefill_queue_len = r.mean_prefill_queue_len;
  out.sojourn_mean_s = r.sojourn_mean_s;
  out.sojourn_ci_halfwidth_s = r.sojourn_ci_halfwidth_s;
  out.measured_arrival_rate_rps = r.measured_arrival_rate_rps;
  out.measurement_time_s = r.measurement_time_s;
  out.counted_requests = r.counted_requests;
  out.overloaded = r.overloaded ? 1 : 0;
  return out;
}

/* The sweep functions need the single prefill row the plan was built on. */
const pdplan::PrefillProfile& plan_row(const pdplan_plan* plan,
                                       const pdplan_prefill_profile* profile) {
  const auto& rows = profile->set.rows();
  if (plan->plan.selected_prefill_row >= rows.size()) {
    throw Error(ErrorCode::invalid_argument,
                "plan does not belong to this prefill profile");
  }
  return rows[plan->plan.selected_prefill_row];
}

std::span<const double> to_span(const double* data, size_t n,
                                const char* name) {
  if (n > 0) {
    require(data, name);
  }
  return {data, n};
}

}  // namespace

extern "C" {

const char* pdplan_last_error_message(void) { return g_last_error.c_str(); }

const char* pdplan_version(void) { return "1.0.0"; }

const char* pdplan_rng_name(void) { return pdplan::sim::rng_name(); }

const char* pdplan_status_name(pdplan_status status) {
  switch (status) {
    case PDPLAN_OK:
      return "ok";
    case PDPLAN_ERR_INVALID_ARGUMENT:
      return "invalid_argument";
    case PDPLAN_ERR_UNSTABLE_QUEUE:
      return "unstable_queue";
    case PDPLAN_ERR_INFEASIBLE_SLO_PREFILL:
      return "infeasible_slo_prefill";
    case PDPLAN_ERR_INFEASIBLE_SLO_DECODE:
      return "infeasible_slo_decode";
    case PDPLAN_ERR_MALFORMED_PROFILE:
      return "malformed_profile";
    case PDPLAN_ERR_IO:
      return "io_error";
    case PDPLAN_ERR_OUT_OF_RANGE:
      return "out_of_range";
    case PDPLAN_ERR_INTERNAL:
      return "internal";
  }
  return "unknown";
}

const char* pdplan_warning_code_name(pdplan_warning_code code) {
  switch (code) {
    case PDPLAN_WARN_PREFILL_SHAPE_MISMATCH:
      return "prefill_shape_mismatch";
    case PDPLAN_WARN_DECODE_SHAPE_MISMATCH:
      return "decode_shape_mismatch";
    case PDPLAN_WARN_CHUNKED_PREFILL_APPROXIMATION:
      return "chunked_prefill_approximation";
    case PDPLAN_WARN_DECODE_CURVE_NOISE:
      return "decode_curve_noise";
    case PDPLAN_WARN_ENGINE_THROUGHPUT_GAP:
      return "engine_throughput_gap";
    case PDPLAN_WARN_TPOT_SATURATED:
      return "tpot_saturated";
    case PDPLAN_WARN_PLAN_SHORTFALL:
      return "plan_shortfall";
  }
  return "unknown";
}

/* ------------------------------------------------------------------ */
/* Prefill profiles                                                   */
/* ------------------------------------------------------------------ */

pdplan_status pdplan_prefill_profile_from_file(const char* path,
                                               pdplan_prefill_profile** out) {
  return wrap([&] {
    require(path, "path");
    require(out, "out");
    auto handle = std::make_unique<pdplan_prefill_profile>(
        pdplan_prefill_profile{pdplan::io::load_prefill_profiles(path)});
    *out = handle.release();
  });
}

pdplan_status pdplan_prefill_profile_from_string(
    const char* text, const char* origin, pdplan_prefill_profile** out) {
  return wrap([&] {
    require(text, "text");
    require(out, "out");
    const char* name = origin != nullptr ? origin : "<string>";
    auto handle = std::make_unique<pdplan_prefill_profile>(
        pdplan_prefill_profile{pdplan::io::parse_prefill_csv(text, name)});
    *out = handle.release();
  });
}

pdplan_status pdplan_prefill_profile_create(const double* input_lens,
                                            const double* chunk_sizes,
                                            const double* max_throughputs_tps,
                                            size_t n,
                                            pdplan_prefill_profile** out) {
  return wrap([&] {
    require(out, "out");
    if (n == 0) {
      throw Error(ErrorCode::invalid_argument,
                  "prefill profile needs at least one row");
    }
    require(input_lens, "input_lens");
    require(chunk_sizes, "chunk_sizes");
    require(max_throughputs_tps, "max_throughputs_tps");
    std::vector<pdplan::PrefillProfile> rows;
    rows.reserve(n);
    for (size_t i = 0; i < n; ++i) {
      rows.push_back(
          {input_lens[i], chunk_sizes[i], max_throughputs_tps[i]});
    }
    auto handle = std::make_unique<pdplan_prefill_profile>(
        pdplan_prefill_profile{pdplan::PrefillProfileSet(std::move(rows))});
    *out = handle.release();
  });
}

size_t pdplan_prefill_profile_rows(const pdplan_prefill_profile* profile) {
  return profile != nullptr ? profile->set.rows().size() : 0;
}

pdplan_status pdplan_prefill_profile_row(const pdplan_prefill_profile* profile,
                                         size_t index, double* input_len,
                                         double* chunk_size,
                                         double* max_throughput_tps) {
  return wrap([&] {
    require(profile, "profile");
    const auto& rows = profile->set.rows();
    if (index >= rows.size()) {
      throw Error(ErrorCode::out_of_range, "row index past the end");
    }
    if (input_len != nullptr) {
      *input_len = rows[index].input_len;
    }
    if (chunk_size != nullptr) {
      *chunk_size = rows[index].chunked_prefill_size;
    }
    if (max_throughput_tps != nullptr) {
      *max_throughput_tps = rows[index].max_throughput_tps;
    }
  });
}

pdplan_status pdplan_prefill_profile_select(
    const pdplan_prefill_profile* profile, double target_input_len,
    size_t* index) {
  return wrap([&] {
    require(profile, "profile");
    require(index, "index");
    *index = profile->set.select_nearest(target_input_len);
  });
}

void pdplan_prefill_profile_free(pdplan_prefill_profile* profile) {
  delete profile;
}

/* ------------------------------------------------------------------ */
/* Decode profiles                                                    */
/* ------------------------------------------------------------------ */

pdplan_status pdplan_decode_profile_from_file(const char* path,
                                              pdplan_decode_profile** out) {
  return wrap([&] {
    require(path, "path");
    require(out, "out");
    auto handle = std::make_unique<pdplan_decode_profile>(pdplan_decode_profile{
        pdplan::decode::DecodeCurve(pdplan::io::load_decode_profile(path))});
    *out = handle.release();
  });
}

pdplan_status pdplan_decode_profile_from_string(const char* text,
                                                const char* origin,
                                                pdplan_decode_profile** out) {
  return wrap([&] {
    require(text, "text");
    require(out, "out");
    const char* name = origin != nullptr ? origin : "<string>";
    auto handle = std::make_unique<pdplan_decode_profile>(
        pdplan_decode_profile{pdplan::decode::DecodeCurve(
            pdplan::io::parse_decode_csv(text, name))});
    *out = handle.release();
  });
}

pdplan_status pdplan_decode_profile_create(const double* batches,
                                           const double* tpots_s, size_t n,
                                           double input_len, double output_len,
                                           pdplan_decode_profile** out) {
  return wrap([&] {
    require(out, "out");
    if (n > 0) {
      require(batches, "batches");
      require(tpots_s, "tpots_s");
    }
    pdplan::DecodeProfile profile;
    profile.input_len = input_len;
    profile.output_len = output_len;
    profile.points.reserve(n);
    for (size_t i = 0; i < n; ++i) {
      profile.points.push_back({batches[i], tpots_s[i], {}});
    }
    auto handle = std::make_unique<pdplan_decode_profile>(pdplan_decode_profile{
        pdplan::decode::DecodeCurve(std::move(profile))});
    *out = handle.release();
  });
}

pdplan_status pdplan_decode_profile_with_shape(
    const pdplan_decode_profile* profile, double input_len, double output_len,
    pdplan_decode_profile** out) {
  return wrap([&] {
    require(profile, "profile");
    require(out, "out");
    pdplan::DecodeProfile copy = profile->curve.profile();
    copy.input_len = input_len;
    copy.output_len = output_len;
    auto handle = std::make_unique<pdplan_decode_profile>(pdplan_decode_profile{
        pdplan::decode::DecodeCurve(std::move(copy))});
    *out = handle.release();
  });
}

size_t pdplan_decode_profile_points(const pdplan_decode_profile* profile) {
  return profile != nullptr ? profile->curve.profile().points.size() : 0;
}

pdplan_status pdplan_decode_profile_point(const pdplan_decode_profile* profile,
                                          size_t index, double* batch,
                                          double* tpot_s) {
  return wrap([&] {
    require(profile, "profile");
    const auto& points = profile->curve.profile().points;
    if (index >= points.size()) {
      throw Error(ErrorCode::out_of_range, "point index past the end");
    }
    if (batch != nullptr) {
      *batch = points[index].batch;
    }
    if (tpot_s != nullptr) {
      *tpot_s = points[index].tpot_s;
    }
  });
}

size_t pdplan_decode_profile_warning_count(
    const pdplan_decode_profile* profile) {
  return profile != nullptr ? profile->curve.warnings().size() : 0;
}

const char* pdplan_decode_profile_warning(const pdplan_decode_profile* profile,
                                          size_t index,
                                          pdplan_warning_code* code) {
  if (profile == nullptr || index >= profile->curve.warnings().size()) {
    return nullptr;
  }
  const pdplan::Warning& warning = profile->curve.warnings()[index];
  if (code != nullptr) {
    *code = static_cast<pdplan_warning_code>(warning.code);
  }
  return warning.message.c_str();
}

pdplan_status pdplan_decode_min_batch(const pdplan_decode_profile* profile,
                                      double* batch) {
  return wrap([&] {
    require(profile, "profile");
    require(batch, "batch");
    *batch = profile->curve.min_batch();
  });
}

pdplan_status pdplan_decode_max_batch(const pdplan_decode_profile* profile,
                                      double* batch) {
  return wrap([&] {
    require(profile, "profile");
    require(batch, "batch");
    *batch = profile->curve.max_batch();
  });
}

pdplan_status pdplan_decode_tpot_at(const pdplan_decode_profile* profile,
                                    double batch, double* tpot_s) {
  return wrap([&] {
    require(profile, "profile");
    require(tpot_s, "tpot_s");
    *tpot_s = profile->curve.tpot_at(batch);
  });
}

pdplan_status pdplan_decode_throughput_at(const pdplan_decode_profile* profile,
                                          double batch,
                                          double* throughput_tps) {
  return wrap([&] {
    require(profile, "profile");
    require(throughput_tps, "throughput_tps");
    *throughput_tps = profile->curve.throughput_at(batch);
  });
}

pdplan_status pdplan_decode_max_batch_for_tpot(
    const pdplan_decode_profile* profile, double tpot_target_s, double* batch,
    double* tpot_s, int* saturated) {
  return wrap([&] {
    require(profile, "profile");
    const pdplan::decode::BatchForTpot result =
        profile->curve.max_batch_for_tpot(tpot_target_s);
    if (batch != nullptr) {
      *batch = result.batch;
    }
    if (tpot_s != nullptr) {
      *tpot_s = result.tpot_s;
    }
    if (saturated != nullptr) {
      *saturated = result.saturated ? 1 : 0;
    }
  });
}

pdplan_status pdplan_decode_throughput_for_tpot(
    const pdplan_decode_profile* profile, double tpot_target_s,
    double* throughput_tps) {
  return wrap([&] {
    require(profile, "profile");
    require(throughput_tps, "throughput_tps");
    *throughput_tps =
        profile->curve.operating_point_for_tpot(tpot_target_s).throughput_tps;
  });
}

void pdplan_decode_profile_free(pdplan_decode_profile* profile) {
  delete profile;
}

/* ------------------------------------------------------------------ */
/* Prefill queueing analytics                                         */
/* ------------------------------------------------------------------ */

pdplan_status pdplan_service_rate(double max_throughput_tps, double input_len,
                                  double* rate_rps) {
  return wrap([&] {
    require(rate_rps, "rate_rps");
    *rate_rps = pdplan::queueing::service_rate(
        scalar_profile(max_throughput_tps, input_len), input_len);
  });
}

pdplan_status pdplan_utilization(double service_rate_rps,
                                 double arrival_rate_rps,
                                 double* utilization) {
  return wrap([&] {
    require(utilization, "utilization");
    *utilization =
        pdplan::queueing::utilization({service_rate_rps, arrival_rate_rps});
  });
}

pdplan_status pdplan_predicted_sojourn(double service_rate_rps,
                                       double arrival_rate_rps,
                                       double* sojourn_s) {
  return wrap([&] {
    require(sojourn_s, "sojourn_s");
    *sojourn_s = pdplan::queueing::predicted_sojourn(
        {service_rate_rps, arrival_rate_rps});
  });
}

pdplan_status pdplan_predicted_ttft(double service_rate_rps,
                                    double arrival_rate_rps, double overhead_s,
                                    double* ttft_s) {
  return wrap([&] {
    require(ttft_s, "ttft_s");
    *ttft_s = pdplan::queueing::predicted_ttft(
        {service_rate_rps, arrival_rate_rps}, overhead_s);
  });
}

pdplan_status pdplan_effective_prefill_throughput(double max_throughput_tps,
                                                  double input_len,
                                                  double ttft_target_s,
                                                  double overhead_s,
                                                  double* throughput_tps) {
  return wrap([&] {
    require(throughput_tps, "throughput_tps");
    *throughput_tps = pdplan::queueing::effective_prefill_throughput(
        scalar_profile(max_throughput_tps, input_len), input_len,
        ttft_only_slo(ttft_target_s, overhead_s));
  });
}

pdplan_status pdplan_max_arrival_rate(double max_throughput_tps,
                                      double input_len, double ttft_target_s,
                                      double overhead_s, double* rate_rps) {
  return wrap([&] {
    require(rate_rps, "rate_rps");
    *rate_rps = pdplan::queueing::max_arrival_rate(
        scalar_profile(max_throughput_tps, input_len), input_len,
        ttft_only_slo(ttft_target_s, overhead_s));
  });
}

/* ------------------------------------------------------------------ */
/* Planning                                                           */
/* ------------------------------------------------------------------ */

pdplan_status pdplan_total_throughput(double n_requests, double input_len,
                                      double output_len, double total_time_s,
                                      double* throughput_tps) {
  return wrap([&] {
    require(throughput_tps, "throughput_tps");
    *throughput_tps = pdplan::planner::total_throughput(
        n_requests, input_len, output_len, total_time_s);
  });
}

pdplan_status pdplan_pd_ratio(double input_len, double output_len,
                              double prefill_tps, double decode_tps,
                              double* ratio) {
  return wrap([&] {
    require(ratio, "ratio");
    *ratio = pdplan::planner::pd_ratio(input_len, output_len, prefill_tps,
                                       decode_tps);
  });
}

pdplan_status pdplan_plan_create(const pdplan_workload* workload,
                                 const pdplan_slo* slo,
                                 const pdplan_prefill_profile* prefill,
                                 const pdplan_decode_profile* decode,
                                 pdplan_round_policy policy,
                                 pdplan_plan** out) {
  return wrap([&] {
    require(prefill, "prefill");
    require(decode, "decode");
    require(out, "out");
    auto handle = std::make_unique<pdplan_plan>(pdplan_plan{pdplan::planner::plan(
        to_workload(workload), to_slo(slo), prefill->set, decode->curve,
        to_policy(policy))});
    *out = handle.release();
  });
}

pdplan_status pdplan_plan_create_with_counts(
    const pdplan_workload* workload, const pdplan_slo* slo,
    const pdplan_prefill_profile* prefill, const pdplan_decode_profile* decode,
    int n_prefill, int n_decode, pdplan_plan** out) {
  return wrap([&] {
    require(prefill, "prefill");
    require(decode, "decode");
    require(out, "out");
    auto handle = std::make_unique<pdplan_plan>(
        pdplan_plan{pdplan::planner::plan_with_counts(
            to_workload(workload), to_slo(slo), prefill->set, decode->curve,
            n_prefill, n_decode)});
    *out = handle.release();
  });
}

pdplan_status pdplan_plan_summary_get(const pdplan_plan* plan,
                                      pdplan_plan_summary* out) {
  return wrap([&] {
    require(plan, "plan");
    require(out, "out");
    const pdplan::AllocationPlan& p = plan->plan;
    pdplan_plan_summary summary = {};
    summary.frac_prefill = p.frac_prefill;
    summary.frac_decode = p.frac_decode;
    summary.n_prefill = p.n_prefill;
    summary.n_decode = p.n_decode;
    summary.pd_ratio = p.pd_ratio;
    summary.eff_prefill_throughput_tps = p.eff_prefill_throughput_tps;
    summary.eff_decode_throughput_tps = p.eff_decode_throughput_tps;
    summary.decode_batch = p.decode_batch;
    summary.achievable_total_throughput_tps =
        p.achievable_total_throughput_tps;
    summary.binding_phase = static_cast<pdplan_phase>(p.binding_phase);
    summary.selected_prefill_row = p.selected_prefill_row;
    *out = summary;
  });
}

size_t pdplan_plan_warning_count(const pdplan_plan* plan) {
  return plan != nullptr ? plan->plan.warnings.size() : 0;
}

const char* pdplan_plan_warning(const pdplan_plan* plan, size_t index,
                                pdplan_warning_code* code) {
  if (plan == nullptr || index >= plan->plan.warnings.size()) {
    return nullptr;
  }
  const pdplan::Warning& warning = plan->plan.warnings[index];
  if (code != nullptr) {
    *code = static_cast<pdplan_warning_code>(warning.code);
  }
  return warning.message.c_str();
}

void pdplan_plan_free(pdplan_plan* plan) { delete plan; }

/* ------------------------------------------------------------------ */
/* Load sweeps                                                        */
/* ------------------------------------------------------------------ */

pdplan_status pdplan_sweep_run(const pdplan_plan* plan,
                               const pdplan_workload* workload,
                               const pdplan_slo* slo,
                               const pdplan_prefill_profile* prefill,
                               const pdplan_decode_profile* decode,
                               const double* grid_tps, size_t n_points,
                               pdplan_sweep** out) {
  return wrap([&] {
    require(plan, "plan");
    require(prefill, "prefill");
    require(decode, "decode");
    require(out, "out");
    auto handle = std::make_unique<pdplan_sweep>();
    handle->points = pdplan::planner::sweep(
        plan->plan, to_workload(workload), to_slo(slo),
        plan_row(plan, prefill), decode->curve,
        to_span(grid_tps, n_points, "grid_tps"));
    *out = handle.release();
  });
}

void pdplan_sim_settings_init(pdplan_sim_settings* settings) {
  if (settings == nullptr) {
    return;
  }
  settings->seed = 0;
  settings->requests_per_point = 20000;
  settings->warmup_fraction = 0.2;
  settings->prefill_service = PDPLAN_SERVICE_EXPONENTIAL;
}

pdplan_status pdplan_sweep_run_simulated(
    const pdplan_plan* plan, const pdplan_workload* workload,
    const pdplan_slo* slo, const pdplan_prefill_profile* prefill,
    const pdplan_decode_profile* decode, const double* grid_tps,
    size_t n_points, const pdplan_sim_settings* settings, pdplan_sweep** out) {
  return wrap([&] {
    require(plan, "plan");
    require(prefill, "prefill");
    require(decode, "decode");
    require(out, "out");
    const std::vector<pdplan::sim::SweepComparison> comparison =
        pdplan::sim::simulate_sweep(plan->plan, to_workload(workload),
                                    to_slo(slo), plan_row(plan, prefill),
                                    decode->curve,
                                    to_span(grid_tps, n_points, "grid_tps"),
                                    to_settings(settings));
    auto handle = std::make_unique<pdplan_sweep>();
    handle->has_sim = true;
    handle->points.reserve(comparison.size());
    handle->sims.reserve(comparison.size());
    for (const auto& pair : comparison) {
      handle->points.push_back(pair.analytic);
      handle->sims.push_back(pair.simulated);
    }
    *out = handle.release();
  });
}

size_t pdplan_sweep_size(const pdplan_sweep* sweep) {
  return sweep != nullptr ? sweep->points.size() : 0;
}

pdplan_status pdplan_sweep_point_get(const pdplan_sweep* sweep, size_t index,
                                     pdplan_sweep_point* out) {
  return wrap([&] {
    require(sweep, "sweep");
    require(out, "out");
    if (index >= sweep->points.size()) {
      throw Error(ErrorCode::out_of_range, "sweep index past the end");
    }
    const pdplan::planner::SweepPoint& p = sweep->points[index];
    pdplan_sweep_point point = {};
    point.total_throughput_tps = p.total_throughput_tps;
    point.predicted_ttft_s = p.predicted_ttft_s;
    point.predicted_tpot_s = p.predicted_tpot_s;
    point.prefill_utilization = p.prefill_utilization;
    point.decode_batch = p.decode_batch;
    point.stable = p.stable ? 1 : 0;
    point.converged = p.converged ? 1 : 0;
    point.in_curve_range = p.in_curve_range ? 1 : 0;
    point.feasible = p.feasible ? 1 : 0;
    *out = point;
  });
}

int pdplan_sweep_has_simulation(const pdplan_sweep* sweep) {
  return sweep != nullptr && sweep->has_sim ? 1 : 0;
}

pdplan_status pdplan_sweep_sim_get(const pdplan_sweep* sweep, size_t index,
                                   pdplan_sim_result* out) {
  return wrap([&] {
    require(sweep, "sweep");
    require(out, "out");
    if (!sweep->has_sim) {
      throw Error(ErrorCode::invalid_argument,
                  "sweep was run without simulation");
    }
    if (index >= sweep->sims.size()) {
      throw Error(ErrorCode::out_of_range, "sweep index past the end");
    }
    *out = to_c(sweep->sims[index]);
  });
}

void pdplan_sweep_free(pdplan_sweep* sweep) { delete sweep; }

/* ------------------------------------------------------------------ */
/* Simulation                                                         */
/* ------------------------------------------------------------------ */

void pdplan_sim_config_init(pdplan_sim_config* config) {
  if (config == nullptr) {
    return;
  }
  std::memset(config, 0, sizeof(*config));
  config->n_prefill = 1;
  config->n_decode = 1;
  config->input_len = 1.0;
  config->output_len = 1;
  config->prefill_service = PDPLAN_SERVICE_EXPONENTIAL;
  config->warmup_fraction = 0.2;
}

pdplan_status pdplan_sim_run(const pdplan_sim_config* config,
                             const pdplan_decode_profile* decode,
                             pdplan_sim_result* out) {
  return wrap([&] {
    require(decode, "decode");
    require(out, "out");
    *out = to_c(pdplan::sim::run_sim(to_sim_config(config), decode->curve));
  });
}

uint64_t pdplan_derive_stream_seed(uint64_t seed, uint64_t run_index) {
  return pdplan::sim::derive_stream_seed(seed, run_index);
}

/* ------------------------------------------------------------------ */
/* M/M/1 validation                                                   */
/* ------------------------------------------------------------------ */

pdplan_status pdplan_validate_mm1(double max_throughput_tps, double input_len,
                                  const double* rates_rps, size_t n_rates,
                                  double overhead_s,
                                  const pdplan_sim_settings* settings,
                                  pdplan_mm1_row* rows_out) {
  return wrap([&] {
    if (n_rates > 0) {
      require(rows_out, "rows_out");
    }
    const std::vector<pdplan::sim::Mm1Row> rows =
        pdplan::sim::validate_against_mm1(
            scalar_profile(max_throughput_tps, input_len), input_len,
            to_span(rates_rps, n_rates, "rates_rps"), overhead_s,
            to_settings(settings));
    for (size_t i = 0; i < rows.size(); ++i) {
      rows_out[i].rate_rps = rows[i].rate_rps;
      rows_out[i].analytic_ttft_s = rows[i].analytic_ttft_s;
      rows_out[i].sim_ttft_s = rows[i].sim_ttft_s;
      rows_out[i].rel_err = rows[i].rel_err;
      rows_out[i].stable = rows[i].stable ? 1 : 0;
    }
  });
}

} /* extern "C" */
