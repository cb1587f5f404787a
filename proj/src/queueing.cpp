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

#include "queueing.h"

#include <cmath>
#include <sstream>

namespace pdplan::queueing {

namespace {

constexpr double kShapeMismatchTolerance = 0.25;

void check_params(const QueueParams& params) {
  if (!(params.service_rate_rps > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "service rate must be positive");
  }
  if (!(params.arrival_rate_rps >= 0.0)) {
    throw Error(ErrorCode::invalid_argument,
                "arrival rate must be non-negative");
  }
}

void check_stable(const QueueParams& params) {
  check_params(params);
  if (params.arrival_rate_rps >= params.service_rate_rps) {
    std::ostringstream msg;
    msg << "unstable queue: arrival rate " << params.arrival_rate_rps
        << " req/s >= service rate " << params.service_rate_rps << " req/s";
    throw Error(ErrorCode::unstable_queue, msg.str());
  }
}

void check_input_len(double input_len) {
  if (!(input_len >= 1.0)) {
    throw Error(ErrorCode::invalid_argument, "input_len must be >= 1");
  }
}

}  // namespace

double service_rate(const PrefillProfile& profile, double input_len) {
  validate_prefill_profile(profile);
  check_input_len(input_len);
  return profile.max_throughput_tps / input_len;
}

double utilization(const QueueParams& params) {
  check_stable(params);
  return params.arrival_rate_rps / params.service_rate_rps;
}

double predicted_sojourn(const QueueParams& params) {
  check_stable(params);
  return 1.0 / (params.service_rate_rps - params.arrival_rate_rps);
}

double predicted_ttft(const QueueParams& params, double overhead_s) {
  if (!(overhead_s >= 0.0)) {
    throw Error(ErrorCode::invalid_argument,
                "overhead_time must be non-negative");
  }
  return predicted_sojourn(params) + overhead_s;
}

double effective_prefill_throughput(const PrefillProfile& profile,
                                    double input_len, const SloSpec& slo) {
  validate_prefill_profile(profile);
  validate_slo(slo);
  check_input_len(input_len);
  const double budget = slo.prefill_budget_s();
  const double value = profile.max_throughput_tps - input_len / budget;
  if (!(value > 0.0)) {
    std::ostringstream msg;
    msg << "infeasible TTFT target: prefill budget " << budget
        << " s does not exceed the zero-load prefill time "
        << input_len / profile.max_throughput_tps << " s";
    throw Error(ErrorCode::infeasible_slo_prefill, msg.str());
  }
  return value;
}

double max_arrival_rate(const PrefillProfile& profile, double input_len,
                        const SloSpec& slo) {
  validate_prefill_profile(profile);
  validate_slo(slo);
  check_input_len(input_len);
  const double mu = profile.max_throughput_tps / input_len;
  const double rate = mu - 1.0 / slo.prefill_budget_s();
  if (rate < 0.0) {
    std::ostringstream msg;
    msg << "infeasible TTFT target: prefill budget " << slo.prefill_budget_s()
        << " s is below the zero-load prefill time " << 1.0 / mu << " s";
    throw Error(ErrorCode::infeasible_slo_prefill, msg.str());
  }
  return rate;
}

std::vector<Warning> shape_warnings(const PrefillProfile& profile,
                                    double input_len) {
  validate_prefill_profile(profile);
  check_input_len(input_len);
  std::vector<Warning> warnings;
  const double mismatch =
      std::abs(profile.input_len - input_len) / input_len;
  if (mismatch > kShapeMismatchTolerance) {
    std::ostringstream msg;
    msg << "prefill profile shape mismatch: profile measured at input length "
        << profile.input_len << ", planning with " << input_len << " ("
        << mismatch * 100.0 << "% apart); prefill throughput is "
        << "shape-dependent";
    add_warning(warnings, {WarningCode::prefill_shape_mismatch, msg.str()});
  }
  if (profile.chunked_prefill_size > input_len) {
    std::ostringstream msg;
    msg << "chunked prefill size " << profile.chunked_prefill_size
        << " exceeds the input length " << input_len
        << "; queued requests may be batched together, so the sequential "
        << "M/M/1 model is an approximation";
    add_warning(warnings,
                {WarningCode::chunked_prefill_approximation, msg.str()});
  }
  return warnings;
}

}  // namespace pdplan::queueing
