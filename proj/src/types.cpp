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

#include "types.h"

#include <algorithm>
#include <cmath>
#include <utility>

namespace pdplan {

namespace {

// !(x > 0) style comparisons are deliberate: they also catch NaN.
bool positive(double x) { return std::isfinite(x) && x > 0.0; }
bool at_least(double x, double bound) { return std::isfinite(x) && x >= bound; }

}  // namespace

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument:
      return "invalid_argument";
    case ErrorCode::unstable_queue:
      return "unstable_queue";
    case ErrorCode::infeasible_slo_prefill:
      return "infeasible_slo_prefill";
    case ErrorCode::infeasible_slo_decode:
      return "infeasible_slo_decode";
    case ErrorCode::malformed_profile:
      return "malformed_profile";
    case ErrorCode::out_of_range:
      return "out_of_range";
    case ErrorCode::io_error:
      return "io_error";
  }
  return "unknown";
}

const char* phase_name(Phase phase) {
  return phase == Phase::prefill ? "prefill" : "decode";
}

void add_warning(std::vector<Warning>& warnings, Warning w) {
  if (std::find(warnings.begin(), warnings.end(), w) == warnings.end()) {
    warnings.push_back(std::move(w));
  }
}

WorkloadSpec validate_workload(const WorkloadSpec& spec) {
  if (!positive(spec.total_throughput_tps)) {
    throw Error(ErrorCode::invalid_argument,
                "total_throughput must be positive");
  }
  if (!at_least(spec.mean_input_len, 1.0)) {
    throw Error(ErrorCode::invalid_argument, "mean_input_len must be >= 1");
  }
  if (!at_least(spec.mean_output_len, 1.0)) {
    throw Error(ErrorCode::invalid_argument, "mean_output_len must be >= 1");
  }
  if (spec.effective_input_len) {
    if (!at_least(*spec.effective_input_len, 1.0)) {
      throw Error(ErrorCode::invalid_argument,
                  "effective_input_len must be >= 1");
    }
    if (*spec.effective_input_len > spec.mean_input_len) {
      throw Error(ErrorCode::invalid_argument,
                  "effective_input_len must not exceed mean_input_len");
    }
  }
  return spec;
}

SloSpec validate_slo(const SloSpec& slo) {
  if (!positive(slo.ttft_target_s)) {
    throw Error(ErrorCode::invalid_argument, "ttft_target must be positive");
  }
  if (!positive(slo.tpot_target_s)) {
    throw Error(ErrorCode::invalid_argument, "tpot_target must be positive");
  }
  if (!at_least(slo.overhead_s, 0.0)) {
    throw Error(ErrorCode::invalid_argument,
                "overhead_time must be non-negative");
  }
  if (slo.ttft_target_s <= slo.overhead_s) {
    throw Error(ErrorCode::invalid_argument,
                "ttft_target must exceed overhead_time, otherwise no prefill "
                "time budget exists");
  }
  return slo;
}

PrefillProfile validate_prefill_profile(const PrefillProfile& profile) {
  if (!at_least(profile.input_len, 1.0)) {
    throw Error(ErrorCode::invalid_argument,
                "prefill profile input_len must be >= 1");
  }
  if (!at_least(profile.chunked_prefill_size, 1.0)) {
    throw Error(ErrorCode::invalid_argument,
                "prefill profile chunked_prefill_size must be >= 1");
  }
  if (!positive(profile.max_throughput_tps)) {
    throw Error(ErrorCode::invalid_argument,
                "prefill profile max_throughput must be positive");
  }
  return profile;
}

PrefillProfileSet::PrefillProfileSet(std::vector<PrefillProfile> rows)
    : rows_(std::move(rows)) {
  for (const auto& row : rows_) {
    validate_prefill_profile(row);
  }
}

std::size_t PrefillProfileSet::select_nearest(double target_input_len) const {
  if (rows_.empty()) {
    throw Error(ErrorCode::invalid_argument,
                "prefill profile set has no rows");
  }
  std::size_t best = 0;
  double best_dist = std::abs(rows_[0].input_len - target_input_len);
  for (std::size_t i = 1; i < rows_.size(); ++i) {
    const double dist = std::abs(rows_[i].input_len - target_input_len);
    if (dist < best_dist) {
      best = i;
      best_dist = dist;
    }
  }
  return best;
}

}  // namespace pdplan
