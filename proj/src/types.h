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

#include <cstddef>
#include <optional>
#include <vector>

#include "error.h"

// Unit conventions, used everywhere below: throughputs in tokens per second,
// times in seconds, lengths in tokens, rates in requests per second. The only
// other unit in the project is M TPM (million tokens per minute), converted at
// the CLI boundary.

namespace pdplan {

// User demand: aggregate token throughput and the mean request shape.
struct WorkloadSpec {
  double total_throughput_tps = 0.0;  // input + output tokens per second
  double mean_input_len = 0.0;
  double mean_output_len = 0.0;
  // Prefix-cache-adjusted prefill length: the portion of the input that does
  // not hit the KV cache. Substituted for mean_input_len in every prefill
  // work term; demand conversion (tokens per request) keeps the mean lengths.
  std::optional<double> effective_input_len;

  double planning_input_len() const {
    return effective_input_len.value_or(mean_input_len);
  }
  double tokens_per_request() const { return mean_input_len + mean_output_len; }
  double request_rate_rps() const {
    return total_throughput_tps / tokens_per_request();
  }
};

struct SloSpec {
  double ttft_target_s = 0.0;
  double tpot_target_s = 0.0;
  // Client <-> server transfer plus P->D KV-cache transfer, pre-determined.
  double overhead_s = 0.0;

  double prefill_budget_s() const { return ttft_target_s - overhead_s; }
};

// One benchmarked prefill operating point: peak token throughput measured with
// the GPUs kept free of idle time, at a given input length and chunk size.
struct PrefillProfile {
  double input_len = 0.0;
  double chunked_prefill_size = 0.0;
  double max_throughput_tps = 0.0;
};

struct DecodePoint {
  double batch = 0.0;
  double tpot_s = 0.0;
  // Engine-reported throughput for the same batch, when the benchmark logged
  // it. Used only to cross-check batch/tpot.
  std::optional<double> engine_throughput_tps;
};

// Benchmarked TPOT-vs-batch curve for one workload shape. input_len and
// output_len are zero when the benchmark shape was not recorded.
struct DecodeProfile {
  double input_len = 0.0;
  double output_len = 0.0;
  std::vector<DecodePoint> points;
};

enum class Phase { prefill, decode };

const char* phase_name(Phase phase);

struct AllocationPlan {
  double frac_prefill = 0.0;
  double frac_decode = 0.0;
  int n_prefill = 0;
  int n_decode = 0;
  double pd_ratio = 0.0;
  double eff_prefill_throughput_tps = 0.0;
  double eff_decode_throughput_tps = 0.0;
  double decode_batch = 0.0;  // TPOT-feasible batch size per decode instance
  double achievable_total_throughput_tps = 0.0;
  Phase binding_phase = Phase::prefill;
  std::size_t selected_prefill_row = 0;
  std::vector<Warning> warnings;
};

// Validation is total: each returns its argument unchanged or throws Error
// naming the first violated invariant.
WorkloadSpec validate_workload(const WorkloadSpec& spec);
SloSpec validate_slo(const SloSpec& slo);
PrefillProfile validate_prefill_profile(const PrefillProfile& profile);

// Ordered set of prefill operating points, one per benchmarked input shape.
class PrefillProfileSet {
 public:
  PrefillProfileSet() = default;
  explicit PrefillProfileSet(std::vector<PrefillProfile> rows);

  const std::vector<PrefillProfile>& rows() const { return rows_; }
  bool empty() const { return rows_.empty(); }

  // Index of the row whose input_len is nearest target_input_len; the earlier
  // row wins ties. Throws on an empty set.
  std::size_t select_nearest(double target_input_len) const;

 private:
  std::vector<PrefillProfile> rows_;
};

}  // namespace pdplan
