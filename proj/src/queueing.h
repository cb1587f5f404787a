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

#include <vector>

#include "types.h"

// M/M/1 analytics for a single prefill instance. A prefill instance serves
// whole requests FIFO; with Poisson arrivals at rate lambda and service rate
// mu = max_throughput / input_len, the steady-state mean sojourn (queueing +
// computation) is 1/(mu - lambda). TTFT adds the fixed overhead on top.
//
// All functions are pure; unstable inputs (lambda >= mu) are rejected rather
// than clamped.

namespace pdplan::queueing {

struct QueueParams {
  double service_rate_rps = 0.0;  // mu
  double arrival_rate_rps = 0.0;  // lambda
};

// mu: ratio of the benchmarked maximum prefill throughput to the input length.
double service_rate(const PrefillProfile& profile, double input_len);

// rho = lambda / mu, in [0, 1) for a stable queue.
double utilization(const QueueParams& params);

// Mean queueing + computation time, 1/(mu - lambda). Equals the bare service
// time 1/mu at lambda = 0.
double predicted_sojourn(const QueueParams& params);

// Sojourn plus the fixed overhead; strictly increasing in lambda.
double predicted_ttft(const QueueParams& params, double overhead_s);

// Prefill token throughput achievable under the TTFT target:
//   max_throughput - input_len / (ttft - overhead).
// Throws infeasible_slo_prefill when the zero-load sojourn alone exceeds the
// budget (the result would be <= 0).
double effective_prefill_throughput(const PrefillProfile& profile,
                                    double input_len, const SloSpec& slo);

// Largest stable request rate under the TTFT target, mu - 1/(ttft - overhead).
// Satisfies max_arrival_rate * input_len == effective_prefill_throughput.
// Returns 0 when the budget exactly equals the zero-load sojourn.
double max_arrival_rate(const PrefillProfile& profile, double input_len,
                        const SloSpec& slo);

// Non-fatal caveats for planning with this profile at this input length:
// a shape mismatch beyond 25%, and the chunked-prefill approximation note
// when the chunk size exceeds the request length (queued requests may then be
// batched together, which only approximates sequential M/M/1 service).
std::vector<Warning> shape_warnings(const PrefillProfile& profile,
                                    double input_len);

}  // namespace pdplan::queueing
