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

#include <span>
#include <vector>

#include "decode_curve.h"
#include "types.h"

// Combines the TTFT-constrained prefill throughput and the TPOT-constrained
// decode throughput into instance counts. With pipelined phases, keeping both
// pools busy requires equal phase times, which yields
//   n_prefill = TP_total * L_in  / ((L_in + L_out) * tp_prefill)
//   n_decode  = TP_total * L_out / ((L_in + L_out) * tp_decode)
// and the prefill:decode ratio (L_in * tp_decode) / (L_out * tp_prefill),
// independent of the total throughput.

namespace pdplan::planner {

enum class RoundPolicy { nearest, ceil };

struct FractionalCounts {
  double prefill = 0.0;
  double decode = 0.0;
};

struct InstanceCounts {
  int prefill = 0;
  int decode = 0;
};

struct Capacity {
  double total_throughput_tps = 0.0;
  Phase binding_phase = Phase::prefill;
};

// Aggregate token throughput: n_requests * (L_in + L_out) / total_time.
double total_throughput(double n_requests, double input_len, double output_len,
                        double total_time_s);

// (L_in * tp_decode) / (L_out * tp_prefill).
double pd_ratio(double input_len, double output_len, double prefill_tps,
                double decode_tps);

// Real-valued instance counts meeting the workload's total throughput. The
// prefill work term uses the workload's planning input length (the effective
// length under prefix caching); the tokens-per-request conversion always uses
// the mean lengths. Their ratio equals pd_ratio exactly.
FractionalCounts fractional_counts(const WorkloadSpec& workload,
                                   double prefill_tps, double decode_tps);

// Per-component rounding, floored at 1; `nearest` rounds half up.
InstanceCounts round_plan(const FractionalCounts& frac, RoundPolicy policy);

// Total throughput an integer deployment can sustain and which phase caps it:
//   min(n_prefill * tp_prefill * (L_in+L_out) / L_in,
//       n_decode  * tp_decode  * (L_in+L_out) / L_out).
Capacity achievable_total_throughput(int n_prefill, int n_decode,
                                     double input_len, double output_len,
                                     double prefill_tps, double decode_tps);

// End-to-end: effective throughputs from the SLOs, fractional counts, integer
// rounding, achievable throughput. Infeasible SLOs propagate tagged with the
// failing phase; under the `nearest` policy a shortfall against the requested
// throughput becomes a warning.
AllocationPlan plan(const WorkloadSpec& workload, const SloSpec& slo,
                    const PrefillProfileSet& prefill_profiles,
                    const decode::DecodeCurve& curve, RoundPolicy policy);

// Same pipeline with the instance counts imposed instead of derived, for
// evaluating an alternative deployment against the same workload and SLOs.
AllocationPlan plan_with_counts(const WorkloadSpec& workload,
                                const SloSpec& slo,
                                const PrefillProfileSet& prefill_profiles,
                                const decode::DecodeCurve& curve,
                                int n_prefill, int n_decode);

struct SweepPoint {
  double total_throughput_tps = 0.0;
  double predicted_ttft_s = 0.0;     // +inf when the prefill queue is unstable
  double predicted_tpot_s = 0.0;
  double prefill_utilization = 0.0;  // lambda/mu; may exceed 1 when unstable
  double decode_batch = 0.0;         // per-instance steady-state concurrency
  bool stable = false;               // per-instance lambda < mu
  bool converged = false;            // decode fixed point converged
  bool in_curve_range = false;       // decode batch within the measured range
  bool feasible = false;  // stable, converged, in range, both SLOs met
};

// Predicted TTFT/TPOT at each load level for a fixed deployment. The decode
// batch per instance is the steady-state concurrency: the fixed point of
//   batch = (request rate per decode instance) * L_out * TPOT(batch),
// iterated on the curve (clamped to the measured range) until successive
// iterates differ by < 1e-6 requests, at most 100 iterations.
std::vector<SweepPoint> sweep(const AllocationPlan& plan,
                              const WorkloadSpec& workload, const SloSpec& slo,
                              const PrefillProfile& prefill,
                              const decode::DecodeCurve& curve,
                              std::span<const double> grid_tps);

}  // namespace pdplan::planner
