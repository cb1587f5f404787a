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

#include "planner.h"

#include <cmath>
#include <limits>
#include <sstream>

#include "queueing.h"

namespace pdplan::planner {

namespace {

constexpr double kFixedPointTolerance = 1e-6;  // requests
constexpr int kFixedPointMaxIter = 100;
// Slack for SLO comparisons at the exact knee, where the predicted value
// equals the target up to rounding.
constexpr double kSloSlack = 1e-9;

void check_positive(double value, const char* name) {
  if (!(value > 0.0)) {
    std::ostringstream msg;
    msg << name << " must be positive";
    throw Error(ErrorCode::invalid_argument, msg.str());
  }
}

int round_component(double value, RoundPolicy policy) {
  double rounded = policy == RoundPolicy::ceil
                       ? std::ceil(value)
                       : std::floor(value + 0.5);  // ties round up
  rounded = std::max(rounded, 1.0);
  if (rounded > static_cast<double>(std::numeric_limits<int>::max())) {
    throw Error(ErrorCode::invalid_argument,
                "instance count overflows int; check the inputs");
  }
  return static_cast<int>(rounded);
}

// As achievable_total_throughput, but the prefill work length may differ from
// the mean input length used for the tokens-per-request conversion (prefix
// caching).
Capacity capacity(int n_prefill, int n_decode, double prefill_work_len,
                  double mean_input_len, double mean_output_len,
                  double prefill_tps, double decode_tps) {
  const double tokens_per_request = mean_input_len + mean_output_len;
  const double prefill_cap =
      n_prefill * prefill_tps * tokens_per_request / prefill_work_len;
  const double decode_cap =
      n_decode * decode_tps * tokens_per_request / mean_output_len;
  if (prefill_cap <= decode_cap) {
    return {prefill_cap, Phase::prefill};
  }
  return {decode_cap, Phase::decode};
}

// Count-dependent tail of planning: achievable throughput, binding phase,
// and the shortfall warning.
void apply_counts(AllocationPlan& result, const WorkloadSpec& workload,
                  int n_prefill, int n_decode) {
  result.n_prefill = n_prefill;
  result.n_decode = n_decode;
  const Capacity cap =
      capacity(n_prefill, n_decode, workload.planning_input_len(),
               workload.mean_input_len, workload.mean_output_len,
               result.eff_prefill_throughput_tps,
               result.eff_decode_throughput_tps);
  result.achievable_total_throughput_tps = cap.total_throughput_tps;
  result.binding_phase = cap.binding_phase;

  if (cap.total_throughput_tps < workload.total_throughput_tps) {
    const double shortfall =
        1.0 - cap.total_throughput_tps / workload.total_throughput_tps;
    std::ostringstream msg;
    msg << "rounded plan falls " << shortfall * 100.0
        << "% short of the requested throughput (achievable "
        << cap.total_throughput_tps << " tok/s, requested "
        << workload.total_throughput_tps
        << " tok/s); use the ceil policy for a strict guarantee";
    add_warning(result.warnings, {WarningCode::plan_shortfall, msg.str()});
  }
}

}  // namespace

double total_throughput(double n_requests, double input_len, double output_len,
                        double total_time_s) {
  check_positive(n_requests, "n_requests");
  check_positive(input_len, "input_len");
  check_positive(output_len, "output_len");
  check_positive(total_time_s, "total_time");
  return n_requests * (input_len + output_len) / total_time_s;
}

double pd_ratio(double input_len, double output_len, double prefill_tps,
                double decode_tps) {
  check_positive(input_len, "input_len");
  check_positive(output_len, "output_len");
  check_positive(prefill_tps, "prefill throughput");
  check_positive(decode_tps, "decode throughput");
  return (input_len * decode_tps) / (output_len * prefill_tps);
}

FractionalCounts fractional_counts(const WorkloadSpec& workload,
                                   double prefill_tps, double decode_tps) {
  validate_workload(workload);
  check_positive(prefill_tps, "prefill throughput");
  check_positive(decode_tps, "decode throughput");
  const double tokens_per_request = workload.tokens_per_request();
  FractionalCounts counts;
  counts.prefill = workload.total_throughput_tps *
                   workload.planning_input_len() /
                   (tokens_per_request * prefill_tps);
  counts.decode = workload.total_throughput_tps * workload.mean_output_len /
                  (tokens_per_request * decode_tps);
  return counts;
}

InstanceCounts round_plan(const FractionalCounts& frac, RoundPolicy policy) {
  check_positive(frac.prefill, "fractional prefill count");
  check_positive(frac.decode, "fractional decode count");
  return {round_component(frac.prefill, policy),
          round_component(frac.decode, policy)};
}

Capacity achievable_total_throughput(int n_prefill, int n_decode,
                                     double input_len, double output_len,
                                     double prefill_tps, double decode_tps) {
  if (n_prefill < 1 || n_decode < 1) {
    throw Error(ErrorCode::invalid_argument, "instance counts must be >= 1");
  }
  check_positive(input_len, "input_len");
  check_positive(output_len, "output_len");
  check_positive(prefill_tps, "prefill throughput");
  check_positive(decode_tps, "decode throughput");
  return capacity(n_prefill, n_decode, input_len, input_len, output_len,
                  prefill_tps, decode_tps);
}

AllocationPlan plan(const WorkloadSpec& workload, const SloSpec& slo,
                    const PrefillProfileSet& prefill_profiles,
                    const decode::DecodeCurve& curve, RoundPolicy policy) {
  validate_workload(workload);
  validate_slo(slo);

  const double prefill_len = workload.planning_input_len();
  const std::size_t row = prefill_profiles.select_nearest(prefill_len);
  const PrefillProfile& prefill = prefill_profiles.rows()[row];

  AllocationPlan result;
  result.selected_prefill_row = row;
  for (auto& w : queueing::shape_warnings(prefill, prefill_len)) {
    add_warning(result.warnings, std::move(w));
  }
  for (const auto& w : curve.warnings()) {
    add_warning(result.warnings, w);
  }
  for (auto& w : curve.shape_warnings(workload.mean_input_len,
                                      workload.mean_output_len)) {
    add_warning(result.warnings, std::move(w));
  }

  result.eff_prefill_throughput_tps =
      queueing::effective_prefill_throughput(prefill, prefill_len, slo);

  const decode::BatchForTpot hit =
      curve.max_batch_for_tpot(slo.tpot_target_s);
  if (hit.saturated) {
    std::ostringstream msg;
    msg << "TPOT target " << slo.tpot_target_s
        << " s is at or beyond the measured curve (max TPOT "
        << curve.max_tpot() << " s at batch " << curve.max_batch()
        << "); planning with the largest measured batch";
    add_warning(result.warnings, {WarningCode::tpot_saturated, msg.str()});
  }
  result.decode_batch = hit.batch;
  result.eff_decode_throughput_tps = hit.batch / hit.tpot_s;

  const FractionalCounts frac =
      fractional_counts(workload, result.eff_prefill_throughput_tps,
                        result.eff_decode_throughput_tps);
  result.frac_prefill = frac.prefill;
  result.frac_decode = frac.decode;
  result.pd_ratio =
      pd_ratio(prefill_len, workload.mean_output_len,
               result.eff_prefill_throughput_tps,
               result.eff_decode_throughput_tps);

  const InstanceCounts counts = round_plan(frac, policy);
  apply_counts(result, workload, counts.prefill, counts.decode);
  return result;
}

AllocationPlan plan_with_counts(const WorkloadSpec& workload,
                                const SloSpec& slo,
                                const PrefillProfileSet& prefill_profiles,
                                const decode::DecodeCurve& curve,
                                int n_prefill, int n_decode) {
  if (n_prefill < 1 || n_decode < 1) {
    throw Error(ErrorCode::invalid_argument, "instance counts must be >= 1");
  }
  AllocationPlan result =
      plan(workload, slo, prefill_profiles, curve, RoundPolicy::nearest);
  std::erase_if(result.warnings, [](const Warning& w) {
    return w.code == WarningCode::plan_shortfall;
  });
  apply_counts(result, workload, n_prefill, n_decode);
  return result;
}

std::vector<SweepPoint> sweep(const AllocationPlan& plan,
                              const WorkloadSpec& workload, const SloSpec& slo,
                              const PrefillProfile& prefill,
                              const decode::DecodeCurve& curve,
                              std::span<const double> grid_tps) {
  validate_workload(workload);
  validate_slo(slo);
  validate_prefill_profile(prefill);
  if (plan.n_prefill < 1 || plan.n_decode < 1) {
    throw Error(ErrorCode::invalid_argument, "plan counts must be >= 1");
  }

  const double prefill_len = workload.planning_input_len();
  const double tokens_per_request = workload.tokens_per_request();
  const double mu = prefill.max_throughput_tps / prefill_len;

  std::vector<SweepPoint> points;
  points.reserve(grid_tps.size());
  for (const double total_tps : grid_tps) {
    if (!(total_tps >= 0.0)) {
      throw Error(ErrorCode::invalid_argument,
                  "sweep grid values must be non-negative");
    }
    SweepPoint point;
    point.total_throughput_tps = total_tps;

    const double request_rate = total_tps / tokens_per_request;
    const double lambda = request_rate / plan.n_prefill;
    point.prefill_utilization = lambda / mu;
    point.stable = lambda < mu;
    point.predicted_ttft_s =
        point.stable
            ? queueing::predicted_ttft({mu, lambda}, slo.overhead_s)
            : std::numeric_limits<double>::infinity();

    // Little's-law concurrency per decode instance.
    const double decode_token_rate =
        request_rate / plan.n_decode * workload.mean_output_len;
    double batch = curve.min_batch();
    point.converged = false;
    for (int iter = 0; iter < kFixedPointMaxIter; ++iter) {
      const double next = decode_token_rate * curve.tpot_clamped(batch);
      const bool done = std::abs(next - batch) < kFixedPointTolerance;
      batch = next;
      if (done) {
        point.converged = true;
        break;
      }
    }
    point.decode_batch = batch;
    point.predicted_tpot_s = curve.tpot_clamped(batch);
    point.in_curve_range = batch <= curve.max_batch();

    point.feasible =
        point.stable && point.converged && point.in_curve_range &&
        point.predicted_ttft_s <= slo.ttft_target_s * (1.0 + kSloSlack) &&
        point.predicted_tpot_s <= slo.tpot_target_s * (1.0 + kSloSlack);
    points.push_back(point);
  }
  return points;
}

}  // namespace pdplan::planner
