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

// Benchmarked decode behavior: TPOT grows with the continuous-batching batch
// size, and so does throughput (= batch / TPOT). The curve answers "what
// decode throughput is achievable under a TPOT target" by finding the largest
// batch whose TPOT still meets the target.
//
// TPOT is the measured primitive. Interpolation is piecewise-linear on
// (batch, TPOT) and throughput is derived by division afterwards, so the
// identity throughput * tpot == batch holds exactly at the knots. The curve
// is never extrapolated beyond the measured batch range.

namespace pdplan::decode {

struct DecodeOperatingPoint {
  double batch = 0.0;  // may be fractional after interpolation
  double tpot_s = 0.0;
  double throughput_tps = 0.0;  // batch / tpot
};

struct BatchForTpot {
  double batch = 0.0;
  double tpot_s = 0.0;
  // Target at or beyond the measured TPOT range; the largest measured batch
  // was returned instead of extrapolating.
  bool saturated = false;
};

class DecodeCurve {
 public:
  // Relative dip between consecutive points still treated as benchmark noise.
  static constexpr double kNoiseTolerance = 0.01;
  // Allowed relative gap between batch/tpot and engine-reported throughput.
  static constexpr double kEngineGapTolerance = 0.10;
  static constexpr double kShapeMismatchTolerance = 0.25;

  // Validates the profile: strictly increasing batches, nondecreasing TPOT,
  // nondecreasing derived throughput. Dips within kNoiseTolerance become
  // warnings; anything worse throws malformed_profile naming the point pair.
  explicit DecodeCurve(DecodeProfile profile);

  const DecodeProfile& profile() const { return profile_; }
  const std::vector<Warning>& warnings() const { return warnings_; }

  double min_batch() const { return profile_.points.front().batch; }
  double max_batch() const { return profile_.points.back().batch; }
  // Pointwise extremes (identical to first/last tpot for a clean monotone
  // curve, but robust to tolerated noise dips).
  double min_tpot() const { return min_tpot_; }
  double max_tpot() const { return max_tpot_; }

  // Piecewise-linear TPOT at batch; throws out_of_range outside the measured
  // batch range. Exact at the knots.
  double tpot_at(double batch) const;

  // TPOT with the evaluation point clamped into the measured batch range.
  double tpot_clamped(double batch) const;

  // batch / interpolated TPOT; in-range only.
  double throughput_at(double batch) const;

  // Largest batch whose interpolated TPOT still meets the target. Saturates
  // at the largest measured batch when the target is at or beyond the
  // measured TPOT range; throws infeasible_slo_decode when even the smallest
  // measured TPOT exceeds the target.
  BatchForTpot max_batch_for_tpot(double tpot_target_s) const;

  // max_batch_for_tpot composed with the throughput quotient. The returned
  // point satisfies tpot <= target and throughput * tpot == batch.
  DecodeOperatingPoint operating_point_for_tpot(double tpot_target_s) const;

  // Planning caveat when the workload shape differs from the benchmark shape
  // by more than 25% in either length. No-op when the benchmark shape is
  // unknown (profile lengths zero).
  std::vector<Warning> shape_warnings(double input_len,
                                      double output_len) const;

 private:
  DecodeProfile profile_;
  std::vector<Warning> warnings_;
  double min_tpot_ = 0.0;
  double max_tpot_ = 0.0;
};

}  // namespace pdplan::decode
