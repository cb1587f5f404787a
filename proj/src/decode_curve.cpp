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

#include "decode_curve.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

namespace pdplan::decode {

namespace {

double knot_throughput(const DecodePoint& p) { return p.batch / p.tpot_s; }

}  // namespace

DecodeCurve::DecodeCurve(DecodeProfile profile) : profile_(std::move(profile)) {
  const auto& pts = profile_.points;
  if (pts.size() < 2) {
    throw Error(ErrorCode::malformed_profile,
                "decode profile needs at least 2 points");
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!(pts[i].batch >= 1.0)) {
      std::ostringstream msg;
      msg << "decode profile point " << i << ": batch size must be >= 1";
      throw Error(ErrorCode::malformed_profile, msg.str());
    }
    if (!(pts[i].tpot_s > 0.0)) {
      std::ostringstream msg;
      msg << "decode profile point " << i << ": tpot must be positive";
      throw Error(ErrorCode::malformed_profile, msg.str());
    }
  }
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (pts[i + 1].batch <= pts[i].batch) {
      std::ostringstream msg;
      msg << "decode profile points " << i << " and " << i + 1
          << ": batch sizes must be strictly increasing (" << pts[i].batch
          << " then " << pts[i + 1].batch << ")";
      throw Error(ErrorCode::malformed_profile, msg.str());
    }
    if (pts[i + 1].tpot_s < pts[i].tpot_s) {
      const double dip = (pts[i].tpot_s - pts[i + 1].tpot_s) / pts[i].tpot_s;
      std::ostringstream msg;
      msg << "decode profile points " << i << " and " << i + 1
          << ": tpot dips by " << dip * 100.0 << "% (from " << pts[i].tpot_s
          << " s to " << pts[i + 1].tpot_s << " s)";
      if (dip > kNoiseTolerance) {
        throw Error(ErrorCode::malformed_profile, msg.str());
      }
      add_warning(warnings_, {WarningCode::decode_curve_noise, msg.str()});
    }
    const double thr_lo = knot_throughput(pts[i]);
    const double thr_hi = knot_throughput(pts[i + 1]);
    if (thr_hi < thr_lo) {
      const double dip = (thr_lo - thr_hi) / thr_lo;
      std::ostringstream msg;
      msg << "decode profile points " << i << " and " << i + 1
          << ": derived throughput dips by " << dip * 100.0 << "% (from "
          << thr_lo << " tok/s to " << thr_hi << " tok/s)";
      if (dip > kNoiseTolerance) {
        throw Error(ErrorCode::malformed_profile, msg.str());
      }
      add_warning(warnings_, {WarningCode::decode_curve_noise, msg.str()});
    }
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (!pts[i].engine_throughput_tps) {
      continue;
    }
    const double engine = *pts[i].engine_throughput_tps;
    if (!(engine > 0.0)) {
      std::ostringstream msg;
      msg << "decode profile point " << i
          << ": engine-reported throughput must be positive";
      throw Error(ErrorCode::malformed_profile, msg.str());
    }
    const double quotient = knot_throughput(pts[i]);
    const double gap = std::abs(quotient - engine) / engine;
    if (gap > kEngineGapTolerance) {
      std::ostringstream msg;
      msg << "decode profile point " << i << ": batch/tpot gives " << quotient
          << " tok/s but the engine reported " << engine << " tok/s ("
          << gap * 100.0 << "% apart)";
      add_warning(warnings_, {WarningCode::engine_throughput_gap, msg.str()});
    }
  }
  min_tpot_ = pts.front().tpot_s;
  max_tpot_ = pts.front().tpot_s;
  for (const auto& p : pts) {
    min_tpot_ = std::min(min_tpot_, p.tpot_s);
    max_tpot_ = std::max(max_tpot_, p.tpot_s);
  }
}

double DecodeCurve::tpot_at(double batch) const {
  if (!std::isfinite(batch) || batch < min_batch() || batch > max_batch()) {
    std::ostringstream msg;
    msg << "batch size " << batch << " is outside the measured range ["
        << min_batch() << ", " << max_batch()
        << "]; the curve is not extrapolated";
    throw Error(ErrorCode::out_of_range, msg.str());
  }
  const auto& pts = profile_.points;
  // First point with point.batch >= batch.
  auto hi = std::lower_bound(
      pts.begin(), pts.end(), batch,
      [](const DecodePoint& p, double b) { return p.batch < b; });
  if (hi->batch == batch) {
    return hi->tpot_s;  // exact at knots
  }
  const auto lo = hi - 1;
  const double t = (batch - lo->batch) / (hi->batch - lo->batch);
  return lo->tpot_s + t * (hi->tpot_s - lo->tpot_s);
}

double DecodeCurve::tpot_clamped(double batch) const {
  return tpot_at(std::clamp(batch, min_batch(), max_batch()));
}

double DecodeCurve::throughput_at(double batch) const {
  return batch / tpot_at(batch);
}

BatchForTpot DecodeCurve::max_batch_for_tpot(double tpot_target_s) const {
  if (!(tpot_target_s > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "tpot_target must be positive");
  }
  if (tpot_target_s < min_tpot_) {
    std::ostringstream msg;
    msg << "infeasible TPOT target " << tpot_target_s
        << " s: even the smallest measured batch needs " << min_tpot_ << " s";
    throw Error(ErrorCode::infeasible_slo_decode, msg.str());
  }
  const auto& pts = profile_.points;
  if (tpot_target_s >= max_tpot_) {
    // The whole measured range satisfies the target; clamp instead of
    // extrapolating past it.
    return {pts.back().batch, pts.back().tpot_s, true};
  }
  // Largest batch with interpolated TPOT <= target. Scanning segments from
  // the right keeps this correct even with tolerated noise dips.
  for (std::size_t i = pts.size() - 1; i > 0; --i) {
    const auto& lo = pts[i - 1];
    const auto& hi = pts[i];
    if (hi.tpot_s <= tpot_target_s) {
      return {hi.batch, hi.tpot_s, i + 1 == pts.size()};
    }
    if (lo.tpot_s <= tpot_target_s) {
      // Crossing inside this segment; hi.tpot > target >= lo.tpot.
      const double t =
          (tpot_target_s - lo.tpot_s) / (hi.tpot_s - lo.tpot_s);
      const double batch = lo.batch + t * (hi.batch - lo.batch);
      return {batch, tpot_target_s, false};
    }
  }
  // Unreachable: tpot_target_s >= min_tpot_ guarantees a hit above.
  throw Error(ErrorCode::infeasible_slo_decode, "no batch meets the target");
}

DecodeOperatingPoint DecodeCurve::operating_point_for_tpot(
    double tpot_target_s) const {
  const BatchForTpot hit = max_batch_for_tpot(tpot_target_s);
  return {hit.batch, hit.tpot_s, hit.batch / hit.tpot_s};
}

std::vector<Warning> DecodeCurve::shape_warnings(double input_len,
                                                 double output_len) const {
  std::vector<Warning> warnings;
  if (profile_.input_len <= 0.0 || profile_.output_len <= 0.0) {
    return warnings;  // benchmark shape unknown
  }
  const double in_gap =
      std::abs(profile_.input_len - input_len) / input_len;
  const double out_gap =
      std::abs(profile_.output_len - output_len) / output_len;
  if (in_gap > kShapeMismatchTolerance || out_gap > kShapeMismatchTolerance) {
    std::ostringstream msg;
    msg << "decode profile shape mismatch: curve benchmarked at "
        << profile_.input_len << "/" << profile_.output_len
        << " (input/output), planning with " << input_len << "/" << output_len
        << "; TPOT curves differ across shapes";
    add_warning(warnings, {WarningCode::decode_shape_mismatch, msg.str()});
  }
  return warnings;
}

}  // namespace pdplan::decode
