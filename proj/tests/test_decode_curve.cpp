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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <string>

#include "decode_curve.h"
#include "doctest.h"
#include "support/curves.h"

using namespace pdplan;
using namespace pdplan::decode;

namespace {

DecodeProfile shapeless(std::vector<DecodePoint> points) {
  return {0.0, 0.0, std::move(points)};
}

ErrorCode ctor_error(std::vector<DecodePoint> points) {
  try {
    DecodeCurve curve(shapeless(std::move(points)));
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected the constructor to throw");
  return ErrorCode::invalid_argument;
}

}  // namespace

TEST_CASE("curve accessors and knot exactness") {
  const DecodeCurve curve = testing::decode_curve_6144_512();
  CHECK(curve.warnings().empty());
  CHECK(curve.min_batch() == 4.0);
  CHECK(curve.max_batch() == 64.0);
  CHECK(curve.min_tpot() == 0.0105);
  CHECK(curve.max_tpot() == 0.032);
  for (const auto& p : curve.profile().points) {
    CHECK(curve.tpot_at(p.batch) == p.tpot_s);
    CHECK(curve.throughput_at(p.batch) * p.tpot_s ==
          doctest::Approx(p.batch).epsilon(1e-12));
  }
  CHECK(curve.tpot_at(34.0) == 0.020);
  CHECK(curve.throughput_at(34.0) == 1700.0);
}

TEST_CASE("linear interpolation between knots") {
  const DecodeCurve curve(shapeless({{1.0, 0.001}, {3.0, 0.003}}));
  CHECK(curve.tpot_at(2.0) == 0.002);
  CHECK(curve.throughput_at(2.0) == 1000.0);
  CHECK(curve.tpot_at(1.5) == doctest::Approx(0.0015).epsilon(1e-15));
}

TEST_CASE("no extrapolation outside the measured batch range") {
  const DecodeCurve curve = testing::decode_curve_6144_512();
  CHECK_THROWS_AS(curve.tpot_at(3.9), Error);
  CHECK_THROWS_AS(curve.tpot_at(64.1), Error);
  CHECK_THROWS_AS(curve.tpot_at(std::nan("")), Error);
  try {
    curve.throughput_at(100.0);
    FAIL("expected out_of_range");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::out_of_range);
  }
  CHECK(curve.tpot_clamped(1.0) == 0.0105);
  CHECK(curve.tpot_clamped(100.0) == 0.032);
  CHECK(curve.tpot_clamped(34.0) == 0.020);
}

TEST_CASE("largest batch under a TPOT target") {
  const DecodeCurve curve = testing::decode_curve_6144_512();

  // Target sitting exactly on a knot.
  BatchForTpot hit = curve.max_batch_for_tpot(0.020);
  CHECK(hit.batch == 34.0);
  CHECK(hit.tpot_s == 0.020);
  CHECK_FALSE(hit.saturated);

  // Target halfway into the first segment.
  hit = curve.max_batch_for_tpot(0.011);
  CHECK(hit.batch == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(hit.tpot_s == 0.011);
  CHECK_FALSE(hit.saturated);

  // Target at the smallest measured TPOT.
  hit = curve.max_batch_for_tpot(0.0105);
  CHECK(hit.batch == 4.0);
  CHECK_FALSE(hit.saturated);

  // Targets at or beyond the top of the curve clamp to the largest batch.
  for (double target : {0.032, 0.05, 1.0}) {
    hit = curve.max_batch_for_tpot(target);
    CHECK(hit.batch == 64.0);
    CHECK(hit.tpot_s == 0.032);
    CHECK(hit.saturated);
  }

  try {
    curve.max_batch_for_tpot(0.0104);
    FAIL("expected infeasible_slo_decode");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::infeasible_slo_decode);
  }
  CHECK_THROWS_AS(curve.max_batch_for_tpot(0.0), Error);
  CHECK_THROWS_AS(curve.max_batch_for_tpot(-0.02), Error);
}

TEST_CASE("operating point composes batch and throughput") {
  const DecodeCurve curve = testing::decode_curve_6144_512();
  const DecodeOperatingPoint pt = curve.operating_point_for_tpot(0.020);
  CHECK(pt.batch == 34.0);
  CHECK(pt.tpot_s == 0.020);
  CHECK(pt.throughput_tps == 1700.0);

  const DecodeOperatingPoint mid = curve.operating_point_for_tpot(0.011);
  CHECK(mid.throughput_tps * mid.tpot_s ==
        doctest::Approx(mid.batch).epsilon(1e-12));
}

TEST_CASE("throughput under the target never decreases with the target") {
  const DecodeCurve curve = testing::decode_curve_6144_512();
  double last = 0.0;
  for (double target = 0.0105; target <= 0.04; target += 0.0005) {
    const double thr = curve.operating_point_for_tpot(target).throughput_tps;
    CHECK(thr >= last);
    last = thr;
  }
}

TEST_CASE("profile validation") {
  CHECK(ctor_error({{4.0, 0.01}}) == ErrorCode::malformed_profile);
  CHECK(ctor_error({{0.5, 0.01}, {8.0, 0.02}}) == ErrorCode::malformed_profile);
  CHECK(ctor_error({{4.0, 0.0}, {8.0, 0.02}}) == ErrorCode::malformed_profile);
  CHECK(ctor_error({{4.0, 0.01}, {4.0, 0.02}}) == ErrorCode::malformed_profile);
  CHECK(ctor_error({{8.0, 0.01}, {4.0, 0.02}}) == ErrorCode::malformed_profile);

  // The duplicate-batch error names the offending pair.
  try {
    DecodeCurve curve(shapeless({{4.0, 0.01}, {6.0, 0.015}, {6.0, 0.02}}));
    FAIL("expected malformed_profile");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("points 1 and 2") != std::string::npos);
  }
}

TEST_CASE("tpot dips: noise below 1% warns, anything worse throws") {
  // 2% dip.
  CHECK(ctor_error({{4.0, 0.0100}, {8.0, 0.0098}}) ==
        ErrorCode::malformed_profile);

  // 0.5% dip passes with a warning.
  const DecodeCurve noisy(shapeless({{4.0, 0.0100}, {8.0, 0.00995}}));
  REQUIRE(noisy.warnings().size() == 1);
  CHECK(noisy.warnings()[0].code == WarningCode::decode_curve_noise);

  // Tolerated dips keep the query functions usable.
  const DecodeCurve dipped(
      shapeless({{1.0, 0.0100}, {2.0, 0.00995}, {3.0, 0.0110}}));
  CHECK(dipped.min_tpot() == 0.00995);
  CHECK(dipped.max_tpot() == 0.0110);
  const BatchForTpot hit = dipped.max_batch_for_tpot(0.00997);
  CHECK(hit.batch > 2.0);
  CHECK(hit.batch < 3.0);
  CHECK(hit.tpot_s == 0.00997);
}

TEST_CASE("derived throughput must not dip either") {
  // batch/tpot falls from 400 to ~352 tok/s: a real regression, rejected.
  CHECK(ctor_error({{4.0, 0.0100}, {4.05, 0.0115}}) ==
        ErrorCode::malformed_profile);

  // A sub-1% throughput dip with nondecreasing tpot is tolerated.
  const DecodeCurve noisy(shapeless({{4.0, 0.0100}, {4.01, 0.0101}}));
  REQUIRE(noisy.warnings().size() == 1);
  CHECK(noisy.warnings()[0].code == WarningCode::decode_curve_noise);
}

TEST_CASE("engine-reported throughput cross-check") {
  // Quotient 34/0.02 = 1700 tok/s. 1650 reported: 3% apart, fine.
  DecodeCurve close(
      shapeless({{4.0, 0.0105, 370.0}, {34.0, 0.020, 1650.0}}));
  CHECK(close.warnings().empty());

  // 1400 reported: 21% apart, flagged.
  DecodeCurve far(shapeless({{4.0, 0.0105}, {34.0, 0.020, 1400.0}}));
  REQUIRE(far.warnings().size() == 1);
  CHECK(far.warnings()[0].code == WarningCode::engine_throughput_gap);
  CHECK(far.warnings()[0].message.find("point 1") != std::string::npos);

  CHECK(ctor_error({{4.0, 0.0105, 0.0}, {34.0, 0.020}}) ==
        ErrorCode::malformed_profile);
}

TEST_CASE("decode shape warnings") {
  const DecodeCurve curve = testing::decode_curve_6144_512();
  CHECK(curve.shape_warnings(6144, 512).empty());
  CHECK(curve.shape_warnings(5000, 520).empty());

  auto w = curve.shape_warnings(3000, 512);
  REQUIRE(w.size() == 1);
  CHECK(w[0].code == WarningCode::decode_shape_mismatch);

  w = curve.shape_warnings(6144, 2000);
  REQUIRE(w.size() == 1);
  CHECK(w[0].code == WarningCode::decode_shape_mismatch);

  // Unknown benchmark shape: nothing to compare against.
  const DecodeCurve unknown(shapeless({{1.0, 0.001}, {3.0, 0.003}}));
  CHECK(unknown.shape_warnings(100, 100).empty());
}
