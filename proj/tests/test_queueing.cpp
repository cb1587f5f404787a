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

#include "doctest.h"
#include "queueing.h"
#include "support/curves.h"

using namespace pdplan;
using namespace pdplan::queueing;

namespace {

const SloSpec kSlo{2.0, 0.02, 0.1};

// Unit profile: one request of 1000 tokens per second at full tilt, so the
// service rate is exactly 1 req/s and boundary arithmetic is exact in binary.
const PrefillProfile kUnit{1000, 1000, 1000};

}  // namespace

TEST_CASE("service rate is max throughput over input length") {
  CHECK(service_rate(testing::prefill_row_h200(), 6144) == 28300.0 / 6144.0);
  CHECK(service_rate(testing::prefill_row_h200(), 6144) ==
        doctest::Approx(4.606119791666667).epsilon(1e-15));
  CHECK(service_rate(testing::prefill_row_h200(), 4096) == 6.9091796875);
  CHECK(service_rate(kUnit, 1000) == 1.0);

  CHECK_THROWS_AS(service_rate(testing::prefill_row_h200(), 0.0), Error);
  CHECK_THROWS_AS(service_rate({6144, 24576, 0}, 6144), Error);
}

TEST_CASE("utilization and sojourn") {
  QueueParams half{2.0, 1.0};
  CHECK(utilization(half) == 0.5);
  CHECK(predicted_sojourn(half) == 1.0);
  CHECK(predicted_ttft(half, 0.1) == 1.1);
  CHECK(predicted_ttft(half, 0.0) == 1.0);

  QueueParams idle{service_rate(testing::prefill_row_h200(), 6144), 0.0};
  CHECK(utilization(idle) == 0.0);
  CHECK(predicted_sojourn(idle) ==
        doctest::Approx(0.2171024734982332).epsilon(1e-15));
  CHECK(predicted_ttft(idle, 0.1) ==
        doctest::Approx(0.3171024734982332).epsilon(1e-15));
}

TEST_CASE("sojourn diverges toward the stability boundary") {
  const double mu = 2.0;
  double last = 0.0;
  for (double lambda : {0.0, 1.0, 1.9, 1.99, 1.999}) {
    const double s = predicted_sojourn({mu, lambda});
    CHECK(s > last);
    last = s;
  }
  CHECK(predicted_sojourn({mu, 1.999}) == doctest::Approx(1000.0));
}

TEST_CASE("unstable and invalid queue parameters are rejected") {
  CHECK_THROWS_AS(utilization({2.0, 2.0}), Error);
  CHECK_THROWS_AS(predicted_sojourn({2.0, 2.5}), Error);
  CHECK_THROWS_AS(predicted_ttft({2.0, 2.0}, 0.1), Error);
  CHECK_THROWS_AS(predicted_sojourn({0.0, 1.0}), Error);
  CHECK_THROWS_AS(predicted_sojourn({2.0, -1.0}), Error);
  CHECK_THROWS_AS(predicted_ttft({2.0, 1.0}, -0.1), Error);

  try {
    predicted_sojourn({2.0, 2.0});
    FAIL("expected unstable_queue");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::unstable_queue);
  }
}

TEST_CASE("effective prefill throughput under the TTFT budget") {
  const double got =
      effective_prefill_throughput(testing::prefill_row_h200(), 6144, kSlo);
  CHECK(got == 28300.0 - 6144.0 / 1.9);
  CHECK(got == doctest::Approx(25066.315789473683).epsilon(1e-12));

  // Tightening the budget costs throughput; loosening it recovers some.
  const double tighter =
      effective_prefill_throughput(testing::prefill_row_h200(), 6144,
                                   {1.0, 0.02, 0.1});
  const double looser =
      effective_prefill_throughput(testing::prefill_row_h200(), 6144,
                                   {4.0, 0.02, 0.1});
  CHECK(tighter < got);
  CHECK(looser > got);
  CHECK(looser < testing::prefill_row_h200().max_throughput_tps);
}

TEST_CASE("infeasible TTFT budget for prefill") {
  try {
    effective_prefill_throughput(testing::prefill_row_h200(), 6144,
                                 {0.15, 0.02, 0.1});
    FAIL("expected infeasible_slo_prefill");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::infeasible_slo_prefill);
  }
  CHECK_THROWS_AS(
      max_arrival_rate(testing::prefill_row_h200(), 6144, {0.15, 0.02, 0.1}),
      Error);
}

TEST_CASE("max arrival rate under the TTFT budget") {
  CHECK(max_arrival_rate(kUnit, 1000, {2.0, 0.02, 0.0}) == 0.5);
  CHECK(max_arrival_rate(testing::prefill_row_h200(), 6144, kSlo) ==
        doctest::Approx(4.079804002192983).epsilon(1e-12));
}

TEST_CASE("boundary budget: zero rate is allowed, zero throughput is not") {
  // Budget exactly equal to the zero-load service time, all exact in binary.
  const SloSpec boundary{1.0, 0.02, 0.0};
  CHECK(max_arrival_rate(kUnit, 1000, boundary) == 0.0);
  CHECK_THROWS_AS(effective_prefill_throughput(kUnit, 1000, boundary), Error);
}

TEST_CASE("rate and throughput views agree") {
  const PrefillProfile rows[] = {
      testing::prefill_row_h200(),
      {4096, 2048, 21000},
      {8192, 8192, 30000},
  };
  const SloSpec slos[] = {kSlo, {1.5, 0.05, 0.0}, {3.0, 0.02, 0.4}};
  for (const auto& row : rows) {
    for (const auto& slo : slos) {
      for (double input_len : {4096.0, 6144.0, 8192.0}) {
        const double rate = max_arrival_rate(row, input_len, slo);
        const double tput =
            effective_prefill_throughput(row, input_len, slo);
        CHECK(rate * input_len ==
              doctest::Approx(tput).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("shape warnings") {
  // Matching shape, chunk larger than the request: approximation note only.
  auto w = shape_warnings(testing::prefill_row_h200(), 6144);
  REQUIRE(w.size() == 1);
  CHECK(w[0].code == WarningCode::chunked_prefill_approximation);

  // Profile measured at twice the planning length: mismatch first, then the
  // chunking note.
  w = shape_warnings(testing::prefill_row_h200(), 3072);
  REQUIRE(w.size() == 2);
  CHECK(w[0].code == WarningCode::prefill_shape_mismatch);
  CHECK(w[1].code == WarningCode::chunked_prefill_approximation);

  // Chunk below the request length and matching shape: clean.
  CHECK(shape_warnings({4096, 2048, 20000}, 4096).empty());

  // Both thresholds are strict: exactly 25% apart and chunk == input stay
  // quiet.
  CHECK(shape_warnings({5000, 4000, 20000}, 4000).empty());
}
