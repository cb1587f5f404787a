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
#include <string>

#include "doctest.h"
#include "profile_io.h"
#include "support/fixtures.h"

using namespace pdplan;
using namespace pdplan::io;

namespace {

std::string parse_failure(const std::string& text, bool decode) {
  try {
    if (decode) {
      parse_decode_csv(text, "test.csv");
    } else {
      parse_prefill_csv(text, "test.csv");
    }
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::malformed_profile);
    return e.what();
  }
  FAIL("expected malformed_profile");
  return {};
}

}  // namespace

TEST_CASE("prefill CSV round-trip") {
  const PrefillProfileSet set = parse_prefill_csv(
      "# H200 prefill benchmark\r\n"
      "input_len, chunk_size, max_throughput_tps\r\n"
      "4096, 4096, 21000\r\n"
      "6144,24576,28300\r\n",
      "prefill.csv");
  REQUIRE(set.rows().size() == 2);
  CHECK(set.rows()[0].input_len == 4096.0);
  CHECK(set.rows()[0].chunked_prefill_size == 4096.0);
  CHECK(set.rows()[0].max_throughput_tps == 21000.0);
  CHECK(set.rows()[1].input_len == 6144.0);
  CHECK(set.rows()[1].max_throughput_tps == 28300.0);
}

TEST_CASE("decode CSV with shape comments and engine throughput") {
  const DecodeProfile profile = parse_decode_csv(
      "# nightly decode benchmark\n"
      "# gpu = H200\n"
      "# input_len=6144\n"
      "# output_len = 512\n"
      "batch,tpot_ms,throughput_tps\n"
      "4,10.5,380\n"
      "34, 20 ,\n"
      "64,32,2000\n",
      "decode.csv");
  CHECK(profile.input_len == 6144.0);
  CHECK(profile.output_len == 512.0);
  REQUIRE(profile.points.size() == 3);
  CHECK(profile.points[0].batch == 4.0);
  CHECK(profile.points[0].tpot_s == 0.0105);
  REQUIRE(profile.points[0].engine_throughput_tps.has_value());
  CHECK(*profile.points[0].engine_throughput_tps == 380.0);
  // TPOT converts from milliseconds; a blank third field means "not logged".
  CHECK(profile.points[1].tpot_s == 0.020);
  CHECK_FALSE(profile.points[1].engine_throughput_tps.has_value());
  CHECK(*profile.points[2].engine_throughput_tps == 2000.0);
}

TEST_CASE("decode CSV without the throughput column") {
  const DecodeProfile profile = parse_decode_csv(
      "batch,tpot_ms\n"
      "4,10.5\n"
      "8,11.5\n",
      "decode.csv");
  CHECK(profile.input_len == 0.0);
  CHECK(profile.output_len == 0.0);
  REQUIRE(profile.points.size() == 2);
  CHECK(profile.points[0].tpot_s == 0.0105);
  CHECK_FALSE(profile.points[0].engine_throughput_tps.has_value());
}

TEST_CASE("parse errors carry origin and line number") {
  // Wrong header name.
  std::string what = parse_failure("foo,bar\n1,2\n", true);
  CHECK(what.find("test.csv:1") != std::string::npos);
  CHECK(what.find("'foo'") != std::string::npos);

  // Wrong field count on a data row; the comment shifts the line number.
  what = parse_failure(
      "# comment\ninput_len,chunk_size,max_throughput_tps\n1024,512\n", false);
  CHECK(what.find("test.csv:3") != std::string::npos);
  CHECK(what.find("expected 3") != std::string::npos);

  // Unparseable number.
  what = parse_failure("batch,tpot_ms\n4,abc\n8,11.5\n", true);
  CHECK(what.find("test.csv:2") != std::string::npos);
  CHECK(what.find("'abc'") != std::string::npos);

  // Non-finite number.
  what = parse_failure("batch,tpot_ms\n4,inf\n8,11.5\n", true);
  CHECK(what.find("'inf'") != std::string::npos);

  // Blank required field.
  what = parse_failure("batch,tpot_ms\n4,\n8,11.5\n", true);
  CHECK(what.find("tpot_ms value ''") != std::string::npos);

  // Value violating the profile invariants.
  what = parse_failure(
      "input_len,chunk_size,max_throughput_tps\n0,4096,21000\n", false);
  CHECK(what.find("test.csv:2") != std::string::npos);
  CHECK(what.find("input_len must be >= 1") != std::string::npos);
}

TEST_CASE("missing header and missing data") {
  CHECK(parse_failure("", false).find("missing header") != std::string::npos);
  CHECK(parse_failure("# only comments\n", true).find("missing header") !=
        std::string::npos);
  CHECK(parse_failure("input_len,chunk_size,max_throughput_tps\n", false)
            .find("no data rows") != std::string::npos);
  CHECK(parse_failure("batch,tpot_ms\n4,10.5\n", true)
            .find("at least 2 data rows") != std::string::npos);
}

TEST_CASE("loading from files") {
  const testing::TempFile prefill(
      "prefill", "input_len,chunk_size,max_throughput_tps\n6144,24576,28300\n");
  const PrefillProfileSet set = load_prefill_profiles(prefill.path());
  REQUIRE(set.rows().size() == 1);
  CHECK(set.rows()[0].max_throughput_tps == 28300.0);

  const testing::TempFile decode("decode",
                                 "# input_len=6144\n# output_len=512\n"
                                 "batch,tpot_ms\n4,10.5\n34,20\n64,32\n");
  const DecodeProfile profile = load_decode_profile(decode.path());
  CHECK(profile.input_len == 6144.0);
  REQUIRE(profile.points.size() == 3);
  CHECK(profile.points[1].batch == 34.0);

  // Parse errors from files name the path.
  const testing::TempFile bad("bad", "nope\n");
  try {
    load_prefill_profiles(bad.path());
    FAIL("expected malformed_profile");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::malformed_profile);
    CHECK(std::string(e.what()).find(bad.path()) != std::string::npos);
  }
}

TEST_CASE("unreadable files raise io_error") {
  try {
    load_decode_profile("/nonexistent/decode.csv");
    FAIL("expected io_error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::io_error);
    CHECK(std::string(e.what()).find("/nonexistent/decode.csv") !=
          std::string::npos);
  }
  try {
    load_prefill_profiles("/nonexistent/prefill.csv");
    FAIL("expected io_error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::io_error);
  }
}
