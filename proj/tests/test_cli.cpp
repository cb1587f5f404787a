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

// End-to-end tests of the pdplan binary: flags, exit codes, report and CSV
// output. The binary path comes in through PDPLAN_CLI_PATH; every test is
// hermetic, writing its profile CSVs to temp files.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstddef>
#include <string>
#include <vector>

#include "doctest.h"
#include "support/fixtures.h"

namespace {

using pdplan::testing::CommandResult;
using pdplan::testing::TempFile;
using pdplan::testing::run_command;

const char kPrefillCsv[] =
    "input_len,chunk_size,max_throughput_tps\n"
    "6144,24576,28300\n";

const char kDecodeCsv[] =
    "# input_len=6144\n"
    "# output_len=512\n"
    "batch,tpot_ms\n"
    "4,10.5\n"
    "8,11.5\n"
    "12,12.5\n"
    "16,13.8\n"
    "20,15.2\n"
    "24,16.8\n"
    "28,18.2\n"
    "32,19.4\n"
    "34,20.0\n"
    "40,22.2\n"
    "48,25.2\n"
    "56,28.5\n"
    "64,32.0\n";

std::string cli() { return std::string(PDPLAN_CLI_PATH); }

// Planning flags for the reference workload against the given profiles.
std::string base_args(const TempFile& prefill, const TempFile& decode) {
  return " --tpm 5 --in 6144 --out 512 --ttft 2 --tpot 0.02 --overhead 0.1"
         " --prefill-profile " +
         prefill.path() + " --decode-profile " + decode.path();
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    const std::size_t pos = text.find('\n', start);
    if (pos == std::string::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
  return lines;
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("plan prints the deployment report") {
  const TempFile prefill("cli_prefill", kPrefillCsv);
  const TempFile decode("cli_decode", kDecodeCsv);

  const CommandResult r = run_command(
      cli() + " plan" + base_args(prefill, decode) + " 2>/dev/null");
  REQUIRE(r.exit_code == 0);
  CHECK(contains(r.output, "inputs"));
  CHECK(contains(r.output, "demand: 5 M TPM"));
  CHECK(contains(r.output, "prefill row 0: input_len 6144"));
  CHECK(contains(r.output, "decode operating point: batch 34"));
  CHECK(contains(r.output, "deployment: 3P4D"));
  CHECK(contains(r.output, "binding phase: prefill"));

  // Warnings go to the error stream, tagged with their code names.
  const CommandResult stderr_only = run_command(
      cli() + " plan" + base_args(prefill, decode) + " 2>&1 1>/dev/null");
  REQUIRE(stderr_only.exit_code == 0);
  CHECK(contains(stderr_only.output,
                 "warning [chunked_prefill_approximation]:"));
  CHECK(contains(stderr_only.output, "warning [plan_shortfall]:"));
}

TEST_CASE("plan honors the rounding policy and imposed counts") {
  const TempFile prefill("cli_prefill", kPrefillCsv);
  const TempFile decode("cli_decode", kDecodeCsv);

  CommandResult r = run_command(cli() + " plan" + base_args(prefill, decode) +
                                " --policy ceil 2>/dev/null");
  REQUIRE(r.exit_code == 0);
  CHECK(contains(r.output, "deployment: 4P4D"));
  CHECK(contains(r.output, "binding phase: decode"));

  r = run_command(cli() + " plan" + base_args(prefill, decode) +
                  " --np 3 --nd 3 2>/dev/null");
  REQUIRE(r.exit_code == 0);
  CHECK(contains(r.output, "deployment: 3P3D"));
  CHECK(contains(r.output, "achievable throughput: 66300 tok/s"));
  CHECK(contains(r.output, "binding phase: decode"));

  r = run_command(cli() + " plan" + base_args(prefill, decode) +
                  " --np 3 2>&1 1>/dev/null");
  CHECK(r.exit_code == 2);
  CHECK(contains(r.output, "--np and --nd must be set together"));
}

TEST_CASE("plan reports the effective prefill length when set") {
  const TempFile prefill("cli_prefill", kPrefillCsv);
  const TempFile decode("cli_decode", kDecodeCsv);
  const CommandResult r =
      run_command(cli() + " plan" + base_args(prefill, decode) +
                  " --effective-in 3072 2>/dev/null");
  REQUIRE(r.exit_code == 0);
  CHECK(contains(r.output, "effective prefill length: 3072 tok"));
}

TEST_CASE("infeasible SLOs map to dedicated exit codes") {
  const TempFile prefill("cli_prefill", kPrefillCsv);
  const TempFile decode("cli_decode", kDecodeCsv);

  CommandResult r = run_command(
      cli() + " plan --tpm 5 --in 6144 --out 512 --ttft 0.15 --tpot 0.02"
              " --overhead 0.1 --prefill-profile " +
      prefill.path() + " --decode-profile " + decode.path() +
      " 2>&1 1>/dev/null");
  CHECK(r.exit_code == 3);
  CHECK(contains(r.output, "error:"));

  r = run_command(
      cli() + " plan --tpm 5 --in 6144 --out 512 --ttft 2 --tpot 0.005"
              " --overhead 0.1 --prefill-profile " +
      prefill.path() + " --decode-profile " + decode.path() +
      " 2>&1 1>/dev/null");
  CHECK(r.exit_code == 4);
  CHECK(contains(r.output, "error:"));
}

TEST_CASE("bad inputs exit with code 2") {
  const TempFile prefill("cli_prefill", kPrefillCsv);
  const TempFile decode("cli_decode", kDecodeCsv);

  // Missing profile file.
  CommandResult r = run_command(
      cli() + " plan --tpm 5 --in 6144 --out 512 --ttft 2 --tpot 0.02"
              " --prefill-profile /nonexistent/p.csv --decode-profile " +
      decode.path() + " 2>&1 1>/dev/null");
  CHECK(r.exit_code == 2);
  CHECK(contains(r.output, "/nonexistent/p.csv"));

  // Malformed profile contents; the message names file and line.
  const TempFile broken("cli_broken", "input_len,chunk_size\n1,2\n");
  r = run_command(
      cli() + " plan --tpm 5 --in 6144 --out 512 --ttft 2 --tpot 0.02"
              " --prefill-profile " +
      broken.path() + " --decode-profile " + decode.path() +
      " 2>&1 1>/dev/null");
  CHECK(r.exit_code == 2);
  CHECK(contains(r.output, broken.path() + ":1"));

  // Missing required flag.
  r = run_command(cli() + " plan --tpm 5 2>&1 1>/dev/null");
  CHECK(r.exit_code == 2);

  // Unknown subcommand.
  r = run_command(cli() + " frobnicate 2>&1 1>/dev/null");
  CHECK(r.exit_code == 2);

  // Invalid parameter value caught by the library.
  r = run_command(
      cli() + " plan --tpm 0 --in 6144 --out 512 --ttft 2 --tpot 0.02"
              " --prefill-profile " +
      prefill.path() + " --decode-profile " + decode.path() +
      " 2>&1 1>/dev/null");
  CHECK(r.exit_code == 2);
  CHECK(contains(r.output, "total_throughput must be positive"));

  // Bad --decode-shape spelling.
  r = run_command(cli() + " plan" + base_args(prefill, decode) +
                  " --decode-shape 6144 2>&1 1>/dev/null");
  CHECK(r.exit_code == 2);
  CHECK(contains(r.output, "--decode-shape expects IN:OUT"));
}

TEST_CASE("help exits cleanly") {
  const CommandResult r = run_command(cli() + " --help 2>/dev/null");
  CHECK(r.exit_code == 0);
  CHECK(contains(r.output, "plan"));
  CHECK(contains(r.output, "sweep"));
  CHECK(contains(r.output, "validate-mm1"));
}

TEST_CASE("decode shape override silences the mismatch warning") {
  const TempFile prefill("cli_prefill", kPrefillCsv);
  // Decode profile benchmarked at a much shorter input than the workload.
  std::string shifted(kDecodeCsv);
  shifted.replace(shifted.find("6144"), 4, "2048");
  const TempFile decode("cli_decode", shifted);

  CommandResult r = run_command(
      cli() + " plan" + base_args(prefill, decode) + " 2>&1 1>/dev/null");
  REQUIRE(r.exit_code == 0);
  CHECK(contains(r.output, "warning [decode_shape_mismatch]:"));

  r = run_command(cli() + " plan" + base_args(prefill, decode) +
                  " --decode-shape 6144:512 2>&1 1>/dev/null");
  REQUIRE(r.exit_code == 0);
  CHECK(!contains(r.output, "decode_shape_mismatch"));
}

TEST_CASE("sweep emits the analytic CSV over the grid") {
  const TempFile prefill("cli_prefill", kPrefillCsv);
  const TempFile decode("cli_decode", kDecodeCsv);

  const CommandResult r =
      run_command(cli() + " sweep" + base_args(prefill, decode) +
                  " --grid 1:6:0.5 2>/dev/null");
  REQUIRE(r.exit_code == 0);
  const std::vector<std::string> lines = split_lines(r.output);
  REQUIRE(lines.size() == 12);
  CHECK(lines[0] == "tpm,ttft_s,tpot_s,prefill_util,decode_batch,feasible");

  // Light load: the analytic TPOT sits at the fastest measured point.
  CHECK(lines[1].substr(0, 2) == "1,");
  CHECK(contains(lines[1], ",0.0105,"));
  CHECK(lines[1].back() == '1');

  // The grid crosses the feasibility knee exactly once.
  std::size_t flips = 0;
  for (std::size_t i = 2; i < lines.size(); ++i) {
    if (lines[i].back() != lines[i - 1].back()) {
      ++flips;
    }
  }
  CHECK(flips == 1);
  CHECK(lines.back().substr(0, 2) == "6,");
  CHECK(lines.back().back() == '0');
  CHECK(contains(lines.back(), "inf"));
}

TEST_CASE("simulated sweep adds columns and reruns identically") {
  const TempFile prefill("cli_prefill", kPrefillCsv);
  const TempFile decode("cli_decode", kDecodeCsv);

  const std::string cmd = cli() + " sweep" + base_args(prefill, decode) +
                          " --grid 1:2:1 --simulate --seed 42"
                          " --sim-requests 2000 2>/dev/null";
  const CommandResult first = run_command(cmd);
  REQUIRE(first.exit_code == 0);
  const std::vector<std::string> lines = split_lines(first.output);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] ==
        "tpm,ttft_s,tpot_s,prefill_util,decode_batch,feasible,"
        "sim_ttft_mean,sim_ttft_p99,sim_tpot_mean");

  const CommandResult second = run_command(cmd);
  REQUIRE(second.exit_code == 0);
  CHECK(first.output == second.output);

  // Same grid, different seed: the simulated columns move.
  const CommandResult other = run_command(
      cli() + " sweep" + base_args(prefill, decode) +
      " --grid 1:2:1 --simulate --seed 43 --sim-requests 2000 2>/dev/null");
  REQUIRE(other.exit_code == 0);
  CHECK(other.output != first.output);
}

TEST_CASE("simulate requires an explicit seed") {
  const TempFile prefill("cli_prefill", kPrefillCsv);
  const TempFile decode("cli_decode", kDecodeCsv);
  const CommandResult r =
      run_command(cli() + " sweep" + base_args(prefill, decode) +
                  " --grid 1:2:1 --simulate 2>&1 1>/dev/null");
  CHECK(r.exit_code == 2);
  CHECK(contains(r.output, "--simulate requires an explicit --seed"));
}

TEST_CASE("bad grid specs are rejected") {
  const TempFile prefill("cli_prefill", kPrefillCsv);
  const TempFile decode("cli_decode", kDecodeCsv);

  CommandResult r = run_command(cli() + " sweep" + base_args(prefill, decode) +
                                " --grid 1:6 2>&1 1>/dev/null");
  CHECK(r.exit_code == 2);
  CHECK(contains(r.output, "--grid expects START:STOP:STEP"));

  r = run_command(cli() + " sweep" + base_args(prefill, decode) +
                  " --grid 6:1:0.5 2>&1 1>/dev/null");
  CHECK(r.exit_code == 2);
}

TEST_CASE("validate-mm1 compares simulation against the prediction") {
  const TempFile prefill("cli_prefill", kPrefillCsv);

  const CommandResult r = run_command(
      cli() + " validate-mm1 --prefill-profile " + prefill.path() +
      " --in 6144 --rates 2,6 --overhead 0.1 --seed 42"
      " --sim-requests 2000 2>/dev/null");
  REQUIRE(r.exit_code == 0);
  const std::vector<std::string> lines = split_lines(r.output);
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] == "rate_rps,analytic_ttft_s,sim_ttft_s,rel_err,note");
  CHECK(lines[1].substr(0, 2) == "2,");
  CHECK(lines[1].back() == ',');  // stable rows carry no note
  CHECK(lines[2].substr(0, 2) == "6,");
  CHECK(contains(lines[2], "unstable"));
  CHECK(contains(lines[2], "nan"));
}

TEST_CASE("validate-mm1 with no rates prints only the header") {
  const TempFile prefill("cli_prefill", kPrefillCsv);
  const CommandResult r =
      run_command(cli() + " validate-mm1 --prefill-profile " + prefill.path() +
                  " --in 6144 2>/dev/null");
  REQUIRE(r.exit_code == 0);
  CHECK(r.output == "rate_rps,analytic_ttft_s,sim_ttft_s,rel_err,note\n");
}

TEST_CASE("validate-mm1 with rates requires a seed") {
  const TempFile prefill("cli_prefill", kPrefillCsv);
  const CommandResult r =
      run_command(cli() + " validate-mm1 --prefill-profile " + prefill.path() +
                  " --in 6144 --rates 2 2>&1 1>/dev/null");
  CHECK(r.exit_code == 2);
  CHECK(contains(r.output, "requires an explicit --seed"));
}
