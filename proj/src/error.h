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

#include <stdexcept>
#include <string>
#include <vector>

namespace pdplan {

enum class ErrorCode {
  invalid_argument,
  unstable_queue,
  infeasible_slo_prefill,
  infeasible_slo_decode,
  malformed_profile,
  out_of_range,
  io_error,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Non-fatal diagnostics. Operations accumulate these instead of failing when
// the result is still usable but the operator should look at something.
enum class WarningCode {
  prefill_shape_mismatch,
  decode_shape_mismatch,
  chunked_prefill_approximation,
  decode_curve_noise,
  engine_throughput_gap,
  tpot_saturated,
  plan_shortfall,
};

struct Warning {
  WarningCode code;
  std::string message;

  friend bool operator==(const Warning&, const Warning&) = default;
};

// Appends w unless an identical warning is already present.
void add_warning(std::vector<Warning>& warnings, Warning w);

}  // namespace pdplan
