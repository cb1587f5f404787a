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

#include <string>
#include <string_view>

#include "types.h"

// Benchmark profile files. Both are plain CSV with a mandatory header line:
//
//   prefill: input_len,chunk_size,max_throughput_tps
//            one row per benchmarked input shape
//   decode:  batch,tpot_ms[,throughput_tps]
//            one row per measured batch size; TPOT is milliseconds in the
//            file and seconds everywhere else
//
// Lines starting with '#' are comments. In decode files, comments of the form
// `# input_len=6144` / `# output_len=512` record the benchmark shape; other
// comments are ignored. Fields are trimmed, so padding spaces are fine. An
// empty third decode column means the engine throughput was not logged for
// that row.
//
// Unreadable files raise io_error; unparseable content raises
// malformed_profile with the origin and line number.

namespace pdplan::io {

PrefillProfileSet parse_prefill_csv(std::string_view text,
                                    std::string_view origin);
DecodeProfile parse_decode_csv(std::string_view text, std::string_view origin);

PrefillProfileSet load_prefill_profiles(const std::string& path);
DecodeProfile load_decode_profile(const std::string& path);

}  // namespace pdplan::io
