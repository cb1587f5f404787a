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

#include "profile_io.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

namespace pdplan::io {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(trim(line.substr(start)));
      return fields;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

[[noreturn]] void fail(std::string_view origin, int line,
                       const std::string& what) {
  std::ostringstream msg;
  msg << origin << ":" << line << ": " << what;
  throw Error(ErrorCode::malformed_profile, msg.str());
}

double parse_number(std::string_view field, std::string_view column,
                    std::string_view origin, int line) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    std::ostringstream what;
    what << "cannot parse " << column << " value '" << field << "'";
    fail(origin, line, what.str());
  }
  return value;
}

// Iterates text line by line, skipping blanks and comments; comments are
// still reported to on_comment so decode shape metadata can be picked up.
template <typename OnComment, typename OnRow>
void for_each_line(std::string_view text, OnComment&& on_comment,
                   OnRow&& on_row) {
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    const std::string_view raw =
        eol == std::string_view::npos ? text.substr(pos)
                                      : text.substr(pos, eol - pos);
    ++line_no;
    const std::string_view line = trim(raw);
    if (!line.empty()) {
      if (line.front() == '#') {
        on_comment(trim(line.substr(1)), line_no);
      } else {
        on_row(line, line_no);
      }
    }
    if (eol == std::string_view::npos) {
      break;
    }
    pos = eol + 1;
  }
}

void check_header(const std::vector<std::string_view>& fields,
                  const std::vector<std::string_view>& expected,
                  std::string_view origin, int line) {
  if (fields.size() != expected.size()) {
    std::ostringstream what;
    what << "header has " << fields.size() << " columns, expected "
         << expected.size();
    fail(origin, line, what.str());
  }
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (fields[i] != expected[i]) {
      std::ostringstream what;
      what << "header column " << i + 1 << " is '" << fields[i]
           << "', expected '" << expected[i] << "'";
      fail(origin, line, what.str());
    }
  }
}

std::string read_file(const std::string& path, std::string_view kind) {
  std::ifstream file(path, std::ios::binary);
  if (!file) {
    std::ostringstream msg;
    msg << "cannot open " << kind << " profile: " << path;
    throw Error(ErrorCode::io_error, msg.str());
  }
  std::ostringstream content;
  content << file.rdbuf();
  if (file.bad()) {
    std::ostringstream msg;
    msg << "cannot read " << kind << " profile: " << path;
    throw Error(ErrorCode::io_error, msg.str());
  }
  return std::move(content).str();
}

}  // namespace

PrefillProfileSet parse_prefill_csv(std::string_view text,
                                    std::string_view origin) {
  std::vector<PrefillProfile> rows;
  bool header_seen = false;
  for_each_line(
      text, [](std::string_view, int) {},
      [&](std::string_view line, int line_no) {
        const std::vector<std::string_view> fields = split_fields(line);
        if (!header_seen) {
          check_header(fields, {"input_len", "chunk_size",
                                "max_throughput_tps"},
                       origin, line_no);
          header_seen = true;
          return;
        }
        if (fields.size() != 3) {
          std::ostringstream what;
          what << "row has " << fields.size() << " fields, expected 3";
          fail(origin, line_no, what.str());
        }
        PrefillProfile row;
        row.input_len = parse_number(fields[0], "input_len", origin, line_no);
        row.chunked_prefill_size =
            parse_number(fields[1], "chunk_size", origin, line_no);
        row.max_throughput_tps =
            parse_number(fields[2], "max_throughput_tps", origin, line_no);
        try {
          rows.push_back(validate_prefill_profile(row));
        } catch (const Error& e) {
          fail(origin, line_no, e.what());
        }
      });
  if (!header_seen) {
    fail(origin, 1, "missing header line");
  }
  if (rows.empty()) {
    fail(origin, 1, "prefill profile has no data rows");
  }
  return PrefillProfileSet(std::move(rows));
}

DecodeProfile parse_decode_csv(std::string_view text, std::string_view origin) {
  DecodeProfile profile;
  bool header_seen = false;
  bool has_throughput_column = false;

  const auto on_comment = [&](std::string_view comment, int line_no) {
    const std::size_t eq = comment.find('=');
    if (eq == std::string_view::npos) {
      return;
    }
    const std::string_view key = trim(comment.substr(0, eq));
    const std::string_view value = trim(comment.substr(eq + 1));
    if (key == "input_len") {
      profile.input_len = parse_number(value, "input_len", origin, line_no);
    } else if (key == "output_len") {
      profile.output_len = parse_number(value, "output_len", origin, line_no);
    }
  };

  const auto on_row = [&](std::string_view line, int line_no) {
    const std::vector<std::string_view> fields = split_fields(line);
    if (!header_seen) {
      if (fields.size() == 3) {
        check_header(fields, {"batch", "tpot_ms", "throughput_tps"}, origin,
                     line_no);
        has_throughput_column = true;
      } else {
        check_header(fields, {"batch", "tpot_ms"}, origin, line_no);
      }
      header_seen = true;
      return;
    }
    const std::size_t expected = has_throughput_column ? 3 : 2;
    if (fields.size() != expected) {
      std::ostringstream what;
      what << "row has " << fields.size() << " fields, expected " << expected;
      fail(origin, line_no, what.str());
    }
    DecodePoint point;
    point.batch = parse_number(fields[0], "batch", origin, line_no);
    point.tpot_s = parse_number(fields[1], "tpot_ms", origin, line_no) / 1e3;
    if (has_throughput_column && !fields[2].empty()) {
      point.engine_throughput_tps =
          parse_number(fields[2], "throughput_tps", origin, line_no);
    }
    profile.points.push_back(point);
  };

  for_each_line(text, on_comment, on_row);
  if (!header_seen) {
    fail(origin, 1, "missing header line");
  }
  if (profile.points.size() < 2) {
    fail(origin, 1, "decode profile needs at least 2 data rows");
  }
  return profile;
}

PrefillProfileSet load_prefill_profiles(const std::string& path) {
  return parse_prefill_csv(read_file(path, "prefill"), path);
}

DecodeProfile load_decode_profile(const std::string& path) {
  return parse_decode_csv(read_file(path, "decode"), path);
}

}  // namespace pdplan::io
