// Copyright 2026 The cavityfarm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// CSV text with shortest round-trip number formatting, and atomic file writes.

#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace cavityfarm::cli {

/// Shortest decimal that parses back to the same double.
std::string format_double(double x);
std::string format_count(std::size_t n);

using CsvRow = std::vector<std::string>;

struct CsvTable {
  std::vector<std::string> header;
  std::vector<CsvRow> rows;

  std::string render() const;
  /// Index of a header column; throws PreconditionError if absent.
  std::size_t column(std::string_view name) const;
  std::vector<double> numeric_column(std::string_view name) const;
};

/// Parses comma-separated text with a header row; no quoting. Throws
/// PreconditionError on ragged rows.
CsvTable parse_csv(std::string_view text);
CsvTable read_csv(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over path.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace cavityfarm::cli
