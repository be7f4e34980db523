// Copyright 2026 The gamered Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Plain-text formats shared by all modules:
//  * matrix CSV: one matrix row per line, comma separated, no header;
//  * vector CSV: one value per line;
//  * key=value files: one pair per line, '#' starts a comment.
// Reals are written with 17 significant digits so that save + load
// reproduces every double exactly.

#include <filesystem>
#include <deque>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "gamered/linalg.hpp"

namespace gamered::io {

std::string format_real(double v);

/// Parses a full token as a double; throws ParseError(file, line).
double parse_real(std::string_view token, const std::string& file, std::size_t line);

RowMatrix read_matrix_csv(const std::filesystem::path& path);
void write_matrix_csv(const std::filesystem::path& path, const Eigen::Ref<const RowMatrix>& m);

Vector read_vector_csv(const std::filesystem::path& path);
void write_vector_csv(const std::filesystem::path& path, const Vector& v);

using KeyValues = std::map<std::string, std::string>;

/// Duplicate keys and lines without '=' are parse errors.
KeyValues read_key_values(const std::filesystem::path& path);
void write_key_values(const std::filesystem::path& path, const std::vector<std::pair<std::string, std::string>>& kv);

std::vector<std::string> split(std::string_view s, char sep);
std::string_view trim(std::string_view s);

/// Versioned CSV report: a `# <schema>` comment line, a header row, then
/// rows in insertion order.
class ReportTable {
 public:
  ReportTable(std::string schema, std::vector<std::string> columns);

  class Row {
   public:
    Row& set(const std::string& column, double value);
    Row& set(const std::string& column, long long value);
    Row& set(const std::string& column, std::string value);
    Row& set(const std::string& column, int value) { return set(column, static_cast<long long>(value)); }
    Row& set(const std::string& column, std::size_t value) { return set(column, static_cast<long long>(value)); }
    Row& set(const std::string& column, bool value) { return set(column, static_cast<long long>(value ? 1 : 0)); }
    Row& set(const std::string& column, const char* value) { return set(column, std::string(value)); }

   private:
    friend class ReportTable;
    Row(const ReportTable* owner) : owner_(owner) {}
    const ReportTable* owner_;
    std::map<std::string, std::string> cells_;
  };

  Row& add_row();
  const std::vector<std::string>& columns() const noexcept { return columns_; }
  std::size_t size() const noexcept { return rows_.size(); }

  /// Throws InvalidArgument if any row misses a column.
  std::string to_string() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::string schema_;
  std::vector<std::string> columns_;
  std::deque<Row> rows_;
};

}  // namespace gamered::io
