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

#include "gamered/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "gamered/error.hpp"

namespace gamered::io {
namespace {

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace

std::string format_real(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string_view trim(std::string_view s) {
  const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && ws(s.back())) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.emplace_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_real(std::string_view token, const std::string& file, std::size_t line) {
  token = trim(token);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (token.empty() || res.ec != std::errc() || res.ptr != token.data() + token.size()) {
    throw ParseError(file, line, "not a real number: '" + std::string(token) + "'");
  }
  return v;
}

RowMatrix read_matrix_csv(const std::filesystem::path& path) {
  const std::string file = path.string();
  std::vector<std::vector<double>> rows;
  const auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    std::vector<double> row;
    for (const auto& tok : split(lines[i], ',')) row.push_back(parse_real(tok, file, i + 1));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError(file, i + 1, "ragged row: expected " + std::to_string(rows.front().size()) + " values, got " +
                                        std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(file, 0, "empty matrix file");
  RowMatrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return m;
}

void write_matrix_csv(const std::filesystem::path& path, const Eigen::Ref<const RowMatrix>& m) {
  auto out = open_out(path);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c > 0) out << ',';
      out << format_real(m(r, c));
    }
    out << '\n';
  }
}

Vector read_vector_csv(const std::filesystem::path& path) {
  const RowMatrix m = read_matrix_csv(path);
  if (m.cols() != 1) throw ParseError(path.string(), 1, "vector file must have exactly one value per line");
  return m.col(0);
}

void write_vector_csv(const std::filesystem::path& path, const Vector& v) {
  auto out = open_out(path);
  for (Eigen::Index i = 0; i < v.size(); ++i) out << format_real(v(i)) << '\n';
}

KeyValues read_key_values(const std::filesystem::path& path) {
  const std::string file = path.string();
  KeyValues kv;
  const auto lines = read_lines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    std::string_view line = lines[i];
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(file, i + 1, "expected key=value");
    std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ParseError(file, i + 1, "empty key");
    if (!kv.emplace(key, value).second) throw ParseError(file, i + 1, "duplicate key '" + key + "'");
  }
  return kv;
}

void write_key_values(const std::filesystem::path& path, const std::vector<std::pair<std::string, std::string>>& kv) {
  auto out = open_out(path);
  for (const auto& [k, v] : kv) out << k << '=' << v << '\n';
}

ReportTable::ReportTable(std::string schema, std::vector<std::string> columns)
    : schema_(std::move(schema)), columns_(std::move(columns)) {}

ReportTable::Row& ReportTable::Row::set(const std::string& column, std::string value) {
  const auto& cols = owner_->columns_;
  if (std::find(cols.begin(), cols.end(), column) == cols.end()) {
    throw InvalidArgument("report column '" + column + "' is not part of the schema");
  }
  cells_[column] = std::move(value);
  return *this;
}

ReportTable::Row& ReportTable::Row::set(const std::string& column, double value) {
  return set(column, format_real(value));
}

ReportTable::Row& ReportTable::Row::set(const std::string& column, long long value) {
  return set(column, std::to_string(value));
}

ReportTable::Row& ReportTable::add_row() {
  rows_.push_back(Row(this));
  return rows_.back();
}

std::string ReportTable::to_string() const {
  std::ostringstream out;
  out << "# " << schema_ << '\n';
  for (std::size_t c = 0; c < columns_.size(); ++c) out << (c ? "," : "") << columns_[c];
  out << '\n';
  for (const auto& row : rows_) {
    for (std::size_t c = 0; c < columns_.size(); ++c) {
      const auto it = row.cells_.find(columns_[c]);
      if (it == row.cells_.end()) throw InvalidArgument("report row is missing column '" + columns_[c] + "'");
      out << (c ? "," : "") << it->second;
    }
    out << '\n';
  }
  return out.str();
}

void ReportTable::write(const std::filesystem::path& path) const {
  auto out = open_out(path);
  out << to_string();
}

}  // namespace gamered::io
