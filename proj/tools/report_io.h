// Copyright 2026 The cvcluster Authors
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

#ifndef CVCLUSTER_TOOLS_REPORT_IO_H
#define CVCLUSTER_TOOLS_REPORT_IO_H

#include <filesystem>
#include <string>
#include <vector>

#include "cvcluster/symplectic.h"
#include "json.hpp"

namespace cvcluster {

/// Decimal rendering with 17 significant digits.
std::string format_double(double value);

std::string read_text_file(const std::filesystem::path &path);

/// Writes and reads back, throwing IOError unless the bytes match.
void write_text_file(const std::filesystem::path &path, const std::string &content);

using CsvRows = std::vector<std::vector<std::string>>;

std::string render_csv(const std::vector<std::string> &header, const CsvRows &rows);
/// Returns the header as the first row.
CsvRows parse_csv(const std::string &text);

/// Checks column counts, writes, then re-parses and compares cell by cell.
void write_csv(const std::filesystem::path &path, const std::vector<std::string> &header, const CsvRows &rows);

/// Plain numeric CSV without a header.
void write_matrix_csv(const std::filesystem::path &path, const Matrix &m);
Matrix read_matrix_csv(const std::filesystem::path &path);

/// Writes pretty JSON and verifies that it parses back to an equal document.
void write_json(const std::filesystem::path &path, const nlohmann::json &doc);

std::string sha256_hex(const std::string &bytes);

}  // namespace cvcluster

#endif
