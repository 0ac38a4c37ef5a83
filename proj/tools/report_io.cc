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

#include "report_io.h"

#include <openssl/evp.h>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

using namespace cvcluster;

std::string cvcluster::format_double(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

std::string cvcluster::read_text_file(const std::filesystem::path &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IOError, "cannot open " + path.string());
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void cvcluster::write_text_file(const std::filesystem::path &path, const std::string &content) {
    {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw Error(ErrorCode::IOError, "cannot write " + path.string());
        }
        out << content;
        if (!out) {
            throw Error(ErrorCode::IOError, "write failed for " + path.string());
        }
    }
    if (read_text_file(path) != content) {
        throw Error(ErrorCode::IOError, "read-back mismatch for " + path.string());
    }
}

std::string cvcluster::render_csv(const std::vector<std::string> &header, const CsvRows &rows) {
    std::string out;
    auto line = [&](const std::vector<std::string> &cells) {
        for (size_t k = 0; k < cells.size(); k++) {
            if (cells[k].find_first_of(",\n\"") != std::string::npos) {
                throw Error(ErrorCode::IOError, "CSV cell needs quoting, which the format does not use");
            }
            if (k) {
                out += ',';
            }
            out += cells[k];
        }
        out += '\n';
    };
    if (!header.empty()) {
        line(header);
    }
    for (const auto &row : rows) {
        line(row);
    }
    return out;
}

CsvRows cvcluster::parse_csv(const std::string &text) {
    CsvRows rows;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        std::vector<std::string> cells;
        size_t start = 0;
        while (true) {
            size_t comma = line.find(',', start);
            cells.push_back(line.substr(start, comma - start));
            if (comma == std::string::npos) {
                break;
            }
            start = comma + 1;
        }
        rows.push_back(std::move(cells));
    }
    return rows;
}

void cvcluster::write_csv(
    const std::filesystem::path &path, const std::vector<std::string> &header, const CsvRows &rows) {
    for (const auto &row : rows) {
        if (row.size() != header.size()) {
            throw Error(ErrorCode::IOError, "row width differs from header in " + path.string());
        }
    }
    std::string text = render_csv(header, rows);
    write_text_file(path, text);
    CsvRows back = parse_csv(read_text_file(path));
    if (back.size() != rows.size() + 1 || back[0] != header) {
        throw Error(ErrorCode::IOError, "CSV round trip failed for " + path.string());
    }
    for (size_t k = 0; k < rows.size(); k++) {
        if (back[k + 1] != rows[k]) {
            throw Error(ErrorCode::IOError, "CSV round trip failed for " + path.string());
        }
    }
}

void cvcluster::write_matrix_csv(const std::filesystem::path &path, const Matrix &m) {
    CsvRows rows;
    for (Eigen::Index i = 0; i < m.rows(); i++) {
        std::vector<std::string> row;
        for (Eigen::Index j = 0; j < m.cols(); j++) {
            row.push_back(format_double(m(i, j)));
        }
        rows.push_back(std::move(row));
    }
    write_text_file(path, render_csv({}, rows));
    Matrix back = read_matrix_csv(path);
    if (back.rows() != m.rows() || back.cols() != m.cols() ||
        std::memcmp(back.data(), m.data(), sizeof(double) * m.size()) != 0) {
        throw Error(ErrorCode::IOError, "matrix round trip failed for " + path.string());
    }
}

Matrix cvcluster::read_matrix_csv(const std::filesystem::path &path) {
    CsvRows rows = parse_csv(read_text_file(path));
    if (rows.empty()) {
        throw Error(ErrorCode::BadMatrix, "empty matrix file " + path.string());
    }
    size_t cols = rows[0].size();
    Matrix m(rows.size(), cols);
    for (size_t i = 0; i < rows.size(); i++) {
        if (rows[i].size() != cols) {
            throw Error(ErrorCode::BadMatrix, "ragged matrix file " + path.string());
        }
        for (size_t j = 0; j < cols; j++) {
            const std::string &cell = rows[i][j];
            char *end = nullptr;
            double v = std::strtod(cell.c_str(), &end);
            if (cell.empty() || end != cell.c_str() + cell.size()) {
                throw Error(ErrorCode::BadMatrix, "non-numeric entry '" + cell + "' in " + path.string());
            }
            m(i, j) = v;
        }
    }
    return m;
}

void cvcluster::write_json(const std::filesystem::path &path, const nlohmann::json &doc) {
    std::string text = doc.dump(2) + "\n";
    write_text_file(path, text);
    if (nlohmann::json::parse(read_text_file(path)) != doc) {
        throw Error(ErrorCode::IOError, "JSON round trip failed for " + path.string());
    }
}

std::string cvcluster::sha256_hex(const std::string &bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorCode::IOError, "SHA-256 computation failed");
    }
    static const char *hex = "0123456789abcdef";
    std::string out;
    for (unsigned int k = 0; k < len; k++) {
        out += hex[digest[k] >> 4];
        out += hex[digest[k] & 15];
    }
    return out;
}
