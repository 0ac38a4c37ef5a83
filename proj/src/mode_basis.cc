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

#include "cvcluster/mode_basis.h"

#include <cmath>
#include <random>

#include "json.hpp"

using namespace cvcluster;

ModeBasis::ModeBasis(CMatrix coefficients, double tol) : coefficients_(std::move(coefficients)) {
    Eigen::Index m = coefficients_.rows();
    if (m == 0 || coefficients_.cols() != m) {
        throw Error(ErrorCode::NotUnitary, "mode basis must be a non-empty square matrix");
    }
    if (!coefficients_.allFinite() ||
        (coefficients_ * coefficients_.adjoint() - CMatrix::Identity(m, m)).norm() >= tol) {
        throw Error(ErrorCode::NotUnitary, "mode basis rows are not orthonormal");
    }
}

ModeBasis ModeBasis::identity(int size) {
    if (size < 1) {
        throw Error(ErrorCode::TooSmall, "mode basis needs at least one mode");
    }
    return ModeBasis(CMatrix::Identity(size, size));
}

ModeBasis ModeBasis::adjoint() const {
    return ModeBasis(coefficients_.adjoint());
}

ModeBasis ModeBasis::with_canonical_phases() const {
    CMatrix c = coefficients_;
    for (Eigen::Index i = 0; i < c.rows(); i++) {
        Eigen::Index best = 0;
        c.row(i).cwiseAbs().maxCoeff(&best);
        std::complex<double> z = c(i, best);
        c.row(i) *= std::conj(z) / std::abs(z);
        c(i, best) = std::abs(z);
    }
    return ModeBasis(c);
}

ModeBasis cvcluster::epr_pairing_basis(int mode_count) {
    if (mode_count < 2 || mode_count % 2 != 0) {
        throw Error(ErrorCode::OddModeCount, "EPR pairing needs a positive even mode count");
    }
    int h = mode_count / 2;
    double s = 1 / std::sqrt(2.0);
    CMatrix c = CMatrix::Zero(mode_count, mode_count);
    for (int m = 0; m < h; m++) {
        int n = mode_count - 1 - m;
        c(m, m) = s;
        c(m, n) = s;
        c(m + h, m) = s;
        c(m + h, n) = -s;
    }
    return ModeBasis(c);
}

ModeBasis cvcluster::compose(const ModeBasis &b1, const ModeBasis &b2) {
    if (b1.size() != b2.size()) {
        throw Error(ErrorCode::SizeMismatch, "cannot compose bases of different sizes");
    }
    return ModeBasis(b2.coefficients() * b1.coefficients());
}

Matrix cvcluster::crosstalk(const ModeBasis &design, const CMatrix &realized) {
    if (realized.rows() != design.size() || realized.cols() != design.size()) {
        throw Error(ErrorCode::SizeMismatch, "design and realized bases differ in size");
    }
    CMatrix overlap = realized.conjugate() * design.coefficients().transpose();
    return overlap.cwiseAbs2();
}

Matrix cvcluster::crosstalk(const ModeBasis &design, const ModeBasis &realized) {
    return crosstalk(design, realized.coefficients());
}

double cvcluster::mean_offdiagonal_crosstalk(const Matrix &c) {
    Eigen::Index m = c.rows();
    if (m < 2) {
        return 0;
    }
    double total = c.sum() - c.trace();
    return total / (double)(m * (m - 1));
}

CMatrix cvcluster::perturb_basis(const ModeBasis &basis, double noise, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0, noise / std::sqrt(2.0));
    CMatrix c = basis.coefficients();
    for (Eigen::Index i = 0; i < c.rows(); i++) {
        for (Eigen::Index j = 0; j < c.cols(); j++) {
            double re = normal(rng);
            double im = normal(rng);
            c(i, j) += std::complex<double>(re, im);
        }
        c.row(i).normalize();
    }
    return c;
}

std::string cvcluster::basis_to_json(const ModeBasis &basis) {
    nlohmann::json rows = nlohmann::json::array();
    const CMatrix &c = basis.coefficients();
    for (Eigen::Index i = 0; i < c.rows(); i++) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < c.cols(); j++) {
            row.push_back({c(i, j).real(), c(i, j).imag()});
        }
        rows.push_back(row);
    }
    nlohmann::json doc = {{"size", basis.size()}, {"rows", rows}};
    return doc.dump(2);
}

ModeBasis cvcluster::basis_from_json(const std::string &text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
        int m = doc.at("size").get<int>();
        const auto &rows = doc.at("rows");
        if (m < 1 || (int)rows.size() != m) {
            throw Error(ErrorCode::SizeMismatch, "basis row count does not match size");
        }
        CMatrix c(m, m);
        for (int i = 0; i < m; i++) {
            if ((int)rows[i].size() != m) {
                throw Error(ErrorCode::SizeMismatch, "basis row length does not match size");
            }
            for (int j = 0; j < m; j++) {
                c(i, j) = {rows[i][j].at(0).get<double>(), rows[i][j].at(1).get<double>()};
            }
        }
        return ModeBasis(c);
    } catch (const nlohmann::json::exception &e) {
        throw Error(ErrorCode::BadMatrix, std::string("malformed basis JSON: ") + e.what());
    }
}
