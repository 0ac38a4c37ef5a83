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

#include "cvcluster/symplectic.h"

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace cvcluster;

Matrix cvcluster::symplectic_form(int mode_count) {
    if (mode_count < 1) {
        throw Error(ErrorCode::TooSmall, "mode count must be positive");
    }
    int n = mode_count;
    Matrix omega = Matrix::Zero(2 * n, 2 * n);
    omega.topRightCorner(n, n).setIdentity();
    omega.bottomLeftCorner(n, n) = -Matrix::Identity(n, n);
    return omega;
}

double SymplecticSpectrum::min() const {
    if (values.empty()) {
        throw Error(ErrorCode::TooSmall, "empty symplectic spectrum");
    }
    return values.front();
}

Matrix WilliamsonDecomposition::diagonal() const {
    size_t m = spectrum.size();
    Vector d(2 * m);
    for (size_t k = 0; k < m; k++) {
        d[k] = spectrum.values[k];
        d[k + m] = spectrum.values[k];
    }
    return d.asDiagonal();
}

bool cvcluster::is_symmetric(const Matrix &m, double tol) {
    if (m.rows() != m.cols()) {
        return false;
    }
    for (Eigen::Index i = 0; i < m.rows(); i++) {
        for (Eigen::Index j = 0; j < i; j++) {
            if (std::abs(m(i, j) - m(j, i)) > tol) {
                return false;
            }
        }
    }
    return true;
}

void cvcluster::check_covariance_shape(const Matrix &v, double tol) {
    if (v.rows() != v.cols() || v.rows() == 0 || v.rows() % 2 != 0) {
        std::stringstream ss;
        ss << "covariance must be a non-empty square matrix of even size, got " << v.rows() << "x" << v.cols();
        throw Error(ErrorCode::NonSymmetric, ss.str());
    }
    if (!v.allFinite()) {
        throw Error(ErrorCode::NonSymmetric, "covariance has non-finite entries");
    }
    if (!is_symmetric(v, tol)) {
        throw Error(ErrorCode::NonSymmetric, "covariance is not symmetric");
    }
}

SymplecticSpectrum cvcluster::symplectic_eigenvalues_from_factor(const Matrix &l, const Matrix &omega) {
    // C = L^T Omega L is antisymmetric with singular values nu, each twice.
    Eigen::Index n = l.rows();
    Matrix c = l.transpose() * omega * l;
    Matrix ctc = c.transpose() * c;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(ctc, Eigen::EigenvaluesOnly);
    const Vector &ev = solver.eigenvalues();
    SymplecticSpectrum out;
    out.values.resize(n / 2);
    for (Eigen::Index k = 0; k < n / 2; k++) {
        double a = std::max(ev[2 * k], 0.0);
        double b = std::max(ev[2 * k + 1], 0.0);
        out.values[k] = 0.5 * (std::sqrt(a) + std::sqrt(b));
    }
    return out;
}

SymplecticSpectrum cvcluster::symplectic_eigenvalues(const Matrix &v) {
    check_covariance_shape(v);
    Eigen::LLT<Matrix> llt(v);
    if (llt.info() != Eigen::Success) {
        throw Error(ErrorCode::NotPositiveDefinite, "covariance is not positive definite");
    }
    Matrix l = llt.matrixL();
    return symplectic_eigenvalues_from_factor(l, symplectic_form((int)v.rows() / 2));
}

static Eigen::SelfAdjointEigenSolver<Matrix> positive_eigensystem(const Matrix &p) {
    if (p.rows() != p.cols() || !is_symmetric(p, 1e-10 * std::max(1.0, p.cwiseAbs().maxCoeff()))) {
        throw Error(ErrorCode::NonSymmetric, "matrix is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (p + p.transpose()));
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::ConvergenceFailure, "symmetric eigensolver failed");
    }
    if (p.rows() > 0 && solver.eigenvalues()[0] <= 0) {
        throw Error(ErrorCode::NotPositiveDefinite, "matrix is not positive definite");
    }
    return solver;
}

Matrix cvcluster::matrix_sqrt(const Matrix &p) {
    return positive_eigensystem(p).operatorSqrt();
}

Matrix cvcluster::matrix_inverse_sqrt(const Matrix &p) {
    return positive_eigensystem(p).operatorInverseSqrt();
}

WilliamsonDecomposition cvcluster::williamson(const Matrix &v) {
    check_covariance_shape(v);
    int m = (int)v.rows() / 2;
    auto sys = positive_eigensystem(v);
    Matrix root = sys.operatorSqrt();
    Matrix inv_root = sys.operatorInverseSqrt();
    Matrix k = inv_root * symplectic_form(m) * inv_root;
    k = 0.5 * (k - k.transpose());

    CMatrix ik = std::complex<double>(0, 1) * k.cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(ik);
    if (solver.info() != Eigen::Success) {
        throw Error(ErrorCode::ConvergenceFailure, "Hermitian eigensolver failed");
    }

    // Eigenvalues of iK come in pairs +-1/nu; the top m are 1/nu in descending nu order.
    Matrix r(2 * m, 2 * m);
    WilliamsonDecomposition out;
    out.spectrum.values.resize(m);
    Vector scale(2 * m);
    for (int j = 0; j < m; j++) {
        Eigen::Index col = 2 * m - 1 - j;
        double lambda = solver.eigenvalues()[col];
        if (!(lambda > 0)) {
            throw Error(ErrorCode::ConvergenceFailure, "unpaired symplectic spectrum");
        }
        CVector u = solver.eigenvectors().col(col);
        r.col(j) = std::sqrt(2.0) * u.imag();
        r.col(j + m) = std::sqrt(2.0) * u.real();
        out.spectrum.values[j] = 1.0 / lambda;
        scale[j] = std::sqrt(lambda);
        scale[j + m] = std::sqrt(lambda);
    }
    out.symplectic = root * r * scale.asDiagonal();
    return out;
}

std::vector<int> cvcluster::quadrature_indices(int mode_count, std::span<const int> modes) {
    std::vector<int> out;
    out.reserve(2 * modes.size());
    for (int m : modes) {
        out.push_back(m);
    }
    for (int m : modes) {
        out.push_back(m + mode_count);
    }
    return out;
}

Matrix cvcluster::submatrix(const Matrix &v, std::span<const int> rows, std::span<const int> cols) {
    Matrix out(rows.size(), cols.size());
    for (size_t i = 0; i < rows.size(); i++) {
        for (size_t j = 0; j < cols.size(); j++) {
            out(i, j) = v(rows[i], cols[j]);
        }
    }
    return out;
}

Matrix cvcluster::schur_complement(const Matrix &v, std::span<const int> keep_modes) {
    check_covariance_shape(v);
    int m = (int)v.rows() / 2;
    std::vector<bool> kept(m, false);
    std::vector<int> keep;
    for (int k : keep_modes) {
        if (k < 0 || k >= m) {
            throw Error(ErrorCode::IndexOutOfRange, "mode index out of range: " + std::to_string(k));
        }
        if (kept[k]) {
            throw Error(ErrorCode::IndexOutOfRange, "duplicate mode index: " + std::to_string(k));
        }
        kept[k] = true;
    }
    std::vector<int> elim;
    for (int k = 0; k < m; k++) {
        (kept[k] ? keep : elim).push_back(k);
    }
    auto ki = quadrature_indices(m, keep);
    Matrix vkk = submatrix(v, ki, ki);
    if (elim.empty()) {
        return vkk;
    }
    auto ei = quadrature_indices(m, elim);
    Matrix vee = submatrix(v, ei, ei);
    Eigen::SelfAdjointEigenSolver<Matrix> solver(vee, Eigen::EigenvaluesOnly);
    double lo = solver.eigenvalues()[0];
    double hi = solver.eigenvalues()[solver.eigenvalues().size() - 1];
    if (!(lo > 0) || hi / lo > 1e12) {
        throw Error(ErrorCode::SingularBlock, "eliminated block is singular or ill-conditioned");
    }
    Matrix vke = submatrix(v, ki, ei);
    Eigen::LLT<Matrix> llt(vee);
    Matrix out = vkk - vke * llt.solve(vke.transpose());
    return 0.5 * (out + out.transpose());
}

Matrix cvcluster::interleave_permutation(int mode_count) {
    int n = 2 * mode_count;
    Matrix p = Matrix::Zero(n, n);
    for (int k = 0; k < mode_count; k++) {
        p(2 * k, k) = 1;
        p(2 * k + 1, k + mode_count) = 1;
    }
    return p;
}

Matrix cvcluster::to_interleaved(const Matrix &v) {
    Matrix p = interleave_permutation((int)v.rows() / 2);
    return p * v * p.transpose();
}

Matrix cvcluster::from_interleaved(const Matrix &v) {
    Matrix p = interleave_permutation((int)v.rows() / 2);
    return p.transpose() * v * p;
}

double cvcluster::symplectic_residual(const Matrix &s) {
    Matrix omega = symplectic_form((int)s.rows() / 2);
    return (s.transpose() * omega * s - omega).norm();
}
