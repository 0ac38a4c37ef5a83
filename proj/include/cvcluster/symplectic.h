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

#ifndef CVCLUSTER_SYMPLECTIC_H
#define CVCLUSTER_SYMPLECTIC_H

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "cvcluster/error.h"

namespace cvcluster {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// Quadratures are ordered (x_1..x_M, p_1..p_M). Vacuum covariance is the identity.
Matrix symplectic_form(int mode_count);

/// Symplectic eigenvalues, one per mode, ascending.
struct SymplecticSpectrum {
    std::vector<double> values;

    double min() const;
    size_t size() const {
        return values.size();
    }
};

struct WilliamsonDecomposition {
    Matrix symplectic;
    SymplecticSpectrum spectrum;

    /// diag(nu_1..nu_M, nu_1..nu_M).
    Matrix diagonal() const;
};

bool is_symmetric(const Matrix &m, double tol = 1e-10);

/// Throws NonSymmetric unless `v` is square, even-sized and symmetric within `tol`.
void check_covariance_shape(const Matrix &v, double tol = 1e-10);

SymplecticSpectrum symplectic_eigenvalues(const Matrix &v);

/// Symplectic spectrum computed from a Cholesky factor `l` of the covariance (v = l l^T)
/// against a (possibly sign-flipped) symplectic form. No validation.
SymplecticSpectrum symplectic_eigenvalues_from_factor(const Matrix &l, const Matrix &omega);

WilliamsonDecomposition williamson(const Matrix &v);

/// Conditional covariance of the kept modes after eliminating the rest.
Matrix schur_complement(const Matrix &v, std::span<const int> keep_modes);

Matrix matrix_sqrt(const Matrix &p);
Matrix matrix_inverse_sqrt(const Matrix &p);

/// Quadrature row indices (x block then p block) of the given modes.
std::vector<int> quadrature_indices(int mode_count, std::span<const int> modes);

Matrix submatrix(const Matrix &v, std::span<const int> rows, std::span<const int> cols);

/// Permutation P with (x_1, p_1, x_2, p_2, ...) = P (x_1..x_M, p_1..p_M).
Matrix interleave_permutation(int mode_count);
Matrix to_interleaved(const Matrix &v);
Matrix from_interleaved(const Matrix &v);

/// Deviation ||S^T Omega S - Omega||_F.
double symplectic_residual(const Matrix &s);

}  // namespace cvcluster

#endif
