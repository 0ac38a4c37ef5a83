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

#include "cvcluster/gaussian_state.h"

#include <cmath>
#include <random>

using namespace cvcluster;

double cvcluster::squeezing_db(double r) {
    return -10.0 * std::log10(std::exp(-2.0 * r));
}

double cvcluster::squeezing_r_from_db(double db) {
    return db * std::log(10.0) / 20.0;
}

QuadratureForm::QuadratureForm(Vector c) : coeffs(std::move(c)) {
    if (coeffs.size() == 0 || coeffs.size() % 2 != 0) {
        throw Error(ErrorCode::SizeMismatch, "quadrature form needs 2M coefficients");
    }
    if (!coeffs.allFinite() || coeffs.cwiseAbs().maxCoeff() == 0) {
        throw Error(ErrorCode::DegenerateVariance, "quadrature form must be finite and nonzero");
    }
}

static void check_mode(int mode_count, int mode) {
    if (mode < 0 || mode >= mode_count) {
        throw Error(
            ErrorCode::IndexOutOfRange,
            "mode " + std::to_string(mode) + " out of range for " + std::to_string(mode_count) + " modes");
    }
}

QuadratureForm QuadratureForm::x(int mode_count, int mode) {
    return rotated(mode_count, mode, 0);
}

QuadratureForm QuadratureForm::p(int mode_count, int mode) {
    check_mode(mode_count, mode);
    Vector v = Vector::Zero(2 * mode_count);
    v[mode + mode_count] = 1;
    return QuadratureForm(v);
}

QuadratureForm QuadratureForm::rotated(int mode_count, int mode, double theta) {
    check_mode(mode_count, mode);
    Vector v = Vector::Zero(2 * mode_count);
    v[mode] = std::cos(theta);
    v[mode + mode_count] = std::sin(theta);
    return QuadratureForm(v);
}

int QuadratureForm::single_mode() const {
    int m = mode_count();
    int found = -1;
    for (int k = 0; k < m; k++) {
        if (coeffs[k] != 0 || coeffs[k + m] != 0) {
            if (found >= 0) {
                return -1;
            }
            found = k;
        }
    }
    return found;
}

QuadratureForm QuadratureForm::operator+(const QuadratureForm &other) const {
    return QuadratureForm(Vector(coeffs + other.coeffs));
}

QuadratureForm QuadratureForm::operator-(const QuadratureForm &other) const {
    return QuadratureForm(Vector(coeffs - other.coeffs));
}

QuadratureForm QuadratureForm::operator*(double s) const {
    return QuadratureForm(Vector(coeffs * s));
}

double cvcluster::commutator(const QuadratureForm &v, const QuadratureForm &w) {
    if (v.coeffs.size() != w.coeffs.size()) {
        throw Error(ErrorCode::SizeMismatch, "forms act on different mode counts");
    }
    int m = v.mode_count();
    // v^T Omega w without materializing Omega.
    return v.coeffs.head(m).dot(w.coeffs.tail(m)) - v.coeffs.tail(m).dot(w.coeffs.head(m));
}

GaussianState::GaussianState(Vector mean, Matrix cov) : mean_(std::move(mean)), cov_(std::move(cov)) {
    if (mean_.size() % 2 != 0 || cov_.rows() != mean_.size() || cov_.cols() != mean_.size()) {
        throw Error(ErrorCode::SizeMismatch, "mean and covariance sizes disagree");
    }
    if (!mean_.allFinite()) {
        throw Error(ErrorCode::BadMatrix, "mean has non-finite entries");
    }
    if (mean_.size() > 0) {
        check_covariance_shape(cov_, 1e-10 * std::max(1.0, cov_.cwiseAbs().maxCoeff()));
    }
}

bool GaussianState::is_physical(double tol) const {
    int m = mode_count();
    if (m == 0) {
        return true;
    }
    CMatrix h = cov_.cast<std::complex<double>>() +
                std::complex<double>(0, 1) * symplectic_form(m).cast<std::complex<double>>();
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(h, Eigen::EigenvaluesOnly);
    return solver.eigenvalues()[0] >= -tol;
}

GaussianState cvcluster::vacuum(int mode_count) {
    if (mode_count < 1) {
        throw Error(ErrorCode::TooSmall, "vacuum needs at least one mode");
    }
    return GaussianState(Vector::Zero(2 * mode_count), Matrix::Identity(2 * mode_count, 2 * mode_count));
}

GaussianState cvcluster::squeezed_vacuum(std::span<const double> r, std::span<const double> theta) {
    if (r.size() != theta.size()) {
        throw Error(ErrorCode::SizeMismatch, "squeezing and angle lists differ in length");
    }
    int m = (int)r.size();
    if (m < 1) {
        throw Error(ErrorCode::TooSmall, "squeezed vacuum needs at least one mode");
    }
    Matrix v = Matrix::Zero(2 * m, 2 * m);
    for (int k = 0; k < m; k++) {
        if (!std::isfinite(r[k]) || !std::isfinite(theta[k])) {
            throw Error(ErrorCode::InvalidConfig, "squeezing parameters must be finite");
        }
        double c = std::cos(theta[k]);
        double s = std::sin(theta[k]);
        double lo = std::exp(-2 * r[k]);
        double hi = std::exp(2 * r[k]);
        // Squeezed along (c, s), anti-squeezed along (-s, c).
        v(k, k) = lo * c * c + hi * s * s;
        v(k + m, k + m) = lo * s * s + hi * c * c;
        v(k, k + m) = v(k + m, k) = (lo - hi) * c * s;
    }
    return GaussianState(Vector::Zero(2 * m), v);
}

Matrix cvcluster::passive_symplectic(const CMatrix &u) {
    if (u.rows() != u.cols() || u.rows() == 0) {
        throw Error(ErrorCode::NotUnitary, "passive transformation must be square");
    }
    Eigen::Index m = u.rows();
    if ((u.adjoint() * u - CMatrix::Identity(m, m)).norm() >= 1e-8) {
        throw Error(ErrorCode::NotUnitary, "matrix is not unitary");
    }
    Matrix s(2 * m, 2 * m);
    s.topLeftCorner(m, m) = u.real();
    s.topRightCorner(m, m) = -u.imag();
    s.bottomLeftCorner(m, m) = u.imag();
    s.bottomRightCorner(m, m) = u.real();
    return s;
}

GaussianState cvcluster::apply_symplectic(const GaussianState &state, const Matrix &s) {
    if (s.rows() != state.mean().size() || s.cols() != state.mean().size()) {
        throw Error(ErrorCode::SizeMismatch, "transformation size does not match state");
    }
    Matrix v = s * state.cov() * s.transpose();
    return GaussianState(s * state.mean(), 0.5 * (v + v.transpose()));
}

GaussianState cvcluster::apply_passive(const GaussianState &state, const CMatrix &u) {
    if (u.rows() != state.mode_count()) {
        throw Error(ErrorCode::SizeMismatch, "unitary size does not match state");
    }
    return apply_symplectic(state, passive_symplectic(u));
}

GaussianState cvcluster::displace(const GaussianState &state, int mode, double dx, double dp) {
    int m = state.mode_count();
    check_mode(m, mode);
    Vector mean = state.mean();
    mean[mode] += dx;
    mean[mode + m] += dp;
    return GaussianState(mean, state.cov());
}

Moments cvcluster::expectation_and_variance(const GaussianState &state, const QuadratureForm &form) {
    if (form.coeffs.size() != state.mean().size()) {
        throw Error(ErrorCode::SizeMismatch, "form size does not match state");
    }
    const Vector &v = form.coeffs;
    return {v.dot(state.mean()), v.dot(state.cov() * v)};
}

Moments cvcluster::measured_moments(const GaussianState &state, const QuadratureForm &form, double efficiency) {
    if (!(efficiency >= 0 && efficiency <= 1)) {
        throw Error(ErrorCode::InvalidConfig, "efficiency must lie in [0, 1]");
    }
    Moments ideal = expectation_and_variance(state, form);
    double norm2 = form.coeffs.squaredNorm();
    return {
        std::sqrt(efficiency) * ideal.mean,
        efficiency * ideal.variance + (1 - efficiency) * norm2,
    };
}

GaussianState cvcluster::homodyne_condition(const GaussianState &state, const QuadratureForm &form, double outcome) {
    int m = state.mode_count();
    if (form.coeffs.size() != 2 * m) {
        throw Error(ErrorCode::SizeMismatch, "form size does not match state");
    }
    int measured = form.single_mode();
    if (measured < 0) {
        throw Error(ErrorCode::InvalidConfig, "homodyne form must act on exactly one mode");
    }
    const Vector &v = form.coeffs;
    double var = v.dot(state.cov() * v);
    if (!(var > 1e-12)) {
        throw Error(ErrorCode::DegenerateVariance, "measured quadrature has vanishing variance");
    }
    std::vector<int> rest_modes;
    for (int k = 0; k < m; k++) {
        if (k != measured) {
            rest_modes.push_back(k);
        }
    }
    auto rest = quadrature_indices(m, rest_modes);
    int n = (int)rest.size();
    Vector cross = state.cov() * v;
    Vector c(n);
    Vector mu(n);
    for (int i = 0; i < n; i++) {
        c[i] = cross[rest[i]];
        mu[i] = state.mean()[rest[i]];
    }
    double shift = (outcome - v.dot(state.mean())) / var;
    Matrix cov = submatrix(state.cov(), rest, rest) - c * c.transpose() / var;
    return GaussianState(mu + c * shift, 0.5 * (cov + cov.transpose()));
}

uint64_t cvcluster::derive_seed(uint64_t base, uint64_t stream) {
    std::seed_seq seq{
        (uint32_t)(base & 0xFFFFFFFFu), (uint32_t)(base >> 32), (uint32_t)(stream & 0xFFFFFFFFu),
        (uint32_t)(stream >> 32)};
    uint32_t out[2];
    seq.generate(out, out + 2);
    return ((uint64_t)out[1] << 32) | out[0];
}

std::vector<double> cvcluster::sample_quadratures(
    const GaussianState &state, const QuadratureForm &form, size_t count, double efficiency, uint64_t seed) {
    if (count < 1) {
        throw Error(ErrorCode::InvalidConfig, "sample count must be positive");
    }
    Moments mom = measured_moments(state, form, efficiency);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(mom.mean, std::sqrt(std::max(mom.variance, 0.0)));
    std::vector<double> out(count);
    for (auto &s : out) {
        s = normal(rng);
    }
    return out;
}
