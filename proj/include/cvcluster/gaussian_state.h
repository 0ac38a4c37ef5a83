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

#ifndef CVCLUSTER_GAUSSIAN_STATE_H
#define CVCLUSTER_GAUSSIAN_STATE_H

#include <cstdint>
#include <span>
#include <vector>

#include "cvcluster/symplectic.h"

namespace cvcluster {

/// Detection efficiency times homodyne visibility squared.
constexpr double DEFAULT_EFFICIENCY = 0.99 * 0.95 * 0.95;

double squeezing_db(double r);
double squeezing_r_from_db(double db);

/// The observable v^T q for a real coefficient vector v over 2M quadratures.
struct QuadratureForm {
    Vector coeffs;

    QuadratureForm() = default;
    explicit QuadratureForm(Vector coeffs);

    static QuadratureForm x(int mode_count, int mode);
    static QuadratureForm p(int mode_count, int mode);
    /// cos(theta) x_m + sin(theta) p_m.
    static QuadratureForm rotated(int mode_count, int mode, double theta);

    int mode_count() const {
        return (int)coeffs.size() / 2;
    }
    /// Mode index if the form touches exactly one mode, otherwise -1.
    int single_mode() const;
    QuadratureForm operator+(const QuadratureForm &other) const;
    QuadratureForm operator-(const QuadratureForm &other) const;
    QuadratureForm operator*(double s) const;
};

/// v^T Omega w. Zero iff the two observables commute.
double commutator(const QuadratureForm &v, const QuadratureForm &w);

struct Moments {
    double mean;
    double variance;
};

class GaussianState {
   public:
    /// Validates shape, symmetry and finiteness. Physicality is not enforced here.
    GaussianState(Vector mean, Matrix cov);

    int mode_count() const {
        return (int)mean_.size() / 2;
    }
    const Vector &mean() const {
        return mean_;
    }
    const Matrix &cov() const {
        return cov_;
    }

    /// True when cov + i Omega is positive semidefinite within `tol`.
    bool is_physical(double tol = 1e-8) const;

   private:
    Vector mean_;
    Matrix cov_;
};

GaussianState vacuum(int mode_count);

/// Mode m has variance e^{-2 r_m} along cos(theta_m) x + sin(theta_m) p.
GaussianState squeezed_vacuum(std::span<const double> r, std::span<const double> theta);

/// [[Re U, -Im U], [Im U, Re U]].
Matrix passive_symplectic(const CMatrix &u);
GaussianState apply_passive(const GaussianState &state, const CMatrix &u);
GaussianState apply_symplectic(const GaussianState &state, const Matrix &s);

GaussianState displace(const GaussianState &state, int mode, double dx, double dp);

/// Conditions on the outcome of a single-mode quadrature and removes that mode.
GaussianState homodyne_condition(const GaussianState &state, const QuadratureForm &form, double outcome);

Moments expectation_and_variance(const GaussianState &state, const QuadratureForm &form);

/// Moments seen by a detector of efficiency eta: mean scaled by sqrt(eta), variance mixed with vacuum.
Moments measured_moments(const GaussianState &state, const QuadratureForm &form, double efficiency);

std::vector<double> sample_quadratures(
    const GaussianState &state, const QuadratureForm &form, size_t count, double efficiency, uint64_t seed);

/// Deterministic per-task seed derived from a base seed.
uint64_t derive_seed(uint64_t base, uint64_t stream);

}  // namespace cvcluster

#endif
