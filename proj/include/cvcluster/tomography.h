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

#ifndef CVCLUSTER_TOMOGRAPHY_H
#define CVCLUSTER_TOMOGRAPHY_H

#include <cstdint>
#include <optional>
#include <vector>

#include "cvcluster/gaussian_state.h"

namespace cvcluster {

/// Homodyne measurement of the mode u (unit complex vector) at local-oscillator phase theta.
struct MeasurementSetting {
    CVector mode_vector;
    double phase;

    /// [Re(u e^{i theta}); Im(u e^{i theta})].
    Vector form() const;
};

/// Per mode: phases {0, pi/4, pi/2}. Per pair m < n: (e_m + e_n)/sqrt2 and (e_m + i e_n)/sqrt2 at the same phases.
std::vector<MeasurementSetting> informationally_complete_settings(int mode_count);

/// Rank of the settings' outer products v v^T over the space of symmetric matrices.
int design_rank(const std::vector<MeasurementSetting> &settings);

struct SettingRecord {
    size_t samples;
    double variance;
    double mean;
};

struct TomographyDataset {
    int mode_count = 0;
    std::vector<MeasurementSetting> settings;
    std::vector<SettingRecord> records;
};

/// Simulates homodyne records. Setting k draws from a stream derived from (seed, k).
TomographyDataset acquire(
    const GaussianState &state,
    const std::vector<MeasurementSetting> &settings,
    size_t samples,
    double efficiency,
    uint64_t seed,
    int workers = 1);

/// Dataset whose variances equal the exact model values v^T V v.
TomographyDataset exact_dataset(const Matrix &cov, const std::vector<MeasurementSetting> &settings, size_t samples);

/// Weighted least squares for v_k^T V v_k = variance_k. May be unphysical.
Matrix linear_inversion(const TomographyDataset &data);

/// sum_k N_k [ln s_k + variance_k / s_k] with s_k = v_k^T V v_k. Infinite when some s_k <= 0.
double neg_log_likelihood(const TomographyDataset &data, const Matrix &cov);

/// Gradient of neg_log_likelihood with respect to the symmetric matrix V.
Matrix neg_log_likelihood_gradient(const TomographyDataset &data, const Matrix &cov);

/// Gradient with respect to the lower-triangular factor T of V = T T^T (upper part zero).
Matrix neg_log_likelihood_factor_gradient(const TomographyDataset &data, const Matrix &factor);

/// Nearest positive-definite matrix by eigenvalue flooring, followed by the Williamson clamp nu <- max(nu, 1).
Matrix project_to_physical(const Matrix &cov);

struct MleOptions {
    std::optional<Matrix> init;
    int max_iter = 5000;
    double tol = 1e-9;
    int projection_interval = 50;
};

struct ReconstructionResult {
    Matrix covariance;
    int iterations = 0;
    double objective = 0;
    double min_symplectic_eigenvalue = 0;
    /// max(0, 1 - nu_min).
    double physicality_residual = 0;
    bool converged = false;
};

ReconstructionResult mle_reconstruct(const TomographyDataset &data, const MleOptions &options = {});

}  // namespace cvcluster

#endif
