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

#ifndef CVCLUSTER_WITNESSES_H
#define CVCLUSTER_WITNESSES_H

#include <cstdint>
#include <span>
#include <vector>

#include "cvcluster/symplectic.h"

namespace cvcluster {

constexpr int MAX_SWEEP_MODES = 24;
constexpr double ZERO_STEERING_THRESHOLD = 1e-10;

/// 1/4 Var(x_m + x_n) + 1/4 Var(p_m - p_n). Below 1 certifies inseparability.
double duan_value(const Matrix &v, int m, int n);

/// Product of the conditional variances of x_m given x_n and p_m given p_n.
double epr_product(const Matrix &v, int m, int n);

/// Two-party split of the modes. Bit k of `set_a` marks mode k as belonging to A.
struct Bipartition {
    int mode_count;
    uint64_t set_a;

    /// Orients a nonempty proper subset: A is the smaller side, or the side holding mode 0 on a tie.
    static Bipartition canonical(int mode_count, uint64_t subset);

    uint64_t set_b() const;
    std::vector<int> modes_a() const;
    std::vector<int> modes_b() const;
};

std::vector<int> modes_of_mask(uint64_t mask, int mode_count);

/// -ln of the smallest symplectic eigenvalue after flipping the p quadratures of set A.
double npt_value(const Matrix &v, const Bipartition &cut);

/// Steering from `from` to `to`, using the conditional covariance of `to` given `from`.
/// Modes in neither set are traced out.
double steerability(const Matrix &v, std::span<const int> from, std::span<const int> to);

struct WitnessRecord {
    uint64_t set_a;
    double npt;
    double steer_ab;
    double steer_ba;
};

struct WitnessReport {
    int mode_count = 0;
    /// Sorted ascending by (npt, set_a).
    std::vector<WitnessRecord> records;
    double min_npt = 0;
    size_t zero_steer_ab = 0;
    size_t zero_steer_ba = 0;
};

/// Evaluates every canonical bipartition. `limit`, when nonzero, truncates the enumeration
/// to its first `limit` subsets (benchmarking only).
WitnessReport full_sweep(const Matrix &v, int workers = 1, uint64_t limit = 0);

}  // namespace cvcluster

#endif
