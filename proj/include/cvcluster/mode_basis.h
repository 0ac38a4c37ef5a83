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

#ifndef CVCLUSTER_MODE_BASIS_H
#define CVCLUSTER_MODE_BASIS_H

#include <cstdint>
#include <string>

#include "cvcluster/symplectic.h"

namespace cvcluster {

/// Row m holds c_{m,n} with a'_m = sum_n c_{m,n} a_n. Always unitary.
class ModeBasis {
   public:
    explicit ModeBasis(CMatrix coefficients, double tol = 1e-8);

    static ModeBasis identity(int size);

    int size() const {
        return (int)coefficients_.rows();
    }
    const CMatrix &coefficients() const {
        return coefficients_;
    }
    ModeBasis adjoint() const;

    /// Rows rescaled by a phase so each row's largest-magnitude entry is real positive.
    ModeBasis with_canonical_phases() const;

   private:
    CMatrix coefficients_;
};

/// Rows (e_m + e_{M+1-m})/sqrt(2) for m = 1..M/2, then (e_m - e_{M+1-m})/sqrt(2).
ModeBasis epr_pairing_basis(int mode_count);

/// Applies b1 first, then b2: coefficients c2 c1.
ModeBasis compose(const ModeBasis &b1, const ModeBasis &b2);

/// Entry (i, j) = |<realized_i | design_j>|^2. The realized rows need not be orthonormal.
Matrix crosstalk(const ModeBasis &design, const CMatrix &realized);
Matrix crosstalk(const ModeBasis &design, const ModeBasis &realized);

/// Mean off-diagonal crosstalk entry.
double mean_offdiagonal_crosstalk(const Matrix &crosstalk);

/// Adds complex Gaussian noise of the given scale to each coefficient and renormalizes rows.
/// The result is deliberately not re-orthogonalized.
CMatrix perturb_basis(const ModeBasis &basis, double noise, uint64_t seed);

std::string basis_to_json(const ModeBasis &basis);
ModeBasis basis_from_json(const std::string &text);

}  // namespace cvcluster

#endif
