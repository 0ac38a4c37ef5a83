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

#ifndef CVCLUSTER_ERROR_H
#define CVCLUSTER_ERROR_H

#include <stdexcept>
#include <string>

namespace cvcluster {

enum class ErrorCode {
    NonSymmetric,
    NotPositiveDefinite,
    ConvergenceFailure,
    SingularBlock,
    NotUnitary,
    NotOrthogonal,
    IndexOutOfRange,
    DegenerateVariance,
    OddModeCount,
    SizeMismatch,
    TooSmall,
    TooManyModes,
    RankDeficient,
    UnknownSyndrome,
    InvalidConfig,
    BadMatrix,
    IOError,
};

const char *error_code_name(ErrorCode code);

/// Raised by every library operation whose preconditions fail.
class Error : public std::runtime_error {
   public:
    Error(ErrorCode code, const std::string &message);
    ErrorCode code() const noexcept {
        return code_;
    }

   private:
    ErrorCode code_;
};

}  // namespace cvcluster

#endif
