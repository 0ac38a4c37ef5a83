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

#include "cvcluster/error.h"

using namespace cvcluster;

const char *cvcluster::error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonSymmetric:
            return "NonSymmetric";
        case ErrorCode::NotPositiveDefinite:
            return "NotPositiveDefinite";
        case ErrorCode::ConvergenceFailure:
            return "ConvergenceFailure";
        case ErrorCode::SingularBlock:
            return "SingularBlock";
        case ErrorCode::NotUnitary:
            return "NotUnitary";
        case ErrorCode::NotOrthogonal:
            return "NotOrthogonal";
        case ErrorCode::IndexOutOfRange:
            return "IndexOutOfRange";
        case ErrorCode::DegenerateVariance:
            return "DegenerateVariance";
        case ErrorCode::OddModeCount:
            return "OddModeCount";
        case ErrorCode::SizeMismatch:
            return "SizeMismatch";
        case ErrorCode::TooSmall:
            return "TooSmall";
        case ErrorCode::TooManyModes:
            return "TooManyModes";
        case ErrorCode::RankDeficient:
            return "RankDeficient";
        case ErrorCode::UnknownSyndrome:
            return "UnknownSyndrome";
        case ErrorCode::InvalidConfig:
            return "InvalidConfig";
        case ErrorCode::BadMatrix:
            return "BadMatrix";
        case ErrorCode::IOError:
            return "IOError";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string &message)
    : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {
}
