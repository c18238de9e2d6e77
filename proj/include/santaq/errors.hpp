// Copyright 2026 The santaq Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <stdexcept>
#include <string>

namespace santaq {

/// Size of a register or container is outside the supported range.
struct SizeError : std::length_error {
    using std::length_error::length_error;
};

/// Qubit, parameter, or component index outside its valid range.
struct IndexError : std::out_of_range {
    using std::out_of_range::out_of_range;
};

/// Operands disagree on dimension (qubit count, vector length).
struct ShapeError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct ArgumentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// A structural precondition of an operation is violated, e.g. a
/// parameter-shift request on a gate whose generator is not involutory.
struct ContractError : std::logic_error {
    using std::logic_error::logic_error;
};

struct InsufficientSamplesError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// An estimator produced a non-finite gradient or variance.
struct EstimatorFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DegenerateTargetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IngestionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace santaq
