// Copyright 2026 The flsim Authors
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

namespace flsim {

// Bad arguments: wrong dimensions, non-finite entries, unknown labels.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class DimensionMismatch : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

// Anything that goes wrong once the inputs were accepted.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class BranchAmbiguity : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class NonUniqueSteadyState : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class StiffnessError : public NumericalError {
public:
    StiffnessError(const std::string& what, double t) : NumericalError(what), time_(t) {}
    double time() const noexcept { return time_; }

private:
    double time_;
};

class CoverageError : public InvalidInput {
public:
    using InvalidInput::InvalidInput;
};

}  // namespace flsim
