// Copyright 2026 The fqdyn Authors
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

namespace fqdyn {

/// Base of every error thrown by the library.
///
/// Errors fall into two categories that the command-line front end maps onto
/// distinct exit codes: validation errors (bad input, exit 2) and numerical
/// assumption errors (a computation hit a condition it refuses to paper over,
/// exit 3).
class Error : public std::runtime_error {
 public:
  enum class Category { validation, numerical };

  Error(Category category, const std::string& what)
      : std::runtime_error(what), category_(category) {}

  Category category() const noexcept { return category_; }

 private:
  Category category_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error(Category::validation, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(Category::numerical, what) {}
};

#define FQDYN_DEFINE_ERROR(Name, Base)                                 \
  class Name : public Base {                                           \
   public:                                                             \
    explicit Name(const std::string& what) : Base(#Name ": " + what) {} \
  }

// core state
FQDYN_DEFINE_ERROR(ZeroProjection, NumericalError);
FQDYN_DEFINE_ERROR(NonOrthonormalInput, ValidationError);
FQDYN_DEFINE_ERROR(NonUnitary, ValidationError);
FQDYN_DEFINE_ERROR(DuplicateRegister, ValidationError);
FQDYN_DEFINE_ERROR(NotAntisymmetric, NumericalError);
FQDYN_DEFINE_ERROR(BruteForceLimitExceeded, ValidationError);
FQDYN_DEFINE_ERROR(IndexOutOfRange, ValidationError);

// hamiltonian / meanfield
FQDYN_DEFINE_ERROR(SingularPotential, NumericalError);
FQDYN_DEFINE_ERROR(DimensionMismatch, ValidationError);
FQDYN_DEFINE_ERROR(ConvergenceFailure, NumericalError);

// stateprep
FQDYN_DEFINE_ERROR(DecompositionFailure, NumericalError);
FQDYN_DEFINE_ERROR(ResidualPopulation, NumericalError);
FQDYN_DEFINE_ERROR(OrderingViolation, NumericalError);

// shadows
FQDYN_DEFINE_ERROR(InsufficientSamples, ValidationError);
FQDYN_DEFINE_ERROR(AssumptionViolated, NumericalError);
FQDYN_DEFINE_ERROR(EnumerationUnavailable, ValidationError);

// costmodel
FQDYN_DEFINE_ERROR(MissingM, ValidationError);
FQDYN_DEFINE_ERROR(EtaTooSmall, ValidationError);

// cli
FQDYN_DEFINE_ERROR(UsageError, ValidationError);

#undef FQDYN_DEFINE_ERROR

}  // namespace fqdyn
