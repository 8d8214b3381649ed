// Copyright 2026 The qdmft Authors
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

#pragma once

#include <stdexcept>
#include <string>

namespace qdmft {

// Base of every error raised by the library. The CLI maps subclasses onto
// exit codes: NumericalError -> 2, InvariantError -> 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the documented domain (bad qubit index, angle set, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Input violates an operation precondition that is not a simple range check.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class InvariantError : public Error {
 public:
  using Error::Error;
};

// Failures of the numerical pipeline: degenerate spectra, poles hit on the
// real axis, bad fits, loops that cannot bracket a root.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class DegenerateGroundStateError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SingularityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class PoorFitError : public NumericalError {
 public:
  PoorFitError(const std::string& what, double rms)
      : NumericalError(what), rms_(rms) {}
  double rms() const { return rms_; }

 private:
  double rms_;
};

// The self-energy has a pole at the Fermi level: the caller is on the
// insulating branch and must treat the quasiparticle weight as zero.
class InsulatingBranchError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class BracketingError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace qdmft
