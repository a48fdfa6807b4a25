// Copyright 2026 The QVD Authors
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

namespace qvd {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on the caller's input does not hold (shape, range, validity).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed: non-convergence, underflow, leaving the
/// positive cone, an undefined spectral function value.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace qvd
