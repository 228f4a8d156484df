// Copyright 2026 The Symile Authors
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

namespace symile {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller passed arguments that violate a precondition (shapes, ranges,
/// unknown names, overlapping variable groups).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Requested object would not fit in the enumerable regime.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// A computation produced a non-finite value (divergence, degenerate input).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace symile
