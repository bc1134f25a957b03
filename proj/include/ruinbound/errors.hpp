/*
 Copyright 2026 The ruinbound Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

#pragma once

#include <stdexcept>
#include <string>

namespace ruinbound {

/// Base class for every error raised by the solver.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter or input violates a documented precondition
/// (bad market constants, negative consumption, malformed config).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// The inputs are well formed but the model they describe has no finite or
/// continuous solution (divergent kernels, penalty above the utility ceiling).
class ModelError : public Error {
 public:
  using Error::Error;
};

/// A root search, bracket expansion or quadrature failed to converge.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace ruinbound
