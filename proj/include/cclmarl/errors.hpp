// Copyright 2026 The cclmarl Authors
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

#ifndef CCLMARL_ERRORS_HPP_
#define CCLMARL_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace ccl {

// Raised for shape mismatches, invalid settings and malformed config files.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when an optimization step produces non-finite values.
class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised by k-NN queries against an empty point set.
class InsufficientMemory : public std::runtime_error {
 public:
  InsufficientMemory() : std::runtime_error("insufficient memory: empty point set") {}
};

}  // namespace ccl

#endif  // CCLMARL_ERRORS_HPP_
