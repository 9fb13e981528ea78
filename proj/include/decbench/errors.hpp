// Copyright 2026 The decbench Authors
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

#ifndef DECBENCH_ERRORS_HPP_
#define DECBENCH_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace decbench {

// Invalid numeric input: malformed tables, out-of-range parameters.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The operation is not defined for this combination of inputs.
class UnsupportedError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class UnconvergedError : public std::runtime_error {
 public:
  UnconvergedError(const std::string& what, double gap)
      : std::runtime_error(what), gap_(gap) {}
  double gap() const { return gap_; }

 private:
  double gap_;
};

}  // namespace decbench

#endif  // DECBENCH_ERRORS_HPP_
