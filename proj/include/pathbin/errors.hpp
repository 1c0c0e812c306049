// SPDX-License-Identifier: Apache-2.0
//
// pathbin: multipath path-bin tracking and blockage forecasting for UAV links
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <stdexcept>
#include <string>

namespace pathbin {

// Input or configuration rejected before any computation ran.
class ValidationError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

// Failure while a pipeline stage was executing.
class RuntimeError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class OutOfRangeElevation : public ValidationError {
  public:
    using ValidationError::ValidationError;
};

class DegenerateGeometry : public RuntimeError {
  public:
    using RuntimeError::RuntimeError;
};

class IndexOutOfRange : public ValidationError {
  public:
    using ValidationError::ValidationError;
};

class SeriesTooShort : public RuntimeError {
  public:
    SeriesTooShort(std::size_t length, int order)
        : RuntimeError("series of length " + std::to_string(length) + " too short for AR order " +
                       std::to_string(order)),
          length_(length), order_(order) {}
    std::size_t length() const { return length_; }
    int order() const { return order_; }

  private:
    std::size_t length_;
    int order_;
};

class HistoryTooShort : public RuntimeError {
  public:
    using RuntimeError::RuntimeError;
};

class MissingLosReference : public RuntimeError {
  public:
    using RuntimeError::RuntimeError;
};

class EmptyPairs : public RuntimeError {
  public:
    using RuntimeError::RuntimeError;
};

class AllValuesExcluded : public RuntimeError {
  public:
    using RuntimeError::RuntimeError;
};

// Parse failure in a config or dataset file; carries the offending line when known.
class ParseError : public ValidationError {
  public:
    ParseError(const std::string &what, int line = 0)
        : ValidationError(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
    int line() const { return line_; }

  private:
    int line_;
};

} // namespace pathbin
