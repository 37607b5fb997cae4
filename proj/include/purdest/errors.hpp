//
// Copyright 2026 The purdest Authors
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
//

#ifndef PURDEST_ERRORS_HPP_
#define PURDEST_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace purdest {

// Argument outside the domain where a formula or bound applies.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Exhaustive enumeration requested above the configured cap.
class DimensionTooLarge : public std::length_error {
 public:
  using std::length_error::length_error;
};

class InsufficientSamples : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidConfig : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A derived sample count does not fit the platform integer range.
class ParameterOverflow : public std::overflow_error {
 public:
  using std::overflow_error::overflow_error;
};

class EmptyDataset : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ReportIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace purdest

#endif  // PURDEST_ERRORS_HPP_
