//
// Copyright 2026 The locsynth Authors
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

#ifndef LOCSYNTH_ERROR_HPP_
#define LOCSYNTH_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace locsynth {

// Caller supplied a parameter outside its documented domain.
class InvalidParameter : public std::invalid_argument {
 public:
  explicit InvalidParameter(const std::string& what)
      : std::invalid_argument(what) {}
};

// Input data (files, point sets, graphs) failed validation.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Geometry the algorithms do not handle, e.g. a centroid fan that folds over.
class UnsupportedShape : public std::runtime_error {
 public:
  explicit UnsupportedShape(const std::string& what)
      : std::runtime_error(what) {}
};

// A metric was requested on inputs for which it is not defined.
class UndefinedMetric : public std::domain_error {
 public:
  explicit UndefinedMetric(const std::string& what)
      : std::domain_error(what) {}
};

// An internal invariant (privacy accounting, conservation) did not hold.
class InvariantViolation : public std::logic_error {
 public:
  explicit InvariantViolation(const std::string& what)
      : std::logic_error(what) {}
};

}  // namespace locsynth

#endif  // LOCSYNTH_ERROR_HPP_
