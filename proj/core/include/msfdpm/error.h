// Copyright 2026 The msfdpm Authors
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

#ifndef MSFDPM_ERROR_H_
#define MSFDPM_ERROR_H_

#include <stdexcept>
#include <string>

namespace msfdpm {

// Base class for every error raised by the library. A pipeline stage may tag
// an in-flight error with its name before rethrowing it.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& message)
      : std::runtime_error(message), message_(message) {}

  const char* what() const noexcept override { return message_.c_str(); }

  const std::string& stage() const { return stage_; }
  void set_stage(const std::string& stage) {
    if (!stage_.empty()) return;
    stage_ = stage;
    message_ = "[" + stage + "] " + message_;
  }

 private:
  std::string message_;
  std::string stage_;
};

// Malformed files, unreadable images, mismatched operand shapes.
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

// Dimensions that do not admit the requested patch grid or pyramid.
class GeometryError : public Error {
 public:
  using Error::Error;
};

// Inconsistent weights or pipeline parameters.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Patch index outside the grid bounds.
class IndexError : public Error {
 public:
  using Error::Error;
};

// An operation was invoked outside its calling contract.
class ContractError : public Error {
 public:
  using Error::Error;
};

// Numeric argument outside the domain of a formula.
class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace msfdpm

#endif  // MSFDPM_ERROR_H_
