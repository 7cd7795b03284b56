// Copyright 2026 The qkd Authors
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
/**
 * @file error.hpp
 * Exception hierarchy shared by every qkd module. Each category maps onto one
 * CLI exit code.
 */
#pragma once

#include <stdexcept>
#include <string>

namespace qkd {

class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
    [[nodiscard]] virtual int exit_code() const noexcept { return 1; }
};

/// Invalid configuration value (qubit cap, epochs < 1, ...).
class ConfigError : public Error {
  public:
    using Error::Error;
};

/// Bad argument to a library call (index out of range, length mismatch).
class ArgumentError : public Error {
  public:
    using Error::Error;
};

/// Malformed user input such as an empty token sequence or a tiny corpus.
class InputError : public Error {
  public:
    using Error::Error;
    [[nodiscard]] int exit_code() const noexcept override { return 2; }
};

/// Missing or inconsistent data files.
class DataError : public Error {
  public:
    using Error::Error;
    [[nodiscard]] int exit_code() const noexcept override { return 2; }
};

/// Corrupt or unreadable checkpoint.
class FormatError : public Error {
  public:
    using Error::Error;
    [[nodiscard]] int exit_code() const noexcept override { return 2; }
};

/// Non-finite loss or gradient.
class NumericalError : public Error {
  public:
    using Error::Error;
    [[nodiscard]] int exit_code() const noexcept override { return 3; }
};

} // namespace qkd
