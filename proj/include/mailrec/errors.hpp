// Copyright 2026 The mailrec Authors.
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

namespace mailrec {

// Every failure raised by the library derives from Error so callers can map
// categories onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tensor or matrix extents do not conform to an operation's rule.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A NaN or infinity appeared where only finite reals are allowed.
class NumericsError : public Error {
 public:
  using Error::Error;
};

// A caller violated a documented precondition.
class ContractError : public Error {
 public:
  using Error::Error;
};

// A file could not be parsed or carries the wrong magic/layout.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Input data, or the result of filtering it, is empty.
class EmptyDataError : public Error {
 public:
  using Error::Error;
};

class SplitError : public Error {
 public:
  using Error::Error;
};

// A configuration value is outside its valid range.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A file is missing or unreadable/unwritable.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace mailrec
