// Copyright 2026 The poolrank Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace poolrank {

//! Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

//! Malformed or inconsistent input (files, arguments, schemas).
class InputError : public Error {
 public:
  using Error::Error;
};

//! Input that is well formed but degenerate for the requested computation.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

}  // namespace poolrank
