// Copyright 2026 The cavityfarm Authors
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

#include <functional>
#include <stdexcept>
#include <string>

namespace cavityfarm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller violated an operation's documented precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Non-finite generator entries or similar breakdown during time stepping.
class IntegrationError : public Error {
 public:
  using Error::Error;
};

/// A numerical self-check (symplectic defect, radicand sign, ...) failed.
class DiagnosticError : public Error {
 public:
  using Error::Error;
};

/// Physical model evaluated outside its domain (L <= 0, |h| too large, ...).
class ModelError : public Error {
 public:
  using Error::Error;
};

/// Receives non-fatal warnings (adiabaticity, light-crossing, ...).
using WarningSink = std::function<void(const std::string&)>;

/// Default sink: prints "warning: <msg>" to stderr.
WarningSink stderr_warnings();

/// Sink that drops everything.
WarningSink silent_warnings();

}  // namespace cavityfarm
