// Copyright 2026 The HSE-QKD Authors
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

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hse {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operands live in spaces of different dimension.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A probability or norm left its admissible range by more than rounding noise.
class NumericalError : public Error {
public:
    using Error::Error;
};

class InvalidParameter : public Error {
public:
    using Error::Error;
};

/// A constructed object failed its own post-construction verification.
class ConstructionError : public Error {
public:
    using Error::Error;
};

/// Exact enumeration would exceed the configured work budget.
class BudgetError : public Error {
public:
    using Error::Error;
};

class CodecError : public Error {
public:
    CodecError(std::size_t line_no, std::string reason)
        : Error("line " + std::to_string(line_no) + ": " + reason),
          line_no_(line_no),
          reason_(std::move(reason)) {}

    std::size_t line_no() const noexcept { return line_no_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    std::size_t line_no_;
    std::string reason_;
};

class HandshakeError : public Error {
public:
    using Error::Error;
};

class ProtocolError : public Error {
public:
    using Error::Error;
};

/// Transport-level failure: refused connection, peer hang-up, bind failure.
class SessionError : public Error {
public:
    using Error::Error;
};

}  // namespace hse
