// SPDX-License-Identifier: Apache-2.0
//
// qcslab: quantized compressed sensing laboratory
// Copyright (C) 2026 qcslab developers
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

namespace qcs {

// Every library failure derives from qcs::Error so the C boundary can map
// it onto a status code with a single catch.

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid dimensions, hyperparameters or option values.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Vector or matrix dimensions do not agree.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Non-finite input, or a quantity that is mathematically undefined.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Quantization index outside the codomain of the encoder.
class ProtocolError : public Error {
public:
    using Error::Error;
};

/// Object used before it was fully prepared (e.g. no hard quantizer yet).
class StateError : public Error {
public:
    using Error::Error;
};

/// Training produced a non-finite cost or gradient.
class DivergenceError : public Error {
public:
    using Error::Error;
};

/// File could not be opened, read or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// File content does not follow the documented container layout.
class FormatError : public Error {
public:
    using Error::Error;
};

} // namespace qcs
