// Copyright (c) 2026 The lowlight Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace lowlight {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// An operation was called with arguments violating its contract
/// (wrong color-space/range tag, mismatched shapes, out-of-range parameter).
class ContractError : public Error {
public:
    using Error::Error;
};

/// Malformed input data: response-curve records, image streams, manifests.
class ParseError : public Error {
public:
    using Error::Error;
};

/// An image is too dark or empty for a meaningful statistic (near-zero mean).
class DegenerateImageError : public Error {
public:
    using Error::Error;
};

/// Filesystem-level failure: missing file, unwritable directory.
class IoError : public Error {
public:
    using Error::Error;
};

} // namespace lowlight
