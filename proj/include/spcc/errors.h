// Copyright 2026 The SPCC Authors. All Rights Reserved.
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

#ifndef SPCC_ERRORS_H_
#define SPCC_ERRORS_H_

#include <stdexcept>
#include <string>
#include <utility>

namespace spcc {

// Root of every error the library raises. The CLI maps subclasses onto
// distinct exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tensor or configuration shapes that do not fit together.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Invalid caller-supplied values (flags, counts, out-of-range labels).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// Bad magic, unknown version, or a structurally unreadable file.
class FormatError : public Error {
 public:
  using Error::Error;
};

// A stream or checkpoint produced by a different model configuration.
class IncompatibleModelError : public Error {
 public:
  using Error::Error;
};

// A checksum mismatch or an undecodable payload.
class CorruptionError : public Error {
 public:
  CorruptionError(std::string segment, const std::string& what)
      : Error(what), segment_(std::move(segment)) {}
  const std::string& segment() const { return segment_; }

 private:
  std::string segment_;
};

// A decode path needs a segment the file does not carry.
class IncompleteBitstreamError : public Error {
 public:
  using Error::Error;
};

// Dataset layout problems (empty class folders, no usable meshes).
class DatasetError : public Error {
 public:
  using Error::Error;
};

// Non-finite values during optimization.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace spcc

#endif  // SPCC_ERRORS_H_
