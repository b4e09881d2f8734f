// Copyright 2026 The Clozekit Authors.
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

#ifndef CLOZEKIT_ERROR_H_
#define CLOZEKIT_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace clozekit {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File could not be opened, read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

// Input violates a data contract (bad example, bad config value, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Malformed line in a line-oriented file. line() is 1-based.
class ParseError : public ValidationError {
 public:
  ParseError(const std::string& source, std::size_t line,
             const std::string& message)
      : ValidationError(source + ":" + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

// Tensor shapes are incompatible for an operation.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Externally supplied labels do not line up with a tokenized book.
class AlignmentError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Ingestion found no books at all.
class EmptyCorpusError : public Error {
 public:
  using Error::Error;
};

// Training produced a non-finite loss.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace clozekit

#endif  // CLOZEKIT_ERROR_H_
