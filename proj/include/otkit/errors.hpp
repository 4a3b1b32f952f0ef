// Copyright 2026 The otkit Authors
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

#ifndef OTKIT_ERRORS_HPP_
#define OTKIT_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace otkit {

// All library failures derive from Error so callers (the CLI in particular)
// can catch a single type at the boundary.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Vector/matrix sizes that do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// An index outside its valid range. Messages report 1-based indices.
class IndexError : public Error {
 public:
  using Error::Error;
};

// Invalid user-supplied parameter (resolution, multiplier, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Malformed instance file; the message names the offending line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Breakdown of a numerical kernel (nonpositive weight, NaN, rank loss).
class NumericError : public Error {
 public:
  using Error::Error;
};

// A configured memory or size cap was exceeded.
class ResourceError : public Error {
 public:
  using Error::Error;
};

}  // namespace otkit

#endif  // OTKIT_ERRORS_HPP_
