// Copyright 2026 The corrupt_forge Authors.
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

#ifndef CORRUPT_FORGE_ERRORS_H_
#define CORRUPT_FORGE_ERRORS_H_

#include <stdexcept>
#include <string>

namespace corrupt_forge {

// All library failures derive from Error so callers can catch one type and
// still dispatch on the concrete category when they care.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class CalibrationError : public Error {
 public:
  using Error::Error;
};

class DataError : public Error {
 public:
  using Error::Error;
};

class UsageError : public Error {
 public:
  using Error::Error;
};

// Raised when a robustness ratio has a zero denominator or the metric grid
// is incomplete.
class MetricError : public Error {
 public:
  using Error::Error;
};

}  // namespace corrupt_forge

#endif  // CORRUPT_FORGE_ERRORS_H_
