/*
 * Copyright 2026 The POTP Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef POTP_ERROR_HPP_
#define POTP_ERROR_HPP_

#include <iostream>
#include <stdexcept>
#include <string>

namespace potp {

/// Base class for every error raised by the library. All of them describe bad
/// input data (as opposed to programmer errors), which the CLI maps to exit 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input files (manifests, CSVs, model JSON).
class FormatError : public Error {
 public:
  using Error::Error;
};

/// Preconditions on numeric inputs (too short, degenerate, out of range).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A subject appears on both sides of a train/validation/test boundary.
class LeakageError : public Error {
 public:
  using Error::Error;
};

/// Warning sink. Defaults to stderr; tests and the CLI may silence it.
inline bool& warnings_enabled() {
  static bool enabled = true;
  return enabled;
}

inline void warn(const std::string& message) {
  if (warnings_enabled()) std::cerr << "warning: " << message << '\n';
}

}  // namespace potp

#endif  // POTP_ERROR_HPP_
