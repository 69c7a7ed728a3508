// Copyright 2026 The revrec Authors.
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

#ifndef REVREC_ERRORS_HPP_
#define REVREC_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace revrec {

// Two families of failures. Fatal errors mean the inputs or configuration
// are wrong and the run cannot continue. Recoverable errors are data
// conditions (a cold user, an empty candidate set) that callers route
// around; the CLI reports them with exit status 1.
class FatalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public FatalError {
 public:
  using FatalError::FatalError;
};

class FormatError : public FatalError {
 public:
  using FatalError::FatalError;
};

class ConfigError : public FatalError {
 public:
  using FatalError::FatalError;
};

class ArgumentError : public FatalError {
 public:
  using FatalError::FatalError;
};

// An unsmoothed (zero-mass) distribution reached a metric that needs
// strictly positive support.
class NumericError : public FatalError {
 public:
  using FatalError::FatalError;
};

class RecoverableError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A document had no in-vocabulary tokens, so no topic mixture exists.
class UndefinedProfile : public RecoverableError {
 public:
  using RecoverableError::RecoverableError;
};

class ColdUser : public RecoverableError {
 public:
  using RecoverableError::RecoverableError;
};

class ColdMovie : public RecoverableError {
 public:
  using RecoverableError::RecoverableError;
};

class UnrecommendableMovie : public RecoverableError {
 public:
  using RecoverableError::RecoverableError;
};

class NothingToRecommend : public RecoverableError {
 public:
  using RecoverableError::RecoverableError;
};

}  // namespace revrec

#endif  // REVREC_ERRORS_HPP_
