// Copyright 2026 The ppsgcn Authors.
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

#ifndef PPSGCN_ERROR_H_
#define PPSGCN_ERROR_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ppsgcn {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file line.
class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line,
             const std::string& detail)
      : Error(source + ":" + std::to_string(line) + ": " + detail),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class InfeasibleError : public Error {
 public:
  using Error::Error;
};

class ProtocolError : public Error {
 public:
  using Error::Error;
};

// Socket setup or I/O failure in the TCP backend.
class TransportError : public Error {
 public:
  using Error::Error;
};

// Fixed-point magnitude too large for the plaintext space.
class OverflowError : public Error {
 public:
  using Error::Error;
};

class KeygenError : public Error {
 public:
  using Error::Error;
};

// A round barrier could not complete (missing or dead sender).
class BarrierTimeout : public Error {
 public:
  using Error::Error;
};

class NumericError : public Error {
 public:
  using Error::Error;
};

// Training loss became non-finite.
class DivergenceError : public NumericError {
 public:
  DivergenceError(int iteration, const std::string& detail)
      : NumericError("diverged at iteration " + std::to_string(iteration) +
                     ": " + detail),
        iteration_(iteration) {}
  int iteration() const { return iteration_; }

 private:
  int iteration_;
};

class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

// Violated internal invariant; indicates a bug rather than bad input.
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace ppsgcn

#endif  // PPSGCN_ERROR_H_
