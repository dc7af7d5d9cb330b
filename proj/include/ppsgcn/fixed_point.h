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

#ifndef PPSGCN_FIXED_POINT_H_
#define PPSGCN_FIXED_POINT_H_

#include <gmpxx.h>

#include <vector>

#include "ppsgcn/common.h"

namespace ppsgcn::crypto {

// Maps reals to Z_n by scaling with 2^frac_bits and rounding; negatives wrap
// to the upper half of [0, n). Sums of up to max_terms encodings decode
// correctly as long as every entry passes the magnitude guard.
class FixedPointCodec {
 public:
  FixedPointCodec(const mpz_class& modulus, int frac_bits = 40, int max_terms = 64);

  int frac_bits() const { return frac_bits_; }
  int max_terms() const { return max_terms_; }
  const mpz_class& modulus() const { return modulus_; }
  // Entries must satisfy |x| < 2^(modulus_bits/2 - frac_bits -
  // ceil(log2(max_terms)) - 1).
  double magnitude_limit() const { return limit_; }

  // Throws OverflowError when |x| exceeds the guard or x is not finite.
  mpz_class Encode(double x) const;
  double Decode(const mpz_class& v) const;

  std::vector<mpz_class> EncodeMatrix(const Matrix& m) const;
  Matrix DecodeMatrix(const std::vector<mpz_class>& v, Eigen::Index rows,
                      Eigen::Index cols) const;

 private:
  mpz_class modulus_;
  mpz_class half_;
  int frac_bits_;
  int max_terms_;
  double limit_;
};

}  // namespace ppsgcn::crypto

#endif  // PPSGCN_FIXED_POINT_H_
