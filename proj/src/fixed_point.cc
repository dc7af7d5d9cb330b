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

#include "ppsgcn/fixed_point.h"

#include <cmath>

#include "ppsgcn/error.h"

namespace ppsgcn::crypto {

FixedPointCodec::FixedPointCodec(const mpz_class& modulus, int frac_bits,
                                 int max_terms)
    : modulus_(modulus), half_(modulus / 2), frac_bits_(frac_bits),
      max_terms_(max_terms) {
  if (frac_bits < 0 || max_terms < 1)
    throw ValidationError("codec: frac_bits >= 0 and max_terms >= 1 required");
  const int modulus_bits = static_cast<int>(mpz_sizeinbase(modulus.get_mpz_t(), 2));
  const int fan_in_bits = static_cast<int>(std::ceil(std::log2(max_terms)));
  const int exponent = modulus_bits / 2 - frac_bits - fan_in_bits - 1;
  if (exponent < 1) throw ValidationError("codec: modulus too small for frac_bits");
  limit_ = std::ldexp(1.0, exponent);
}

mpz_class FixedPointCodec::Encode(double x) const {
  if (!std::isfinite(x) || std::abs(x) >= limit_)
    throw OverflowError("fixed-point: |" + std::to_string(x) +
                        "| exceeds encodable magnitude");
  // Scaling by a power of two and rounding to an integer are exact in
  // binary floating point, and mpz_set_d is exact for integral doubles.
  mpz_class v;
  mpz_set_d(v.get_mpz_t(), std::nearbyint(std::ldexp(x, frac_bits_)));
  if (v < 0) v += modulus_;
  return v;
}

double FixedPointCodec::Decode(const mpz_class& value) const {
  mpz_class v = value % modulus_;
  if (v < 0) v += modulus_;
  if (v > half_) v -= modulus_;
  // Split into integer and fractional parts so each converts exactly.
  mpz_class whole, frac;
  mpz_fdiv_q_2exp(whole.get_mpz_t(), v.get_mpz_t(), frac_bits_);
  mpz_fdiv_r_2exp(frac.get_mpz_t(), v.get_mpz_t(), frac_bits_);
  return whole.get_d() + std::ldexp(frac.get_d(), -frac_bits_);
}

std::vector<mpz_class> FixedPointCodec::EncodeMatrix(const Matrix& m) const {
  std::vector<mpz_class> out;
  out.reserve(static_cast<std::size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) out.push_back(Encode(m(r, c)));
  return out;
}

Matrix FixedPointCodec::DecodeMatrix(const std::vector<mpz_class>& v,
                                     Eigen::Index rows, Eigen::Index cols) const {
  if (static_cast<Eigen::Index>(v.size()) != rows * cols)
    throw InvariantError("decode: size mismatch");
  Matrix out(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) out(r, c) = Decode(v[k++]);
  return out;
}

}  // namespace ppsgcn::crypto
