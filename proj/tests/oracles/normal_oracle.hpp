// Copyright 2026 The pssf Authors
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

// Test-only high-precision standard normal CDF and quantile, independent of
// the library implementation: long-double Taylor series for small arguments
// and a Lentz continued fraction for the tails, with the quantile recovered
// by bisection.

#ifndef PSSF_TESTS_ORACLES_NORMAL_ORACLE_HPP_
#define PSSF_TESTS_ORACLES_NORMAL_ORACLE_HPP_

#include <cmath>

namespace pssf_oracle {

// erf(z) for 0 <= z < 2 by Taylor series.
inline long double erf_series(long double z) {
  const long double two_over_sqrt_pi = 1.1283791670955125738961589031L;
  long double term = z;
  long double sum = z;
  const long double z2 = z * z;
  for (int n = 1; n < 200; ++n) {
    term *= -z2 / n;
    const long double contrib = term / (2 * n + 1);
    sum += contrib;
    if (std::abs(contrib) < 1e-25L * std::abs(sum)) break;
  }
  return two_over_sqrt_pi * sum;
}

// erfc(z) for z >= 2 by the Lentz continued fraction.
inline long double erfc_cf(long double z) {
  const long double one_over_sqrt_pi = 0.5641895835477562869480794516L;
  const long double z2 = z * z;
  // erfc(z) = exp(-z^2)/(sqrt(pi)) * 1/(z + 1/2/(z + 1/(z + 3/2/(z + ...))))
  long double f = z;
  long double c = f;
  long double d = 0.0L;
  for (int n = 1; n < 400; ++n) {
    const long double a = n / 2.0L;
    d = z + a * d;
    if (d == 0.0L) d = 1e-30L;
    c = z + a / c;
    if (c == 0.0L) c = 1e-30L;
    d = 1.0L / d;
    const long double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0L) < 1e-25L) break;
  }
  return std::exp(-z2) * one_over_sqrt_pi / f;
}

inline long double erfc_oracle(long double z) {
  if (z < 0.0L) return 2.0L - erfc_oracle(-z);
  if (z < 2.0L) return 1.0L - erf_series(z);
  return erfc_cf(z);
}

/// Standard normal CDF to ~1e-22 relative accuracy.
inline long double normal_cdf(long double x) {
  const long double inv_sqrt2 = 0.7071067811865475244008443621L;
  return 0.5L * erfc_oracle(-x * inv_sqrt2);
}

/// Quantile by bisection on the oracle CDF.
inline double normal_quantile(double p) {
  long double lo = -40.0L, hi = 40.0L;
  for (int i = 0; i < 200; ++i) {
    const long double mid = 0.5L * (lo + hi);
    if (normal_cdf(mid) < static_cast<long double>(p)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return static_cast<double>(0.5L * (lo + hi));
}

}  // namespace pssf_oracle

#endif  // PSSF_TESTS_ORACLES_NORMAL_ORACLE_HPP_
