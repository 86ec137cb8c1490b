#pragma once

// Slow, independent reference for the normal cdf and quantile, used only by
// tests. Deliberately shares no code with the library: erf by Taylor series
// for small arguments, erfc by a Lentz-evaluated continued fraction for large
// ones, everything in long double.

#include <cmath>

namespace oracle {

inline constexpr long double kPi = 3.14159265358979323846264338327950288L;

// erf(x) = 2/sqrt(pi) * sum_k (-1)^k x^(2k+1) / (k! (2k+1)); fine for |x| <= 3
// (worst-case cancellation there still leaves ~17 good digits in long double).
inline long double erf_series(long double x) {
  const long double x2 = x * x;
  long double term = x;
  long double sum = x;
  for (int k = 1; k < 200; ++k) {
    term *= -x2 / k;
    const long double add = term / (2 * k + 1);
    sum += add;
    if (std::fabs(add) < 1e-25L * std::fabs(sum)) break;
  }
  return sum * 2.0L / std::sqrt(kPi);
}

// erfc(x) = exp(-x^2)/sqrt(pi) / (x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))),
// modified Lentz; rapid for x >= 3.
inline long double erfc_cf(long double x) {
  long double f = x, C = x, D = 0.0L;
  for (int k = 1; k < 400; ++k) {
    const long double a = 0.5L * k;
    D = x + a * D;
    if (D == 0.0L) D = 1e-300L;
    D = 1.0L / D;
    C = x + a / C;
    if (C == 0.0L) C = 1e-300L;
    const long double delta = C * D;
    f *= delta;
    if (std::fabs(delta - 1.0L) < 1e-22L) break;
  }
  return std::exp(-x * x) / std::sqrt(kPi) / f;
}

inline long double erfc_ref(long double x) {  // x >= 0
  return x < 3.0L ? 1.0L - erf_series(x) : erfc_cf(x);
}

inline long double phi(long double z) {
  const long double t = std::fabs(z) / std::sqrt(2.0L);
  const long double tail = 0.5L * erfc_ref(t);
  return z < 0.0L ? tail : 1.0L - tail;
}

// Quantile by plain bisection on phi; 200 halvings of [-40, 40] land far
// below long-double resolution.
inline long double phi_inv(long double u) {
  long double lo = -40.0L, hi = 40.0L;
  for (int i = 0; i < 200; ++i) {
    const long double mid = 0.5L * (lo + hi);
    (phi(mid) < u ? lo : hi) = mid;
  }
  return 0.5L * (lo + hi);
}

}  // namespace oracle
