#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace npgof {

// Standard normal CDF via erfc; absolute error well below 1e-10, and the
// reflection Phi(-x) = 1 - Phi(x) holds to representation accuracy.
inline double std_normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

inline double std_normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

// Quantile by bisection on std_normal_cdf. 120 halvings of [-40, 40] land
// far below double spacing around any representable quantile.
inline double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("std_normal_quantile: p must be in (0,1)");
  }
  double lo = -40.0;
  double hi = 40.0;
  for (int iter = 0; iter < 120; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (std_normal_cdf(mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Upper critical value x_alpha: P(N(0,1) > x_alpha) = alpha.
inline double normal_critical_value(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("normal_critical_value: alpha must be in (0,1)");
  }
  return std_normal_quantile(1.0 - alpha);
}

}  // namespace npgof
