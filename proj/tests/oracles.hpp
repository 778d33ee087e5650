#pragma once

// Reference implementations used only by the test suite. Each one is written
// independently of the library code path it checks, so agreement is evidence
// rather than tautology. Values frozen into test files were produced by these
// oracles (or by a third-party mirror of the same published algorithm).

#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

// Composite Simpson in long double; panels must be even.
template <typename F>
long double simpson(F f, long double a, long double b, int panels) {
  const long double h = (b - a) / panels;
  long double total = f(a) + f(b);
  for (int i = 1; i < panels; ++i) {
    total += (i % 2 == 1 ? 4.0L : 2.0L) * f(a + i * h);
  }
  return total * h / 3.0L;
}

// Standard normal CDF by integrating the density from 0 (symmetry around 0
// keeps the integrand well scaled; avoids erf/erfc entirely).
inline long double norm_cdf(long double x) {
  const long double inv_sqrt_2pi = 0.3989422804014326779399460599343819L;
  const auto pdf = [&](long double t) {
    return inv_sqrt_2pi * std::exp(-0.5L * t * t);
  };
  const long double ax = std::fabs(x);
  const int panels = 1 << 16;
  const long double half = simpson(pdf, 0.0L, ax, panels);
  return x >= 0 ? 0.5L + half : 0.5L - half;
}

}  // namespace oracle
