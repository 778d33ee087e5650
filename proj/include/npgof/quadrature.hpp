#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

namespace npgof {

namespace detail {

// 8-point Gauss-Legendre abscissae/weights on [-1, 1].
inline constexpr std::array<double, 4> kGl8Nodes = {
    0.1834346424956498, 0.5255324099163290, 0.7966664774136267,
    0.9602898564975363};
inline constexpr std::array<double, 4> kGl8Weights = {
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745,
    0.1012285362903763};

}  // namespace detail

// Composite Gauss-Legendre: `panels` equal panels, 8 nodes each.
template <typename F>
double integrate_gl(F&& f, double a, double b, int panels = 1 << 12) {
  if (!(panels >= 1)) {
    throw std::invalid_argument("integrate_gl: panels must be >= 1");
  }
  const double width = (b - a) / panels;
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * width;
    const double half = 0.5 * width;
    double panel = 0.0;
    for (int k = 0; k < 4; ++k) {
      const double dx = half * detail::kGl8Nodes[k];
      panel += detail::kGl8Weights[k] * (f(mid + dx) + f(mid - dx));
    }
    total += panel * half;
  }
  return total;
}

namespace detail {

template <typename F>
double adaptive_simpson_step(F& f, double a, double m, double b, double fa,
                             double fm, double fb, double whole, double tol,
                             int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson_step(f, a, lm, m, fa, flm, fm, left, 0.5 * tol,
                               depth - 1) +
         adaptive_simpson_step(f, m, rm, b, fm, frm, fb, right, 0.5 * tol,
                               depth - 1);
}

}  // namespace detail

// Adaptive Simpson; an algorithmically independent cross-check for the
// Gauss-Legendre path.
template <typename F>
double integrate_adaptive(F&& f, double a, double b, double tol = 1e-12,
                          int max_depth = 40) {
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fm = f(m);
  const double fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::adaptive_simpson_step(f, a, m, b, fa, fm, fb, whole, tol,
                                       max_depth);
}

}  // namespace npgof
