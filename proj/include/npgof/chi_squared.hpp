#pragma once
// Chi-squared tests with a growing number of equal-width cells: the
// empirical statistic, the population functional via exact cell integrals,
// the aliasing identity linking it to Fourier coefficients, the
// high-frequency tail bound, and the normal-limit decision rule.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "npgof/coefficients.hpp"
#include "npgof/normal.hpp"

namespace npgof {

struct CellHistogram {
  int m = 0;
  std::int64_t n = 0;
  std::vector<std::int64_t> counts;

  // Equal-width cells [l/m, (l+1)/m); the right endpoint 1.0 folds into the
  // last cell. Values outside [0, 1] are rejected.
  static CellHistogram from_sample(const std::vector<double>& sample, int m) {
    if (m < 2) throw std::invalid_argument("CellHistogram: m must be >= 2");
    if (sample.empty()) throw std::invalid_argument("CellHistogram: empty sample");
    CellHistogram hist;
    hist.m = m;
    hist.n = static_cast<std::int64_t>(sample.size());
    hist.counts.assign(static_cast<std::size_t>(m), 0);
    for (const double x : sample) {
      if (!(x >= 0.0 && x <= 1.0)) {
        throw std::invalid_argument("CellHistogram: sample value outside [0,1]");
      }
      int cell = static_cast<int>(x * m);
      if (cell >= m) cell = m - 1;
      ++hist.counts[static_cast<std::size_t>(cell)];
    }
    return hist;
  }

  double p_hat(int cell) const {
    return static_cast<double>(counts.at(static_cast<std::size_t>(cell))) /
           static_cast<double>(n);
  }
};

namespace detail {

// Shared formula path: T = n * m * sum of squared cell-mass deviations.
inline double chi2_from_deviations(const std::vector<double>& devs,
                                   std::int64_t n, int m) {
  double sum = 0.0;
  for (const double d : devs) sum += d * d;
  return static_cast<double>(n) * static_cast<double>(m) * sum;
}

inline std::complex<double> trig_coefficient(const CoefficientVector& theta,
                                             int j) {
  return j >= 1 ? theta.at(j) : std::conj(theta.at(-j));
}

inline void require_trig(const CoefficientVector& theta, const char* who) {
  if (theta.basis() != Basis::trig_complex) {
    throw std::invalid_argument(std::string(who) + ": needs the complex exponential basis");
  }
}

}  // namespace detail

inline double chi2_statistic(const CellHistogram& hist) {
  std::vector<double> devs(static_cast<std::size_t>(hist.m));
  const double uniform_mass = 1.0 / hist.m;
  for (int l = 0; l < hist.m; ++l) {
    devs[static_cast<std::size_t>(l)] = hist.p_hat(l) - uniform_mass;
  }
  return detail::chi2_from_deviations(devs, hist.n, hist.m);
}

inline double chi2_statistic(const std::vector<double>& sample, int m) {
  return chi2_statistic(CellHistogram::from_sample(sample, m));
}

// Exact integral of f over [a, b] for f with complex exponential
// coefficients: each frequency contributes (e^{2pi ijb} - e^{2pi ija})/(2pi ij),
// and the negative frequencies double the real part.
inline double cell_integral(const CoefficientVector& theta, double a, double b) {
  detail::require_trig(theta, "cell_integral");
  constexpr double two_pi = 2.0 * std::numbers::pi;
  std::complex<double> total{0.0, 0.0};
  for (const auto& [j, v] : theta.entries()) {
    const std::complex<double> phase =
        std::polar(1.0, two_pi * j * b) - std::polar(1.0, two_pi * j * a);
    total += v * phase / std::complex<double>{0.0, two_pi * j};
  }
  return 2.0 * total.real();
}

// Population statistic T_n(F) for density 1 + f: cell masses deviate from
// 1/m by exactly the cell integrals of f.
inline double chi2_functional(const CoefficientVector& theta, int m,
                              std::int64_t n) {
  detail::require_trig(theta, "chi2_functional");
  if (m < 2) throw std::invalid_argument("chi2_functional: m must be >= 2");
  std::vector<double> devs(static_cast<std::size_t>(m));
  for (int l = 0; l < m; ++l) {
    devs[static_cast<std::size_t>(l)] =
        cell_integral(theta, static_cast<double>(l) / m,
                      static_cast<double>(l + 1) / m);
  }
  return detail::chi2_from_deviations(devs, n, m);
}

// Aliasing identity: the same T_n(F) as a double sum over frequency pairs
// (j, j - km) with weight (2 - 2cos(2pi j/m)) / (4pi^2 j (j - km)). Terms
// with a zero index carry a zero coefficient and are skipped (0/0 = 0).
inline double fourier_identity(const CoefficientVector& theta, int m,
                               std::int64_t n) {
  detail::require_trig(theta, "fourier_identity");
  if (m < 2) throw std::invalid_argument("fourier_identity: m must be >= 2");
  const int top = theta.max_index();
  if (top == 0) return 0.0;
  constexpr double four_pi2 = 4.0 * std::numbers::pi * std::numbers::pi;
  std::complex<double> sum{0.0, 0.0};
  for (int j = -top; j <= top; ++j) {
    if (j == 0) continue;
    const std::complex<double> tj = detail::trig_coefficient(theta, j);
    if (tj == std::complex<double>{0.0, 0.0}) continue;
    const double weight =
        2.0 - 2.0 * std::cos(2.0 * std::numbers::pi * j / m);
    // Partner index j - km must land in the support range and be nonzero.
    for (int k = (j - top) / m - 1; k <= (j + top) / m + 1; ++k) {
      const std::int64_t partner = static_cast<std::int64_t>(j) -
                                   static_cast<std::int64_t>(k) * m;
      if (partner == 0 || partner < -top || partner > top) continue;
      const std::complex<double> tp =
          detail::trig_coefficient(theta, static_cast<int>(partner));
      if (tp == std::complex<double>{0.0, 0.0}) continue;
      sum += tj * std::conj(tp) * weight /
             (four_pi2 * static_cast<double>(j) * static_cast<double>(partner));
    }
  }
  // The inner double sum equals T / (n m^2); the imaginary part cancels by
  // conjugate symmetry of real signals.
  return static_cast<double>(n) * static_cast<double>(m) *
         static_cast<double>(m) * sum.real();
}

struct TailBoundReport {
  int i_n = 0;
  double lhs = 0.0;       // n^{-1} m^{-2} T_n of the tail signal (n-free)
  double rhs_unit = 0.0;  // m^{-1} i_n^{-1} * tail squared mass (constant 1)
  double ratio = 0.0;     // lhs / rhs_unit, 0 when both vanish
  bool holds = false;
};

// Tail bound for signals supported above i_n = [d m]: the normalized
// functional is controlled by m^{-1} i_n^{-1} times the tail mass. The
// bounding constant is existential; `holds` uses the measured envelope 50,
// far above the ratios seen on decaying tails.
inline TailBoundReport chi2_tail_bound_check(const CoefficientVector& theta,
                                             int m, double d) {
  detail::require_trig(theta, "chi2_tail_bound_check");
  if (m < 2) throw std::invalid_argument("chi2_tail_bound_check: m must be >= 2");
  if (!(d > 1.0)) throw std::invalid_argument("chi2_tail_bound_check: d must be > 1");
  TailBoundReport report;
  report.i_n = static_cast<int>(d * m);
  const CoefficientVector tail = theta.from(report.i_n + 1);
  report.lhs = chi2_functional(tail, m, 1) / (static_cast<double>(m) * m);
  report.rhs_unit = tail_mass(theta, report.i_n) /
                    (static_cast<double>(m) * report.i_n);
  report.ratio = report.rhs_unit > 0.0 ? report.lhs / report.rhs_unit : 0.0;
  report.holds = report.lhs <= 50.0 * report.rhs_unit ||
                 (report.lhs == 0.0 && report.rhs_unit == 0.0);
  return report;
}

struct Chi2Decision {
  bool reject = false;
  double score = 0.0;
  double threshold = 0.0;
  bool regime_warning = false;  // the normal limit needs many cells
};

inline Chi2Decision chi2_decide(const CellHistogram& hist, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("chi2_decide: alpha must be in (0,1)");
  }
  Chi2Decision decision;
  decision.threshold = normal_critical_value(alpha);
  const double t = chi2_statistic(hist);
  decision.score = (t - hist.m + 1) / std::sqrt(2.0 * hist.m);
  decision.reject = decision.score > decision.threshold;
  decision.regime_warning = hist.m < 8;
  return decision;
}

inline Chi2Decision chi2_decide(const std::vector<double>& sample, int m,
                                double alpha) {
  return chi2_decide(CellHistogram::from_sample(sample, m), alpha);
}

// Predicted type II error of the level-alpha test against density 1 + f.
inline double chi2_power_formula(const CoefficientVector& theta, int m,
                                 std::int64_t n, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("chi2_power_formula: alpha must be in (0,1)");
  }
  const double noncentrality =
      chi2_functional(theta, m, n) / std::sqrt(2.0 * m);
  return std_normal_cdf(normal_critical_value(alpha) - noncentrality);
}

// Default cell-count rule m = [c n^{2-4r}].
inline int default_cell_count(std::int64_t n, double r, double c = 1.0) {
  if (!(r > 0.0 && r < 0.5)) {
    throw std::invalid_argument("default_cell_count: r must be in (0, 1/2)");
  }
  if (!(c > 0.0)) throw std::invalid_argument("default_cell_count: c must be > 0");
  const int m = static_cast<int>(c * std::pow(static_cast<double>(n), 2.0 - 4.0 * r));
  return m < 2 ? 2 : m;
}

}  // namespace npgof
