#pragma once
// Cramer-von Mises machinery: the exact closed-form statistic on samples,
// the spectral form of the population functional, the limit-law sampler
// built from the bridge expansion, Monte Carlo calibration of critical
// values with a CSV cache, and the low-frequency weighted-mass check.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "npgof/coefficients.hpp"
#include "npgof/rng.hpp"

namespace npgof {

struct CvmResult {
  double n_t_squared = 0.0;
  std::int64_t n = 0;
};

// Exact n T^2 for the empirical cdf against the uniform null: the integral
// is piecewise quadratic between order statistics and collapses to
// 1/(12n) + sum (x_(i) - (2i-1)/(2n))^2, minimized by the equispaced grid.
inline CvmResult cvm_statistic(std::vector<double> sample) {
  if (sample.empty()) throw std::invalid_argument("cvm_statistic: empty sample");
  for (const double x : sample) {
    if (!(x > 0.0 && x < 1.0)) {
      throw std::invalid_argument("cvm_statistic: sample values must lie in (0,1)");
    }
  }
  std::sort(sample.begin(), sample.end());
  const std::int64_t n = static_cast<std::int64_t>(sample.size());
  double total = 1.0 / (12.0 * static_cast<double>(n));
  for (std::int64_t i = 1; i <= n; ++i) {
    const double target = (2.0 * static_cast<double>(i) - 1.0) /
                          (2.0 * static_cast<double>(n));
    const double gap = sample[static_cast<std::size_t>(i - 1)] - target;
    total += gap * gap;
  }
  return CvmResult{total, n};
}

namespace detail {

inline void require_cosine(const CoefficientVector& theta, const char* who) {
  if (theta.basis() != Basis::cosine_half) {
    throw std::invalid_argument(std::string(who) + ": needs the half-range cosine basis");
  }
}

}  // namespace detail

// Population counterpart: n T^2(F - F_0) = n sum theta_j^2 / (pi j)^2.
inline double cvm_spectral(const CoefficientVector& theta, std::int64_t n) {
  detail::require_cosine(theta, "cvm_spectral");
  double sum = 0.0;
  for (const auto& [j, v] : theta.entries()) {
    sum += std::norm(v) / (static_cast<double>(j) * static_cast<double>(j));
  }
  return static_cast<double>(n) * sum /
         (std::numbers::pi * std::numbers::pi);
}

// One draw of the limit variable sum_j (xi_j + sqrt(n) theta_j)^2/(pi j)^2,
// truncated at J with the deterministic tail mean added back so the null
// mean is exactly 1/6 at every J.
inline double bridge_limit_sample_stream(const CoefficientVector& theta,
                                         std::int64_t n, int J,
                                         RngStream& rng) {
  detail::require_cosine(theta, "bridge_limit_sample");
  if (J < 1) throw std::invalid_argument("bridge_limit_sample: J must be >= 1");
  if (theta.max_index() > J) {
    throw std::invalid_argument("bridge_limit_sample: support exceeds J");
  }
  const double root_n = std::sqrt(static_cast<double>(n));
  const double pi2 = std::numbers::pi * std::numbers::pi;
  double total = 0.0;
  double prefix_weight = 0.0;
  for (int j = 1; j <= J; ++j) {
    const double weight = 1.0 / (pi2 * static_cast<double>(j) * j);
    const double shifted = rng.normal() + root_n * theta.at(j).real();
    total += weight * shifted * shifted;
    prefix_weight += weight;
  }
  return total + (1.0 / 6.0 - prefix_weight);
}

inline double bridge_limit_sample(const CoefficientVector& theta,
                                  std::int64_t n, int J, std::uint64_t seed) {
  auto rng = RngStream(derive_key(seed, "bridge_limit_sample"), 0);
  return bridge_limit_sample_stream(theta, n, J, rng);
}

struct CvmCriticalValue {
  double alpha = 0.0;
  int J = 0;
  std::int64_t draws = 0;
  std::uint64_t seed = 0;
  double x_alpha = 0.0;
};

// Null Monte Carlo calibration of the rejection threshold for n T^2.
// Draws are indexed by replication, so the result is independent of the
// worker count.
inline CvmCriticalValue calibrate_cvm_critical(double alpha, int J,
                                               std::int64_t draws,
                                               std::uint64_t seed,
                                               int workers = 1) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("calibrate_cvm_critical: alpha must be in (0,1)");
  }
  if (J < 1) throw std::invalid_argument("calibrate_cvm_critical: J must be >= 1");
  if (draws < 100) {
    throw std::invalid_argument("calibrate_cvm_critical: need at least 100 draws");
  }
  if (workers < 1) {
    throw std::invalid_argument("calibrate_cvm_critical: workers must be >= 1");
  }
  const CoefficientVector null_theta(Basis::cosine_half);
  const std::uint64_t key = derive_key(seed, "calibrate_cvm_critical");
  std::vector<double> values(static_cast<std::size_t>(draws));
  const auto fill = [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t rep = lo; rep < hi; ++rep) {
      auto rng = replication_stream(key, static_cast<std::uint64_t>(rep));
      values[static_cast<std::size_t>(rep)] =
          bridge_limit_sample_stream(null_theta, 1, J, rng);
    }
  };
  if (workers == 1) {
    fill(0, draws);
  } else {
    std::vector<std::thread> pool;
    const std::int64_t chunk = (draws + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const std::int64_t lo = w * chunk;
      const std::int64_t hi = std::min<std::int64_t>(draws, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(fill, lo, hi);
    }
    for (auto& t : pool) t.join();
  }
  std::sort(values.begin(), values.end());
  const auto rank = static_cast<std::int64_t>(
      std::ceil((1.0 - alpha) * static_cast<double>(draws)));
  const std::int64_t index = std::clamp<std::int64_t>(rank - 1, 0, draws - 1);
  return CvmCriticalValue{alpha, J, draws, seed,
                          values[static_cast<std::size_t>(index)]};
}

struct CvmDecision {
  bool reject = false;
  double n_t_squared = 0.0;
  double threshold = 0.0;
};

inline CvmDecision cvm_decide(const CvmResult& result,
                              const CvmCriticalValue& critical) {
  return CvmDecision{result.n_t_squared > critical.x_alpha,
                     result.n_t_squared, critical.x_alpha};
}

inline CvmDecision cvm_decide(const std::vector<double>& sample,
                              const CvmCriticalValue& critical) {
  return cvm_decide(cvm_statistic(sample), critical);
}

inline constexpr const char* kCvmCacheHeader = "alpha,J,draws,seed,x_alpha";

inline void write_cvm_cache(std::ostream& out,
                            const std::vector<CvmCriticalValue>& records) {
  out << kCvmCacheHeader << "\n";
  for (const auto& rec : records) {
    std::ostringstream line;
    line.precision(17);
    line << rec.alpha << ',' << rec.J << ',' << rec.draws << ',' << rec.seed
         << ',' << rec.x_alpha;
    out << line.str() << "\n";
  }
}

inline std::vector<CvmCriticalValue> read_cvm_cache(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind(kCvmCacheHeader, 0) != 0) {
    throw std::invalid_argument("read_cvm_cache: missing header");
  }
  std::vector<CvmCriticalValue> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    CvmCriticalValue rec;
    char c1 = 0, c2 = 0, c3 = 0, c4 = 0;
    if (!(fields >> rec.alpha >> c1 >> rec.J >> c2 >> rec.draws >> c3 >>
          rec.seed >> c4 >> rec.x_alpha) ||
        c1 != ',' || c2 != ',' || c3 != ',' || c4 != ',') {
      throw std::invalid_argument("read_cvm_cache: malformed row: " + line);
    }
    records.push_back(rec);
  }
  return records;
}

inline std::optional<CvmCriticalValue> find_cvm_critical(
    const std::vector<CvmCriticalValue>& records, double alpha) {
  for (const auto& rec : records) {
    if (std::abs(rec.alpha - alpha) <= 1e-12) return rec;
  }
  return std::nullopt;
}

struct G1Point {
  std::int64_t n = 0;
  std::int64_t k_n = 0;
  double value = 0.0;
};

struct G1Report {
  std::vector<G1Point> points;
  bool vanishing_trend = false;
};

inline std::int64_t cvm_k_n(std::int64_t n, double r) {
  if (!(r > 0.0 && r < 0.5)) {
    throw std::invalid_argument("cvm_k_n: r must be in (0, 1/2)");
  }
  return static_cast<std::int64_t>(
      std::pow(static_cast<double>(n), (1.0 - 2.0 * r) / 2.0));
}

// Low-frequency weighted mass n sum_{j < c3 k_n} theta_j^2 j^{-2} on a grid
// of sample sizes; flags whether the values trend to zero.
template <typename ThetaOfN>
G1Report g1_check(ThetaOfN&& theta_of_n, double r, double c3,
                  const std::vector<std::int64_t>& n_grid) {
  if (n_grid.empty()) throw std::invalid_argument("g1_check: empty grid");
  if (!(c3 > 0.0)) throw std::invalid_argument("g1_check: c3 must be > 0");
  G1Report report;
  for (const std::int64_t n : n_grid) {
    const std::int64_t k_n = cvm_k_n(n, r);
    const double cutoff = c3 * static_cast<double>(k_n);
    const CoefficientVector theta = theta_of_n(n);
    detail::require_cosine(theta, "g1_check");
    double sum = 0.0;
    for (const auto& [j, v] : theta.entries()) {
      if (static_cast<double>(j) < cutoff) {
        sum += std::norm(v) / (static_cast<double>(j) * j);
      }
    }
    report.points.push_back(G1Point{n, k_n, static_cast<double>(n) * sum});
  }
  const double first = report.points.front().value;
  const double last = report.points.back().value;
  report.vanishing_trend = last < 1e-8 || last <= 0.5 * first;
  return report;
}

}  // namespace npgof
