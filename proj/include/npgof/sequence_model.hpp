#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "npgof/coefficients.hpp"
#include "npgof/rng.hpp"

namespace npgof {

// Observation of the Gaussian sequence model y_j = theta_j + (sigma/sqrt(n)) xi_j
// for 1 <= j <= J, plus the real j = 0 coordinate on the two-sided basis
// (theta_0 = 0 always, densities integrate to 1). Negative indices are implied
// by conjugation.
struct SequenceObservation {
  Basis basis = Basis::generic;
  std::int64_t n = 0;
  double sigma = 1.0;
  int J = 0;
  double y0 = 0.0;
  std::vector<std::complex<double>> y;  // y[j-1] holds index j

  std::complex<double> at(int j) const {
    if (j == 0) return {y0, 0.0};
    const int a = j > 0 ? j : -j;
    if (a > J) throw std::out_of_range("SequenceObservation::at: index beyond J");
    if (j < 0 && basis != Basis::trig_complex) {
      throw std::logic_error("SequenceObservation::at: negative index needs TrigComplex");
    }
    return j > 0 ? y[a - 1] : std::conj(y[a - 1]);
  }
};

namespace detail {

inline void check_observation_inputs(const CoefficientVector& theta,
                                     std::int64_t n, double sigma, int J) {
  if (n < 1) throw std::invalid_argument("sample: n must be >= 1");
  if (!(sigma > 0.0)) throw std::invalid_argument("sample: sigma must be > 0");
  if (J < theta.max_index()) {
    throw std::invalid_argument("sample: J smaller than the support of theta");
  }
}

}  // namespace detail

// Draw order is fixed (y0 first, then j ascending) so an observation is a pure
// function of the stream position.
inline SequenceObservation sample_sequence_observation_stream(
    const CoefficientVector& theta, std::int64_t n, double sigma, int J,
    RngStream& rng) {
  detail::check_observation_inputs(theta, n, sigma, J);
  SequenceObservation obs;
  obs.basis = theta.basis();
  obs.n = n;
  obs.sigma = sigma;
  obs.J = J;
  const double scale = sigma / std::sqrt(static_cast<double>(n));
  const bool complex_noise = theta.basis() == Basis::trig_complex;
  obs.y0 = complex_noise ? scale * rng.normal() : 0.0;
  obs.y.resize(static_cast<std::size_t>(J));
  const double half = 1.0 / std::numbers::sqrt2;
  for (int j = 1; j <= J; ++j) {
    std::complex<double> noise;
    if (complex_noise) {
      // Complex xi_j with independent re/im parts of variance 1/2 each, so
      // E|y_j - theta_j|^2 = sigma^2 / n.
      noise = {half * rng.normal(), half * rng.normal()};
    } else {
      noise = {rng.normal(), 0.0};
    }
    obs.y[static_cast<std::size_t>(j - 1)] = theta.at(j) + scale * noise;
  }
  return obs;
}

inline SequenceObservation sample_sequence_observation(
    const CoefficientVector& theta, std::int64_t n, double sigma, int J,
    std::uint64_t seed) {
  auto rng = RngStream(derive_key(seed, "sample_sequence_observation"), 0);
  return sample_sequence_observation_stream(theta, n, sigma, J, rng);
}

// Noise-suppressed observation (xi = 0): y_j = theta_j exactly.
inline SequenceObservation observation_from_theta(const CoefficientVector& theta,
                                                  std::int64_t n, double sigma,
                                                  int J) {
  detail::check_observation_inputs(theta, n, sigma, J);
  SequenceObservation obs;
  obs.basis = theta.basis();
  obs.n = n;
  obs.sigma = sigma;
  obs.J = J;
  obs.y.resize(static_cast<std::size_t>(J));
  for (int j = 1; j <= J; ++j) obs.y[static_cast<std::size_t>(j - 1)] = theta.at(j);
  return obs;
}

// Density p = 1 + f with f = sum theta_j phi_j. Positivity is certified on a
// 2^14 midpoint grid; a Lipschitz slack widens that grid bound into a true
// lower bound over (0,1) (certified_floor can dip slightly below zero for
// densities that merely touch zero, so sampling gates on the grid minimum).
class DensitySpec {
 public:
  static constexpr int kGridSize = 1 << 14;

  explicit DensitySpec(CoefficientVector theta) : theta_(std::move(theta)) {
    if (theta_.basis() == Basis::generic) {
      throw std::invalid_argument("DensitySpec: basis must be evaluable");
    }
    sup_abs_f_ = theta_.sup_bound();
    double lo = 1.0 + sup_abs_f_;
    for (int i = 0; i < kGridSize; ++i) {
      const double x = (i + 0.5) / kGridSize;
      lo = std::min(lo, 1.0 + theta_.evaluate(x));
    }
    min_density_ = lo;
    certified_floor_ = lo - theta_.lipschitz_bound() / (2.0 * kGridSize);
  }

  const CoefficientVector& theta() const { return theta_; }
  double density(double x) const { return 1.0 + theta_.evaluate(x); }
  double min_density() const { return min_density_; }
  double certified_floor() const { return certified_floor_; }
  double sup_abs_f() const { return sup_abs_f_; }

 private:
  CoefficientVector theta_;
  double min_density_ = 0.0;
  double certified_floor_ = 0.0;
  double sup_abs_f_ = 0.0;
};

// n i.i.d. draws from 1 + f by rejection against the uniform envelope
// 1 + sup|f|. Each point owns its stream, so retries for point i never shift
// the draws of point i+1.
inline std::vector<double> sample_density_iid(const DensitySpec& density,
                                              std::int64_t n,
                                              std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("sample_density_iid: n must be >= 1");
  if (density.min_density() < 0.0) {
    throw std::invalid_argument(
        "sample_density_iid: density has a certified negative minimum");
  }
  const std::uint64_t key = derive_key(seed, "sample_density_iid");
  const double bound = 1.0 + density.sup_abs_f();
  std::vector<double> sample(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    auto rng = RngStream(key, static_cast<std::uint64_t>(i));
    for (;;) {
      const double x = rng.uniform();
      const double u = rng.uniform();
      if (u * bound <= std::max(0.0, density.density(x))) {
        sample[static_cast<std::size_t>(i)] = x;
        break;
      }
    }
  }
  return sample;
}

// Rule n -> theta(n) with a claimed norm envelope c n^{-r} <= ||theta|| <= C n^{-r}.
// The envelope is checked on evaluation grids, never assumed.
struct AlternativeFamily {
  std::string name;
  double r = 0.25;
  double c_low = 0.0;
  double c_high = 0.0;
  std::function<CoefficientVector(std::int64_t)> generator;

  CoefficientVector theta(std::int64_t n) const {
    if (!generator) throw std::logic_error("AlternativeFamily: empty generator");
    return generator(n);
  }

  struct NormCheck {
    bool ok = false;
    double worst_low = 0.0;   // min over grid of ||theta|| / (c n^{-r}), want >= 1
    double worst_high = 0.0;  // max over grid of ||theta|| / (C n^{-r}), want <= 1
  };

  NormCheck check_norm_bounds(const std::vector<std::int64_t>& n_grid) const {
    if (n_grid.empty()) {
      throw std::invalid_argument("check_norm_bounds: empty grid");
    }
    NormCheck out;
    out.worst_low = 1e300;
    out.worst_high = 0.0;
    for (const std::int64_t n : n_grid) {
      const double norm = parseval_norm(theta(n));
      const double rate = std::pow(static_cast<double>(n), -r);
      out.worst_low = std::min(out.worst_low, norm / (c_low * rate));
      out.worst_high = std::max(out.worst_high, norm / (c_high * rate));
    }
    out.ok = out.worst_low >= 1.0 && out.worst_high <= 1.0;
    return out;
  }
};

}  // namespace npgof
