#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <map>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace npgof {

// Orthonormal bases on (0, 1). TrigComplex is two-sided exp(2*pi*i*j*x) with
// the j <= -1 half implied by conjugation (theta_0 = 0 throughout, so stored
// indices are j >= 1 in every basis). The generic basis is index-only: it
// supports sequence-space arithmetic but cannot be evaluated pointwise.
enum class Basis { trig_complex, cosine_half, generic };

class CoefficientVector {
 public:
  using Map = std::map<int, std::complex<double>>;

  explicit CoefficientVector(Basis basis) : basis_(basis) {}

  Basis basis() const { return basis_; }
  const Map& entries() const { return entries_; }

  // Stores theta_j (j >= 1). Real bases reject nonzero imaginary parts; a
  // TrigComplex entry represents the conjugate pair (theta_j, theta_{-j}).
  void set(int j, std::complex<double> value) {
    if (j < 1) {
      throw std::invalid_argument("CoefficientVector::set: index must be >= 1");
    }
    if (basis_ != Basis::trig_complex && value.imag() != 0.0) {
      throw std::invalid_argument(
          "CoefficientVector::set: real basis requires real coefficients");
    }
    if (value == std::complex<double>{0.0, 0.0}) {
      entries_.erase(j);
    } else {
      entries_[j] = value;
    }
  }

  void set(int j, double value) { set(j, std::complex<double>(value, 0.0)); }

  std::complex<double> at(int j) const {
    const auto it = entries_.find(j);
    return it == entries_.end() ? std::complex<double>{0.0, 0.0} : it->second;
  }

  int max_index() const {
    return entries_.empty() ? 0 : entries_.rbegin()->first;
  }

  bool empty() const { return entries_.empty(); }

  // Multiplicity of the stored index: TrigComplex entries stand for both
  // +j and -j.
  double multiplicity() const { return basis_ == Basis::trig_complex ? 2.0 : 1.0; }

  // Parseval: squared L2 norm of sum theta_j phi_j.
  double norm_squared() const {
    const double mult = multiplicity();
    double total = 0.0;
    for (const auto& [j, v] : entries_) total += mult * std::norm(v);
    return total;
  }

  double evaluate(double x) const {
    switch (basis_) {
      case Basis::trig_complex: {
        double total = 0.0;
        for (const auto& [j, v] : entries_) {
          const double arg = 2.0 * std::numbers::pi * j * x;
          total += 2.0 * (v.real() * std::cos(arg) - v.imag() * std::sin(arg));
        }
        return total;
      }
      case Basis::cosine_half: {
        double total = 0.0;
        for (const auto& [j, v] : entries_) {
          total += v.real() * std::numbers::sqrt2 *
                   std::cos(std::numbers::pi * j * x);
        }
        return total;
      }
      case Basis::generic:
        throw std::logic_error(
            "CoefficientVector::evaluate: generic basis has no point values");
    }
    throw std::logic_error("CoefficientVector::evaluate: bad basis");
  }

  // TrigComplex only: sums both halves explicitly in complex arithmetic.
  // The imaginary part is pure roundoff; tests assert it stays < 1e-12.
  std::complex<double> evaluate_two_sided(double x) const {
    if (basis_ != Basis::trig_complex) {
      throw std::logic_error("evaluate_two_sided: requires TrigComplex basis");
    }
    std::complex<double> total{0.0, 0.0};
    for (const auto& [j, v] : entries_) {
      const double arg = 2.0 * std::numbers::pi * j * x;
      const std::complex<double> e{std::cos(arg), std::sin(arg)};
      total += v * e + std::conj(v) * std::conj(e);
    }
    return total;
  }

  CoefficientVector scaled(double t) const {
    CoefficientVector out(basis_);
    for (const auto& [j, v] : entries_) out.set(j, t * v);
    return out;
  }

  CoefficientVector plus(const CoefficientVector& other) const {
    if (other.basis_ != basis_) {
      throw std::invalid_argument("CoefficientVector::plus: basis mismatch");
    }
    CoefficientVector out = *this;
    for (const auto& [j, v] : other.entries_) out.set(j, out.at(j) + v);
    return out;
  }

  // Restriction to stored indices with |j| < cutoff (conjugate pairs share
  // |j|, so this is the two-sided restriction on TrigComplex too).
  CoefficientVector below(std::int64_t cutoff) const {
    CoefficientVector out(basis_);
    for (const auto& [j, v] : entries_) {
      if (j < cutoff) out.set(j, v);
    }
    return out;
  }

  // Complement of below(): stored indices with |j| >= cutoff.
  CoefficientVector from(std::int64_t cutoff) const {
    CoefficientVector out(basis_);
    for (const auto& [j, v] : entries_) {
      if (j >= cutoff) out.set(j, v);
    }
    return out;
  }

  // Certified bound sup|f| <= multiplicity * basis-amplitude * sum|theta_j|.
  double sup_bound() const {
    double total = 0.0;
    for (const auto& [j, v] : entries_) total += std::abs(v);
    switch (basis_) {
      case Basis::trig_complex:
        return 2.0 * total;
      case Basis::cosine_half:
        return std::numbers::sqrt2 * total;
      case Basis::generic:
        throw std::logic_error("sup_bound: generic basis has no point values");
    }
    return 0.0;
  }

  // Bound on sup|f'| from sum j|theta_j|.
  double lipschitz_bound() const {
    double total = 0.0;
    for (const auto& [j, v] : entries_) total += j * std::abs(v);
    switch (basis_) {
      case Basis::trig_complex:
        return 4.0 * std::numbers::pi * total;
      case Basis::cosine_half:
        return std::numbers::sqrt2 * std::numbers::pi * total;
      case Basis::generic:
        throw std::logic_error(
            "lipschitz_bound: generic basis has no point values");
    }
    return 0.0;
  }

 private:
  Basis basis_;
  Map entries_;
};

inline double parseval_norm(const CoefficientVector& theta) {
  return std::sqrt(theta.norm_squared());
}

// sum over |j| < cutoff of |theta_j|^2 (strict, multiplicity-aware).
inline double low_frequency_mass(const CoefficientVector& theta,
                                 std::int64_t cutoff) {
  if (cutoff < 1) {
    throw std::invalid_argument("low_frequency_mass: cutoff must be >= 1");
  }
  return theta.below(cutoff).norm_squared();
}

// sum over |j| > cutoff of |theta_j|^2 (strict, multiplicity-aware).
inline double tail_mass(const CoefficientVector& theta, std::int64_t cutoff) {
  return theta.from(cutoff + 1).norm_squared();
}

// L2 inner product of the two expansions (real by conjugate symmetry).
inline double dot(const CoefficientVector& f, const CoefficientVector& g) {
  if (f.basis() != g.basis()) {
    throw std::invalid_argument("dot: basis mismatch");
  }
  const double mult = f.multiplicity();
  double total = 0.0;
  for (const auto& [j, v] : f.entries()) {
    const auto w = g.at(j);
    total += mult * (v.real() * w.real() + v.imag() * w.imag());
  }
  return total;
}

}  // namespace npgof
