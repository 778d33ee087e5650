#pragma once
// Named alternative-family presets. Every preset keeps ||theta(n)|| equal
// to n^{-r} exactly, so the n^{2r}-normalized mass criteria read off the
// low/high-frequency split directly.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "npgof/classify.hpp"
#include "npgof/coefficients.hpp"
#include "npgof/sequence_model.hpp"

namespace npgof {

namespace detail {

// Coefficient value giving a single-index vector unit norm in this basis.
inline double unit_value(Basis basis) {
  return 1.0 / std::sqrt(CoefficientVector(basis).multiplicity());
}

inline void require_rate(double r, const char* who) {
  if (!(r > 0.0 && r < 0.5)) {
    throw std::invalid_argument(std::string(who) + ": r must be in (0, 1/2)");
  }
}

inline void require_amplitude(double amplitude, const char* who) {
  if (!(amplitude > 0.0)) {
    throw std::invalid_argument(std::string(who) + ": amplitude must be > 0");
  }
}

}  // namespace detail

// All mass at j = 1: the family every test family sees.
inline AlternativeFamily family_all_low(double r, Basis basis,
                                        double amplitude = 1.0) {
  detail::require_rate(r, "family_all_low");
  detail::require_amplitude(amplitude, "family_all_low");
  AlternativeFamily fam;
  fam.name = "all-low";
  fam.r = r;
  fam.c_low = 0.999 * amplitude;
  fam.c_high = 1.001 * amplitude;
  fam.generator = [r, basis, amplitude](std::int64_t n) {
    CoefficientVector v(basis);
    v.set(1, amplitude * detail::unit_value(basis) *
                 std::pow(static_cast<double>(n), -r));
    return v;
  };
  return fam;
}

// All mass escaping beyond the test's frequency scale: j = ceil(factor k_n).
inline AlternativeFamily family_escaping(double r, Basis basis,
                                         const KnRule& rule,
                                         double factor = 10.0,
                                         double amplitude = 1.0) {
  detail::require_rate(r, "family_escaping");
  detail::require_amplitude(amplitude, "family_escaping");
  if (!(factor > 0.0)) {
    throw std::invalid_argument("family_escaping: factor must be > 0");
  }
  AlternativeFamily fam;
  fam.name = "escaping";
  fam.r = r;
  fam.c_low = 0.999 * amplitude;
  fam.c_high = 1.001 * amplitude;
  fam.generator = [r, basis, rule, factor, amplitude](std::int64_t n) {
    const auto j = static_cast<int>(
        std::ceil(factor * static_cast<double>(rule(n))));
    CoefficientVector v(basis);
    v.set(std::max(1, j), amplitude * detail::unit_value(basis) *
                              std::pow(static_cast<double>(n), -r));
    return v;
  };
  return fam;
}

// Mass at a fixed fraction of k_n: inside the detectable window but moving.
inline AlternativeFamily family_boundary(double r, Basis basis,
                                         const KnRule& rule,
                                         double fraction = 0.5,
                                         double amplitude = 1.0) {
  detail::require_rate(r, "family_boundary");
  detail::require_amplitude(amplitude, "family_boundary");
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw std::invalid_argument("family_boundary: fraction must be in (0, 1]");
  }
  AlternativeFamily fam;
  fam.name = "boundary";
  fam.r = r;
  fam.c_low = 0.999 * amplitude;
  fam.c_high = 1.001 * amplitude;
  fam.generator = [r, basis, rule, fraction, amplitude](std::int64_t n) {
    const auto j = static_cast<int>(
        std::floor(fraction * static_cast<double>(rule(n))));
    CoefficientVector v(basis);
    v.set(std::max(1, j), amplitude * detail::unit_value(basis) *
                              std::pow(static_cast<double>(n), -r));
    return v;
  };
  return fam;
}

// Squared mass split between j = 1 and an escaping index.
inline AlternativeFamily family_mixed(double r, Basis basis, const KnRule& rule,
                                      double low_fraction = 0.5,
                                      double factor = 10.0,
                                      double amplitude = 1.0) {
  detail::require_rate(r, "family_mixed");
  detail::require_amplitude(amplitude, "family_mixed");
  if (!(low_fraction > 0.0 && low_fraction < 1.0)) {
    throw std::invalid_argument("family_mixed: low_fraction must be in (0, 1)");
  }
  AlternativeFamily fam;
  fam.name = "mixed";
  fam.r = r;
  fam.c_low = 0.999 * amplitude;
  fam.c_high = 1.001 * amplitude;
  fam.generator = [r, basis, rule, low_fraction, factor, amplitude](std::int64_t n) {
    const double norm = amplitude * std::pow(static_cast<double>(n), -r);
    const auto j_high = std::max(
        2, static_cast<int>(std::ceil(factor * static_cast<double>(rule(n)))));
    CoefficientVector v(basis);
    v.set(1, detail::unit_value(basis) * std::sqrt(low_fraction) * norm);
    v.set(j_high,
          detail::unit_value(basis) * std::sqrt(1.0 - low_fraction) * norm);
    return v;
  };
  return fam;
}

// Smooth decaying profile theta_j proportional to j^{-decay} on j <= k_n,
// renormalized to the target rate (shrinking-smooth).
inline AlternativeFamily family_power_law(double r, Basis basis,
                                          const KnRule& rule,
                                          double decay = 1.0,
                                          double amplitude = 1.0) {
  detail::require_rate(r, "family_power_law");
  detail::require_amplitude(amplitude, "family_power_law");
  if (!(decay > 0.0)) {
    throw std::invalid_argument("family_power_law: decay must be > 0");
  }
  AlternativeFamily fam;
  fam.name = "power-law";
  fam.r = r;
  fam.c_low = 0.999 * amplitude;
  fam.c_high = 1.001 * amplitude;
  fam.generator = [r, basis, rule, decay, amplitude](std::int64_t n) {
    const auto top = static_cast<int>(std::max<std::int64_t>(1, rule(n)));
    const double mult = CoefficientVector(basis).multiplicity();
    double mass = 0.0;
    for (int j = 1; j <= top; ++j) mass += mult * std::pow(j, -2.0 * decay);
    const double scale =
        amplitude * std::pow(static_cast<double>(n), -r) / std::sqrt(mass);
    CoefficientVector v(basis);
    for (int j = 1; j <= top; ++j) v.set(j, scale * std::pow(j, -decay));
    return v;
  };
  return fam;
}

// Declarative preset lookup used by configs and the command line.
inline AlternativeFamily make_preset(const std::string& name, double r,
                                     Basis basis, const KnRule& rule,
                                     double parameter = 0.0,
                                     double amplitude = 1.0) {
  if (name == "all-low") return family_all_low(r, basis, amplitude);
  if (name == "escaping") {
    return family_escaping(r, basis, rule, parameter > 0.0 ? parameter : 10.0,
                           amplitude);
  }
  if (name == "boundary") {
    return family_boundary(r, basis, rule, parameter > 0.0 ? parameter : 0.5,
                           amplitude);
  }
  if (name == "mixed") {
    return family_mixed(r, basis, rule, parameter > 0.0 ? parameter : 0.5, 10.0,
                        amplitude);
  }
  if (name == "power-law") {
    return family_power_law(r, basis, rule, parameter > 0.0 ? parameter : 1.0,
                            amplitude);
  }
  throw std::invalid_argument("make_preset: unknown preset: " + name);
}

}  // namespace npgof
