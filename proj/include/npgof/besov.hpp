#pragma once
// Besov-body machinery: the exact sup-form tail norm, ball membership,
// the smooth + oscillating orthogonal decomposition, and the exact
// Pythagoras / cross-term checks used by the maxiset experiments.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "npgof/coefficients.hpp"

namespace npgof {

struct BesovBall {
  double s = 0.0;   // smoothness exponent
  double p0 = 0.0;  // radius

  BesovBall(double s_in, double p0_in) : s(s_in), p0(p0_in) {
    if (!(s > 0.0)) throw std::invalid_argument("BesovBall: s must be > 0");
    if (!(p0 > 0.0)) throw std::invalid_argument("BesovBall: radius must be > 0");
  }
};

// Exact sup over lambda > 0 of lambda^{2s} * (squared mass beyond lambda).
// The tail is constant between support indices and the weight increases, so
// the sup is attained as lambda approaches a support point from below,
// where the tail still includes that point: candidates are
// j^{2s} * sum_{i >= j} |theta_i|^2 over support indices j.
inline double besov_norm(const CoefficientVector& theta, double s) {
  if (!(s > 0.0)) throw std::invalid_argument("besov_norm: s must be > 0");
  const auto& entries = theta.entries();
  if (entries.empty()) return 0.0;
  const double mult = theta.multiplicity();
  double best = 0.0;
  double inclusive_tail = 0.0;
  // Map iteration is ascending; walk support indices in reverse.
  for (auto it = entries.rbegin(); it != entries.rend(); ++it) {
    inclusive_tail += mult * std::norm(it->second);
    const double candidate =
        std::pow(static_cast<double>(it->first), 2.0 * s) * inclusive_tail;
    best = std::max(best, candidate);
  }
  return best;
}

struct BesovMembership {
  double norm_value = 0.0;
  bool member = false;
};

inline BesovMembership besov_membership(const CoefficientVector& theta,
                                        const BesovBall& ball) {
  const double norm = besov_norm(theta, ball.s);
  return BesovMembership{norm, norm <= ball.p0};
}

struct MaxisetDecomposition {
  CoefficientVector f1;  // low-frequency part, |j| < cutoff
  CoefficientVector f2;  // remainder
  double besov_norm_f1 = 0.0;
};

// Orthogonal split at the cutoff; the partition itself is exact, so
// ||theta||^2 = ||f1||^2 + ||f2||^2 holds coefficientwise.
inline MaxisetDecomposition maxiset_decompose(const CoefficientVector& theta,
                                              std::int64_t cutoff, double s) {
  if (cutoff < 1) {
    throw std::invalid_argument("maxiset_decompose: cutoff must be >= 1");
  }
  MaxisetDecomposition out{theta.below(cutoff), theta.from(cutoff), 0.0};
  out.besov_norm_f1 = besov_norm(out.f1, s);
  return out;
}

struct OrthogonalityReport {
  double cross_term = 0.0;         // sum of coefficient products
  double pythagoras_defect = 0.0;  // ||f+g||^2 - ||f||^2 - ||g||^2
};

inline OrthogonalityReport orthogonality_check(const CoefficientVector& f,
                                               const CoefficientVector& g) {
  OrthogonalityReport report;
  report.cross_term = dot(f, g);
  report.pythagoras_defect =
      f.plus(g).norm_squared() - f.norm_squared() - g.norm_squared();
  return report;
}

}  // namespace npgof
