#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "npgof/coefficients.hpp"
#include "npgof/normal.hpp"
#include "npgof/quadrature.hpp"
#include "npgof/sequence_model.hpp"

namespace npgof {

// Symmetric kernel supported on [-1, 1] with unit integral. Evaluation
// outside the support returns 0 by convention of the stored rule.
struct Kernel {
  std::string name;
  std::function<double(double)> k;

  double operator()(double t) const { return t < -1.0 || t > 1.0 ? 0.0 : k(t); }

  static Kernel uniform() {
    return {"uniform", [](double) { return 0.5; }};
  }

  static Kernel epanechnikov() {
    return {"epanechnikov", [](double t) { return 0.75 * (1.0 - t * t); }};
  }

  // Piecewise-linear kernel through strictly increasing nodes spanning [-1,1].
  static Kernel tabulated(std::vector<std::pair<double, double>> pts) {
    if (pts.size() < 2) {
      throw std::invalid_argument("Kernel::tabulated: need at least 2 points");
    }
    for (std::size_t i = 1; i < pts.size(); ++i) {
      if (!(pts[i].first > pts[i - 1].first)) {
        throw std::invalid_argument("Kernel::tabulated: t must strictly increase");
      }
    }
    if (pts.front().first != -1.0 || pts.back().first != 1.0) {
      throw std::invalid_argument("Kernel::tabulated: t must span [-1, 1]");
    }
    auto table = std::move(pts);
    return {"tabulated", [table](double t) {
              auto it = std::lower_bound(
                  table.begin(), table.end(), t,
                  [](const auto& p, double v) { return p.first < v; });
              if (it == table.begin()) return it->second;
              if (it == table.end()) return table.back().second;
              const auto& [t1, k1] = *it;
              const auto& [t0, k0] = *(it - 1);
              return k0 + (k1 - k0) * (t - t0) / (t1 - t0);
            }};
  }
};

// CSV with header "t,k" and strictly increasing t over [-1, 1].
inline Kernel load_kernel_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("t,k", 0) != 0) {
    throw std::invalid_argument("kernel csv: expected header 't,k'");
  }
  std::vector<std::pair<double, double>> pts;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::invalid_argument("kernel csv: malformed row: " + line);
    }
    pts.emplace_back(std::stod(line.substr(0, comma)),
                     std::stod(line.substr(comma + 1)));
  }
  return Kernel::tabulated(std::move(pts));
}

// K hat(omega) = int e^{2 pi i omega t} K(t) dt; real because K is even.
inline double kernel_fourier(const Kernel& kernel, double omega,
                             int panels = 1 << 12) {
  return integrate_gl(
      [&](double t) {
        return std::cos(2.0 * std::numbers::pi * omega * t) * kernel(t);
      },
      -1.0, 1.0, panels);
}

// Throws when the stored rule breaks the kernel contract (symmetry on a scan,
// unit mass within 1e-8).
inline void validate_kernel(const Kernel& kernel) {
  for (int i = 0; i <= 500; ++i) {
    const double t = -1.0 + 2.0 * i / 500.0;
    if (std::abs(kernel(t) - kernel(-t)) > 1e-10) {
      throw std::invalid_argument("kernel: not symmetric at t = " + std::to_string(t));
    }
  }
  const double mass = integrate_gl([&](double t) { return kernel(t); }, -1.0, 1.0);
  if (std::abs(mass - 1.0) > 1e-8) {
    throw std::invalid_argument("kernel: integral != 1 (got " + std::to_string(mass) + ")");
  }
}

// gamma^2 = 2 int (K*K)^2 over [-2, 2] by nested quadrature.
inline double gamma_constant(const Kernel& kernel, int panels = 1 << 9) {
  const auto conv = [&](double t) {
    const double lo = std::max(-1.0, t - 1.0);
    const double hi = std::min(1.0, t + 1.0);
    if (lo >= hi) return 0.0;
    return integrate_gl([&](double s) { return kernel(t - s) * kernel(s); }, lo,
                        hi, panels);
  };
  const double g2 = 2.0 * integrate_gl([&](double t) {
                      const double c = conv(t);
                      return c * c;
                    },
                    -2.0, 2.0, panels);
  return std::sqrt(g2);
}

// Cached transforms K hat(j h) for 0 <= j <= J (two-sided by evenness) plus
// the normalizing constant gamma. J defaults to ceil(4/h): with 1/h > 4 the
// Riemann sums of K hat^2 and K hat^4 equal their integrals exactly (the
// time-domain self-convolutions live on [-2,2] and [-4,4]), so the statistic
// below has H0 variance 1 up to the truncated K hat^4 tail (~1e-9 relative).
struct KernelPlan {
  std::string kernel_name;
  double h = 0.0;
  std::int64_t n = 0;
  double sigma = 1.0;
  int J = 0;
  std::vector<double> khat;  // khat[j], j = 0..J
  double gamma = 0.0;

  static KernelPlan make(const Kernel& kernel, double h, std::int64_t n,
                         double sigma, int J = -1) {
    if (!(h > 0.0 && h < 1.0)) {
      throw std::invalid_argument("KernelPlan: h must lie in (0, 1)");
    }
    if (n < 1) throw std::invalid_argument("KernelPlan: n must be >= 1");
    if (!(sigma > 0.0)) throw std::invalid_argument("KernelPlan: sigma > 0");
    validate_kernel(kernel);
    KernelPlan plan;
    plan.kernel_name = kernel.name;
    plan.h = h;
    plan.n = n;
    plan.sigma = sigma;
    plan.J = J > 0 ? J : static_cast<int>(std::ceil(4.0 / h));
    plan.khat.resize(static_cast<std::size_t>(plan.J) + 1);
    for (int j = 0; j <= plan.J; ++j) {
      plan.khat[static_cast<std::size_t>(j)] = kernel_fourier(kernel, j * h);
    }
    if (std::abs(plan.khat[0] - 1.0) > 1e-8) {
      throw std::invalid_argument("KernelPlan: K hat(0) != 1");
    }
    for (const double v : plan.khat) {
      if (std::abs(v) > 1.0 + 1e-10) {
        throw std::invalid_argument("KernelPlan: |K hat| exceeds 1");
      }
    }
    plan.gamma = gamma_constant(kernel);
    return plan;
  }

  double khat_at(int abs_j) const {
    return abs_j <= J ? khat[static_cast<std::size_t>(abs_j)] : 0.0;
  }
};

namespace detail {

inline void check_match(const SequenceObservation& obs, const KernelPlan& plan) {
  if (obs.basis != Basis::trig_complex) {
    throw std::invalid_argument("kernel statistic: needs TrigComplex observations");
  }
  if (obs.n != plan.n) throw std::invalid_argument("kernel statistic: n mismatch");
  if (obs.J != plan.J) throw std::invalid_argument("kernel statistic: J mismatch");
  if (obs.sigma != plan.sigma) {
    throw std::invalid_argument("kernel statistic: sigma mismatch");
  }
}

}  // namespace detail

// Raw two-sided quadratic form sum_{|j| <= J} w(|j|) |y_j|^2 together with its
// exact H0 mean and variance (y_0 real, conjugate pairs for j != 0). Shared by
// the kernel statistic and the kappa-equivalence cross-check.
struct TwoSidedForm {
  double raw = 0.0;
  double mean0 = 0.0;
  double var0 = 0.0;
};

inline TwoSidedForm two_sided_form(const SequenceObservation& obs,
                                   const std::vector<double>& weight_by_abs_j) {
  if (static_cast<int>(weight_by_abs_j.size()) != obs.J + 1) {
    throw std::invalid_argument("two_sided_form: need weights for j = 0..J");
  }
  const double noise = obs.sigma * obs.sigma / static_cast<double>(obs.n);
  TwoSidedForm out;
  double w2_sum = weight_by_abs_j[0] * weight_by_abs_j[0];
  out.raw = weight_by_abs_j[0] * obs.y0 * obs.y0;
  out.mean0 = weight_by_abs_j[0] * noise;
  for (int j = 1; j <= obs.J; ++j) {
    const double w = weight_by_abs_j[static_cast<std::size_t>(j)];
    out.raw += 2.0 * w * std::norm(obs.y[static_cast<std::size_t>(j - 1)]);
    out.mean0 += 2.0 * w * noise;
    w2_sum += 2.0 * w * w;
  }
  out.var0 = 2.0 * noise * noise * w2_sum;
  return out;
}

// T_1n(f) = sum_{j in Z} |K hat(j h)|^2 |theta_j|^2 (theta_0 = 0).
inline double t1n_functional(const CoefficientVector& theta,
                             const KernelPlan& plan) {
  if (theta.basis() != Basis::trig_complex) {
    throw std::invalid_argument("t1n_functional: needs TrigComplex coefficients");
  }
  if (theta.max_index() > plan.J) {
    throw std::invalid_argument("t1n_functional: support exceeds plan J");
  }
  double total = 0.0;
  for (const auto& [j, v] : theta.entries()) {
    const double kh = plan.khat_at(j);
    total += 2.0 * kh * kh * std::norm(v);
  }
  return total;
}

// T_n = n h^{1/2} sigma^-2 gamma^-1 (sum |K hat(jh)|^2 |y_j|^2 - mean0);
// asymptotically standard normal under H0.
inline double kernel_statistic(const SequenceObservation& obs,
                               const KernelPlan& plan) {
  detail::check_match(obs, plan);
  std::vector<double> w(plan.khat.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = plan.khat[i] * plan.khat[i];
  const auto form = two_sided_form(obs, w);
  const double norm = static_cast<double>(plan.n) * std::sqrt(plan.h) /
                      (plan.sigma * plan.sigma * plan.gamma);
  return norm * (form.raw - form.mean0);
}

// Drift of the kernel statistic under theta: gamma^-1 sigma^-2 n h^{1/2} T_1n.
inline double kernel_noncentrality(const CoefficientVector& theta,
                                   const KernelPlan& plan) {
  return static_cast<double>(plan.n) * std::sqrt(plan.h) *
         t1n_functional(theta, plan) / (plan.sigma * plan.sigma * plan.gamma);
}

// Predicted type II error Phi(x_alpha - noncentrality).
inline double kernel_power_formula(const CoefficientVector& theta,
                                   const KernelPlan& plan, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("kernel_power_formula: alpha in (0,1)");
  }
  return std_normal_cdf(normal_critical_value(alpha) -
                        kernel_noncentrality(theta, plan));
}

struct KernelDecision {
  bool reject = false;
  double score = 0.0;
  double threshold = 0.0;
};

inline KernelDecision kernel_decide(const SequenceObservation& obs,
                                    const KernelPlan& plan, double alpha) {
  KernelDecision d;
  d.threshold = normal_critical_value(alpha);
  d.score = kernel_statistic(obs, plan);
  d.reject = d.score > d.threshold;
  return d;
}

}  // namespace npgof
