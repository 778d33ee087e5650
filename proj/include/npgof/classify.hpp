#pragma once
// Classification machinery: low-frequency-mass trend verdicts, purity
// (tail-mass) checks, common-random-number interaction experiments, the
// density-positivity ladder, and the compactness demonstrations.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "npgof/coefficients.hpp"
#include "npgof/montecarlo.hpp"
#include "npgof/normal.hpp"
#include "npgof/quadratic.hpp"
#include "npgof/rng.hpp"
#include "npgof/sequence_model.hpp"

namespace npgof {

// Effective frequency scale of a test family as a function of n.
struct KnRule {
  std::string name;
  std::function<std::int64_t(std::int64_t)> k_of_n;

  std::int64_t operator()(std::int64_t n) const {
    if (!k_of_n) throw std::logic_error("KnRule: empty rule");
    const std::int64_t k = k_of_n(n);
    return k < 1 ? 1 : k;
  }
};

// Kernel and chi-squared families: k_n = [n^{2-4r}].
inline KnRule kn_rule_frequency(double r) {
  if (!(r > 0.0 && r < 0.5)) {
    throw std::invalid_argument("kn_rule_frequency: r must be in (0, 1/2)");
  }
  return KnRule{"[n^(2-4r)]", [r](std::int64_t n) {
                  return static_cast<std::int64_t>(
                      std::pow(static_cast<double>(n), 2.0 - 4.0 * r));
                }};
}

// Rank-statistic family: k_n = [n^{(1-2r)/2}].
inline KnRule kn_rule_rank(double r) {
  if (!(r > 0.0 && r < 0.5)) {
    throw std::invalid_argument("kn_rule_rank: r must be in (0, 1/2)");
  }
  return KnRule{"[n^((1-2r)/2)]", [r](std::int64_t n) {
                  return static_cast<std::int64_t>(
                      std::pow(static_cast<double>(n), (1.0 - 2.0 * r) / 2.0));
                }};
}

// Quadratic families: the half-mass point of the weight sequence.
inline KnRule kn_rule_half_mass(const KappaFamily& family) {
  return KnRule{"half-mass(kappa)", [family](std::int64_t n) {
                  return static_cast<std::int64_t>(family.make(n).k_n);
                }};
}

namespace detail {

// Integer cutoff c for which {j : j < x} == {j : j < c} (strict threshold).
inline std::int64_t strict_below_cutoff(double x) {
  const double c = std::ceil(x);
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(c));
}

}  // namespace detail

struct ClassificationCell {
  std::int64_t n = 0;
  double c2 = 0.0;
  double low_value = 0.0;   // n^{2r} * mass below c2 k_n
  double tail_value = 0.0;  // n^{2r} * mass beyond c2 k_n
};

struct ClassificationReport {
  std::string kn_rule;
  std::vector<ClassificationCell> cells;  // n-major, c2-minor
  std::string verdict;                    // consistent-trend | inconsistent-trend | indeterminate
  double tau_minus = 0.0;
  double tau_zero = 0.0;
};

// Normalized low-frequency mass across (n, c2): the verdict is a pure
// function of the reported values and the declared thresholds.
inline ClassificationReport classify_family(
    const AlternativeFamily& family, const KnRule& rule,
    const std::vector<std::int64_t>& n_grid, const std::vector<double>& c2_grid,
    double tau_minus = 0.1, double tau_zero = 0.01) {
  if (n_grid.empty() || c2_grid.empty()) {
    throw std::invalid_argument("classify_family: empty grid");
  }
  ClassificationReport report;
  report.kn_rule = rule.name;
  report.tau_minus = tau_minus;
  report.tau_zero = tau_zero;
  for (const std::int64_t n : n_grid) {
    const CoefficientVector theta = family.theta(n);
    const double scale =
        std::pow(static_cast<double>(n), 2.0 * family.r);
    const std::int64_t k_n = rule(n);
    for (const double c2 : c2_grid) {
      const double window = c2 * static_cast<double>(k_n);
      ClassificationCell cell;
      cell.n = n;
      cell.c2 = c2;
      cell.low_value =
          scale * low_frequency_mass(theta, detail::strict_below_cutoff(window));
      cell.tail_value =
          scale * tail_mass(theta, static_cast<std::int64_t>(std::floor(window)));
      report.cells.push_back(cell);
    }
  }
  const std::size_t columns = c2_grid.size();
  const std::size_t rows = n_grid.size();
  bool some_column_bounded_below = false;
  bool all_columns_end_small = true;
  for (std::size_t c = 0; c < columns; ++c) {
    double column_min = 1e300;
    for (std::size_t r = 0; r < rows; ++r) {
      column_min = std::min(column_min, report.cells[r * columns + c].low_value);
    }
    if (column_min >= tau_minus) some_column_bounded_below = true;
    if (report.cells[(rows - 1) * columns + c].low_value > tau_zero) {
      all_columns_end_small = false;
    }
  }
  report.verdict = some_column_bounded_below ? "consistent-trend"
                   : all_columns_end_small   ? "inconsistent-trend"
                                             : "indeterminate";
  return report;
}

struct PurityLevel {
  double epsilon = 0.0;
  bool achieved = false;
  double c1 = 0.0;  // smallest grid constant achieving the tail bound
};

struct PurityReport {
  std::vector<PurityLevel> levels;
  bool purity_trend = false;
};

// Tail-mass criterion: for each epsilon in the ladder {eps, eps/2, eps/4},
// find the smallest C1 with tail mass beyond C1 k_n at most eps n^{-2r} for
// every grid n past the first (burn-in) point.
inline PurityReport purity_check(const AlternativeFamily& family,
                                 const KnRule& rule,
                                 const std::vector<std::int64_t>& n_grid,
                                 const std::vector<double>& c1_grid,
                                 double epsilon) {
  if (n_grid.size() < 2) {
    throw std::invalid_argument("purity_check: need at least two grid points");
  }
  if (c1_grid.empty()) throw std::invalid_argument("purity_check: empty C1 grid");
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("purity_check: epsilon must be > 0");
  }
  PurityReport report;
  report.purity_trend = true;
  for (const double eps : {epsilon, epsilon / 2.0, epsilon / 4.0}) {
    PurityLevel level;
    level.epsilon = eps;
    for (const double c1 : c1_grid) {
      bool ok = true;
      for (std::size_t i = 1; i < n_grid.size() && ok; ++i) {
        const std::int64_t n = n_grid[i];
        const double window = c1 * static_cast<double>(rule(n));
        const double tail = tail_mass(
            family.theta(n), static_cast<std::int64_t>(std::floor(window)));
        ok = tail <= eps * std::pow(static_cast<double>(n), -2.0 * family.r);
      }
      if (ok) {
        level.achieved = true;
        level.c1 = c1;
        break;
      }
    }
    report.purity_trend = report.purity_trend && level.achieved;
    report.levels.push_back(level);
  }
  return report;
}

struct InteractionResult {
  double beta_f = 0.0;
  double beta_fg = 0.0;
  double diff = 0.0;             // beta_f - beta_fg, paired
  double diff_half_width = 0.0;  // 1.96 * SE of the paired difference
  std::int64_t reps = 0;
};

// Type II errors for f and f + g under the quadratic test with common
// random numbers: each replication replays the identical noise stream for
// both arms, so the difference estimate is paired.
inline InteractionResult interaction_experiment_quadratic(
    const CoefficientVector& theta_f, const CoefficientVector& theta_g,
    const KappaWeights& weights, double alpha, std::int64_t reps,
    std::uint64_t seed, int workers = 1) {
  if (reps < 1) {
    throw std::invalid_argument("interaction_experiment: reps must be >= 1");
  }
  const CoefficientVector theta_fg = theta_f.plus(theta_g);
  if (theta_fg.max_index() > weights.J()) {
    throw std::invalid_argument(
        "interaction_experiment: signal support exceeds the weight truncation");
  }
  const std::uint64_t key = derive_key(seed, "interaction_quadratic");
  struct Counts {
    std::int64_t accept_f = 0;
    std::int64_t accept_fg = 0;
    std::int64_t flips = 0;
  };
  const Counts totals = mc_accumulate<Counts>(
      reps, workers, Counts{},
      [&](std::int64_t rep) {
        auto rng_f = replication_stream(key, static_cast<std::uint64_t>(rep));
        const auto obs_f = sample_sequence_observation_stream(
            theta_f, weights.n, weights.sigma, weights.J(), rng_f);
        auto rng_g = replication_stream(key, static_cast<std::uint64_t>(rep));
        const auto obs_fg = sample_sequence_observation_stream(
            theta_fg, weights.n, weights.sigma, weights.J(), rng_g);
        Counts one;
        one.accept_f = quadratic_decide(obs_f, weights, alpha).reject ? 0 : 1;
        one.accept_fg = quadratic_decide(obs_fg, weights, alpha).reject ? 0 : 1;
        one.flips = one.accept_f == one.accept_fg ? 0 : 1;
        return one;
      },
      [](Counts a, Counts b) {
        return Counts{a.accept_f + b.accept_f, a.accept_fg + b.accept_fg,
                      a.flips + b.flips};
      });
  InteractionResult result;
  result.reps = reps;
  result.beta_f =
      static_cast<double>(totals.accept_f) / static_cast<double>(reps);
  result.beta_fg =
      static_cast<double>(totals.accept_fg) / static_cast<double>(reps);
  result.diff = result.beta_f - result.beta_fg;
  // (a - b)^2 is exactly the flip indicator for 0/1 verdicts.
  const double var = static_cast<double>(totals.flips) /
                         static_cast<double>(reps) -
                     result.diff * result.diff;
  result.diff_half_width =
      1.96 * std::sqrt(std::max(0.0, var) / static_cast<double>(reps));
  return result;
}

struct TailPositivity {
  std::int64_t cutoff = 0;
  bool nonnegative = false;
  double min_density = 0.0;
};

// Density condition for tail components: 1 + (theta restricted to |j| > l)
// must stay nonnegative for each ladder cutoff l; illegal cutoffs are
// reported, not silently used.
inline std::vector<TailPositivity> check_density_tails(
    const CoefficientVector& theta, const std::vector<std::int64_t>& ladder) {
  std::vector<TailPositivity> out;
  for (const std::int64_t l : ladder) {
    if (l < 0) throw std::invalid_argument("check_density_tails: negative cutoff");
    const DensitySpec spec(theta.from(l + 1));
    TailPositivity row;
    row.cutoff = l;
    row.min_density = spec.min_density();
    row.nonnegative = row.min_density >= 0.0;
    out.push_back(row);
  }
  return out;
}

// Exact power of the single-coordinate likelihood test: constant in the
// coordinate index, the baseline for the mixture decay.
inline double coordinate_likelihood_power(double rho, std::int64_t n,
                                          double sigma, double alpha) {
  const double amp = std::sqrt(static_cast<double>(n)) * rho / sigma;
  return std_normal_cdf(amp - normal_critical_value(alpha));
}

// Monte Carlo power of the likelihood-ratio test against the uniform
// mixture over J unit directions scaled by rho. The statistic is the
// log-sum-exp of per-coordinate likelihood tilts; its null quantile is
// calibrated on a paired stream.
inline double mixture_test_power(double rho, std::int64_t n, double sigma,
                                 std::int64_t J, double alpha,
                                 std::int64_t reps, std::uint64_t seed) {
  if (!(rho > 0.0)) throw std::invalid_argument("mixture_test_power: rho must be > 0");
  if (J < 1) throw std::invalid_argument("mixture_test_power: J must be >= 1");
  if (reps < 100) {
    throw std::invalid_argument("mixture_test_power: need at least 100 reps");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("mixture_test_power: alpha must be in (0,1)");
  }
  const double amp = std::sqrt(static_cast<double>(n)) * rho / sigma;
  const std::uint64_t key = derive_key(seed, "mixture_test_power");
  const auto statistic = [&](RngStream& rng, bool shifted) {
    double best = -1e300;
    double rest = 0.0;
    for (std::int64_t j = 0; j < J; ++j) {
      double z = rng.normal();
      if (shifted && j == 0) z += amp;
      const double tilt = amp * z;
      if (tilt > best) {
        // Rebase: all previous mass, max included, folds into the remainder.
        if (best > -1e300) rest = std::exp(best - tilt) * (1.0 + rest);
        best = tilt;
      } else {
        rest += std::exp(tilt - best);
      }
    }
    return best + std::log1p(rest);
  };
  std::vector<double> null_values(static_cast<std::size_t>(reps));
  for (std::int64_t rep = 0; rep < reps; ++rep) {
    auto rng = replication_stream(key, static_cast<std::uint64_t>(rep), 0);
    null_values[static_cast<std::size_t>(rep)] = statistic(rng, false);
  }
  std::sort(null_values.begin(), null_values.end());
  const auto rank = static_cast<std::int64_t>(
      std::ceil((1.0 - alpha) * static_cast<double>(reps)));
  const double critical =
      null_values[static_cast<std::size_t>(std::clamp<std::int64_t>(rank - 1, 0, reps - 1))];
  std::int64_t rejects = 0;
  for (std::int64_t rep = 0; rep < reps; ++rep) {
    auto rng = replication_stream(key, static_cast<std::uint64_t>(rep), 1);
    if (statistic(rng, true) > critical) ++rejects;
  }
  return static_cast<double>(rejects) / static_cast<double>(reps);
}

struct EllipsoidDirection {
  std::int64_t j = 0;
  double amplitude = 0.0;  // min(rho, a_j), the reachable signal size
  bool feasible = false;   // a_j >= rho: the direction meets the norm floor
  double power = 0.0;
};

// Ellipsoid a_j demo: alternatives rho e_j capped at the semi-axis, tested
// with the quadratic statistic truncated to the feasible span.
inline std::vector<EllipsoidDirection> ellipsoid_direction_powers(
    const std::function<double(std::int64_t)>& semi_axis, double rho,
    std::int64_t n, double sigma, const std::vector<std::int64_t>& directions,
    double alpha, std::int64_t reps, std::uint64_t seed) {
  if (!(rho > 0.0)) throw std::invalid_argument("ellipsoid: rho must be > 0");
  if (directions.empty()) throw std::invalid_argument("ellipsoid: no directions");
  if (reps < 100) throw std::invalid_argument("ellipsoid: need at least 100 reps");
  // Effective dimension: the largest feasible direction index.
  std::int64_t j_max = 0;
  for (const std::int64_t j : directions) {
    if (j < 1) throw std::invalid_argument("ellipsoid: directions must be >= 1");
    if (semi_axis(j) >= rho) j_max = std::max(j_max, j);
  }
  if (j_max == 0) {
    throw std::invalid_argument("ellipsoid: no feasible direction in the grid");
  }
  const double x_alpha = normal_critical_value(alpha);
  const double noise = sigma / std::sqrt(static_cast<double>(n));
  const std::uint64_t key = derive_key(seed, "ellipsoid_directions");
  std::vector<EllipsoidDirection> out;
  for (const std::int64_t j : directions) {
    EllipsoidDirection row;
    row.j = j;
    row.amplitude = std::min(rho, semi_axis(j));
    row.feasible = semi_axis(j) >= rho;
    std::int64_t rejects = 0;
    for (std::int64_t rep = 0; rep < reps; ++rep) {
      auto rng = replication_stream(key, static_cast<std::uint64_t>(rep),
                                    static_cast<std::uint64_t>(j));
      double t = 0.0;
      for (std::int64_t i = 1; i <= j_max; ++i) {
        double y = noise * rng.normal();
        if (i == j) y += row.amplitude;
        t += (y / noise) * (y / noise) - 1.0;
      }
      if (t / std::sqrt(2.0 * static_cast<double>(j_max)) > x_alpha) ++rejects;
    }
    row.power = static_cast<double>(rejects) / static_cast<double>(reps);
    out.push_back(row);
  }
  return out;
}

}  // namespace npgof
