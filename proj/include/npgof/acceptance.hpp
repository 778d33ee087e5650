#pragma once
// The acceptance gate: nine end-to-end criteria covering exact identities,
// null calibration, power-formula reproduction, the consistency dichotomy,
// interaction invariance, the bridge sampler, assumption rate bands, the
// compactness demonstrations, and bitwise determinism. Every replication
// count, grid, and tolerance is pinned here; the functions report pass/fail
// with a measured summary and never adapt to the outcome.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "npgof/chi_squared.hpp"
#include "npgof/classify.hpp"
#include "npgof/cvm.hpp"
#include "npgof/families.hpp"
#include "npgof/harness.hpp"
#include "npgof/identities.hpp"
#include "npgof/kernel.hpp"
#include "npgof/montecarlo.hpp"
#include "npgof/quadratic.hpp"
#include "npgof/rng.hpp"
#include "npgof/sequence_model.hpp"

namespace npgof {

struct CriterionResult {
  std::string name;
  bool pass = false;
  std::string detail;
  std::int64_t runtime_ms = 0;
};

namespace detail {

inline std::string fmt(double x, const char* spec = "%.4f") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, x);
  return buf;
}

template <typename Body>
CriterionResult timed_criterion(const std::string& name, Body&& body) {
  const auto start = std::chrono::steady_clock::now();
  CriterionResult out;
  out.name = name;
  body(out);
  out.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return out;
}

struct FactorBand {
  double lo = 1e300;
  double hi = 0.0;
  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  bool within_factor2() const { return lo > 0.0 && hi <= 2.0 * lo; }
  std::string show() const {
    return "[" + fmt(lo, "%.3g") + "," + fmt(hi, "%.3g") + "]";
  }
};

inline std::string read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("acceptance: cannot read " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace detail

// 1. The four identity groups at their pinned tolerances, under ten seconds.
inline CriterionResult accept_identity_suite(std::uint64_t seed) {
  return detail::timed_criterion("identity-suite", [&](CriterionResult& out) {
    const auto start = std::chrono::steady_clock::now();
    const auto checks = run_identity_suite(seed);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    out.pass = secs < 10.0;
    for (const auto& chk : checks) {
      out.pass = out.pass && chk.pass;
      out.detail += chk.name + " worst=" + detail::fmt(chk.worst, "%.2e") +
                    (chk.pass ? "" : " FAIL") + "; ";
    }
    out.detail += detail::fmt(secs, "%.1f") + " s (limit 10)";
  });
}

// 2. Type I error at alpha = 0.05 with 1e5 replications per statistic:
// quadratic, kernel, and CvM within +-0.01; chi-squared within +-0.015.
inline CriterionResult accept_null_calibration(std::uint64_t seed, int workers) {
  return detail::timed_criterion("null-calibration", [&](CriterionResult& out) {
    constexpr std::int64_t kReps = 100000;
    constexpr double kAlpha = 0.05;
    out.pass = true;
    const auto record = [&](const char* label, double alpha_hat, double tol) {
      const bool ok = std::abs(alpha_hat - kAlpha) <= tol;
      out.pass = out.pass && ok;
      out.detail += std::string(label) + "=" + detail::fmt(alpha_hat) +
                    (ok ? "" : " FAIL") + "; ";
    };

    {
      const auto w = example_family_rule(0.25, 2.0, 1.0, 1.0, 4).make(4096);
      const CoefficientVector null_theta(Basis::cosine_half);
      const std::uint64_t key = derive_key(seed, "accept-null-quadratic");
      const auto est =
          estimate_power(kReps, workers, key, [&](std::int64_t rep) {
            auto rng = replication_stream(key, static_cast<std::uint64_t>(rep));
            const auto obs = sample_sequence_observation_stream(
                null_theta, w.n, w.sigma, w.J(), rng);
            return quadratic_decide(obs, w, kAlpha).reject;
          });
      record("quadratic", est.estimate, 0.01);
    }

    {
      const auto plan =
          KernelPlan::make(Kernel::uniform(), 1.0 / 4096.0, 4096, 1.0);
      const CoefficientVector null_theta(Basis::trig_complex);
      const std::uint64_t key = derive_key(seed, "accept-null-kernel");
      const auto est =
          estimate_power(kReps, workers, key, [&](std::int64_t rep) {
            auto rng = replication_stream(key, static_cast<std::uint64_t>(rep));
            const auto obs = sample_sequence_observation_stream(
                null_theta, plan.n, plan.sigma, plan.J, rng);
            return kernel_decide(obs, plan, kAlpha).reject;
          });
      record("kernel", est.estimate, 0.01);
    }

    {
      constexpr int kCells = 64;
      constexpr std::int64_t kN = 10000;
      const std::uint64_t key = derive_key(seed, "accept-null-chi2");
      const auto est =
          estimate_power(kReps, workers, key, [&](std::int64_t rep) {
            auto rng = replication_stream(key, static_cast<std::uint64_t>(rep));
            CellHistogram hist;
            hist.m = kCells;
            hist.n = kN;
            hist.counts.assign(kCells, 0);
            for (std::int64_t i = 0; i < kN; ++i) {
              const int cell = std::min(
                  static_cast<int>(rng.uniform() * kCells), kCells - 1);
              ++hist.counts[static_cast<std::size_t>(cell)];
            }
            return chi2_decide(hist, kAlpha).reject;
          });
      record("chi2", est.estimate, 0.015);
    }

    {
      const auto critical = calibrate_cvm_critical(
          kAlpha, 1024, 200000, derive_key(seed, "accept-cvm-calibration"),
          workers);
      const std::uint64_t key = derive_key(seed, "accept-null-cvm");
      const auto est =
          estimate_power(kReps, workers, key, [&](std::int64_t rep) {
            auto rng = replication_stream(key, static_cast<std::uint64_t>(rep));
            std::vector<double> sample(1000);
            for (auto& x : sample) x = rng.uniform();
            return cvm_decide(sample, critical).reject;
          });
      out.detail += "x_alpha=" + detail::fmt(critical.x_alpha) + "; ";
      record("cvm", est.estimate, 0.01);
    }
  });
}

// 3. Monte Carlo type II error against the plug-in normal predictions at
// drift targets {0.5, 1, 2}, n = 4096, 1e5 replications: quadratic and
// kernel within +-0.03, chi-squared within +-0.04.
inline CriterionResult accept_power_formulas(std::uint64_t seed, int workers) {
  return detail::timed_criterion("power-formulas", [&](CriterionResult& out) {
    constexpr std::int64_t kReps = 100000;
    constexpr double kAlpha = 0.05;
    constexpr std::int64_t kN = 4096;
    const double targets[] = {0.5, 1.0, 2.0};
    out.pass = true;
    const auto record = [&](const char* label, double target, double beta_hat,
                            double predicted, double tol) {
      const bool ok = std::abs(beta_hat - predicted) <= tol;
      out.pass = out.pass && ok;
      out.detail += std::string(label) + "@" + detail::fmt(target, "%.1f") +
                    " beta=" + detail::fmt(beta_hat) + " pred=" +
                    detail::fmt(predicted) + (ok ? "" : " FAIL") + "; ";
    };

    {
      const auto w = example_family_rule(0.25, 2.0, 1.0, 1.0, 4).make(kN);
      const double n2 = static_cast<double>(w.n) * static_cast<double>(w.n);
      const double sigma4 = std::pow(w.sigma, 4.0);
      const std::uint64_t base = derive_key(seed, "accept-power-quadratic");
      for (int t = 0; t < 3; ++t) {
        CoefficientVector theta(Basis::cosine_half);
        theta.set(1, std::sqrt(targets[t] * std::sqrt(2.0 * w.a_n) * sigma4 /
                               (n2 * w.kappa2_at(1))));
        const auto nc = noncentrality(theta, w);
        const double predicted =
            quadratic_power_formula(nc.r_n, nc.a_n, kAlpha);
        const std::uint64_t key = derive_key(base, static_cast<std::uint64_t>(t));
        const auto est =
            estimate_power(kReps, workers, key, [&](std::int64_t rep) {
              auto rng =
                  replication_stream(key, static_cast<std::uint64_t>(rep));
              const auto obs = sample_sequence_observation_stream(
                  theta, w.n, w.sigma, w.J(), rng);
              return !quadratic_decide(obs, w, kAlpha).reject;
            });
        record("quad", targets[t], est.estimate, predicted, 0.03);
      }
    }

    {
      const auto plan =
          KernelPlan::make(Kernel::uniform(), 1.0 / 256.0, kN, 1.0);
      CoefficientVector probe(Basis::trig_complex);
      probe.set(1, {0.02, 0.0});
      const double drift_probe = kernel_noncentrality(probe, plan);
      const std::uint64_t base = derive_key(seed, "accept-power-kernel");
      for (int t = 0; t < 3; ++t) {
        CoefficientVector theta(Basis::trig_complex);
        theta.set(1, {0.02 * std::sqrt(targets[t] / drift_probe), 0.0});
        const double predicted = kernel_power_formula(theta, plan, kAlpha);
        const std::uint64_t key = derive_key(base, static_cast<std::uint64_t>(t));
        const auto est =
            estimate_power(kReps, workers, key, [&](std::int64_t rep) {
              auto rng =
                  replication_stream(key, static_cast<std::uint64_t>(rep));
              const auto obs = sample_sequence_observation_stream(
                  theta, plan.n, plan.sigma, plan.J, rng);
              return !kernel_decide(obs, plan, kAlpha).reject;
            });
        record("kernel", targets[t], est.estimate, predicted, 0.03);
      }
    }

    {
      constexpr int kCells = 64;
      CoefficientVector probe(Basis::trig_complex);
      probe.set(1, {0.02, 0.0});
      const double drift_probe =
          chi2_functional(probe, kCells, kN) / std::sqrt(2.0 * kCells);
      const std::uint64_t base = derive_key(seed, "accept-power-chi2");
      for (int t = 0; t < 3; ++t) {
        CoefficientVector theta(Basis::trig_complex);
        theta.set(1, {0.02 * std::sqrt(targets[t] / drift_probe), 0.0});
        const double predicted = chi2_power_formula(theta, kCells, kN, kAlpha);
        const DensitySpec density(theta);
        const std::uint64_t key = derive_key(base, static_cast<std::uint64_t>(t));
        const auto est =
            estimate_power(kReps, workers, key, [&](std::int64_t rep) {
              const auto sample = sample_density_iid(
                  density, kN, derive_key(key, static_cast<std::uint64_t>(rep)));
              return !chi2_decide(sample, kCells, kAlpha).reject;
            });
        record("chi2", targets[t], est.estimate, predicted, 0.04);
      }
    }
  });
}

// 4. Dichotomy at n = 4096: the all-low family must beat the level by 0.1;
// the escaping family (mass at 10 k_n) must sit within 0.03 of the level.
inline CriterionResult accept_dichotomy(std::uint64_t seed, int workers) {
  return detail::timed_criterion("consistency-dichotomy",
                                 [&](CriterionResult& out) {
    constexpr std::int64_t kReps = 20000;
    constexpr double kAlpha = 0.05;
    constexpr std::int64_t kN = 4096;
    const auto fam_rule = example_family_rule(0.3, 2.0, 1.0, 1.0, 16);
    const auto w = fam_rule.make(kN);
    const auto rule = kn_rule_half_mass(fam_rule);
    const auto theta_low =
        family_all_low(0.3, Basis::cosine_half, 2.5).theta(kN);
    const auto theta_esc =
        family_escaping(0.3, Basis::cosine_half, rule, 10.0, 2.5).theta(kN);
    if (theta_esc.max_index() > w.J()) {
      out.pass = false;
      out.detail = "escaping support exceeds truncation";
      return;
    }
    const auto power_of = [&](const CoefficientVector& theta,
                              std::uint64_t key) {
      return estimate_power(kReps, workers, key, [&](std::int64_t rep) {
               auto rng =
                   replication_stream(key, static_cast<std::uint64_t>(rep));
               const auto obs = sample_sequence_observation_stream(
                   theta, w.n, w.sigma, w.J(), rng);
               return quadratic_decide(obs, w, kAlpha).reject;
             }).estimate;
    };
    const double p_low =
        power_of(theta_low, derive_key(seed, "accept-dichotomy-low"));
    const double p_esc =
        power_of(theta_esc, derive_key(seed, "accept-dichotomy-escaping"));
    const bool low_ok = p_low - kAlpha >= 0.1;
    const bool esc_ok = std::abs(p_esc - kAlpha) <= 0.03;
    out.pass = low_ok && esc_ok;
    out.detail = "all-low power=" + detail::fmt(p_low) +
                 (low_ok ? "" : " FAIL") + "; escaping(j=" +
                 std::to_string(theta_esc.max_index()) +
                 ") power=" + detail::fmt(p_esc) + (esc_ok ? "" : " FAIL");
  });
}

// 5. Adding an escaping component must not move the type II error: paired
// common-random-number difference within 0.03 at 1e5 replications.
inline CriterionResult accept_interaction(std::uint64_t seed, int workers) {
  return detail::timed_criterion("interaction-invariance",
                                 [&](CriterionResult& out) {
    constexpr std::int64_t kN = 4096;
    const auto fam_rule = example_family_rule(0.3, 2.0, 1.0, 1.0, 16);
    const auto w = fam_rule.make(kN);
    const auto rule = kn_rule_half_mass(fam_rule);
    const auto theta_f =
        family_all_low(0.3, Basis::cosine_half, 1.4).theta(kN);
    const auto theta_g =
        family_escaping(0.3, Basis::cosine_half, rule, 10.0, 1.5).theta(kN);
    const auto res = interaction_experiment_quadratic(
        theta_f, theta_g, w, 0.05, 100000,
        derive_key(seed, "accept-interaction"), workers);
    out.pass = std::abs(res.diff) <= 0.03;
    out.detail = "beta(f)=" + detail::fmt(res.beta_f) +
                 " beta(f+g)=" + detail::fmt(res.beta_fg) +
                 " |diff|=" + detail::fmt(std::abs(res.diff)) + " +- " +
                 detail::fmt(res.diff_half_width);
  });
}

// 6. Null mean of the bridge limit sampler: 1/6 within four standard errors
// at 1e5 draws, truncation J = 1e4.
inline CriterionResult accept_bridge_null_mean(std::uint64_t seed,
                                               int workers) {
  return detail::timed_criterion("bridge-null-mean", [&](CriterionResult& out) {
    constexpr std::int64_t kDraws = 100000;
    constexpr int kJ = 10000;
    const CoefficientVector null_theta(Basis::cosine_half);
    const std::uint64_t key = derive_key(seed, "accept-bridge-null");
    struct Moments {
      double sum = 0.0;
      double sumsq = 0.0;
    };
    const auto m = mc_accumulate<Moments>(
        kDraws, workers, Moments{},
        [&](std::int64_t rep) {
          auto rng = replication_stream(key, static_cast<std::uint64_t>(rep));
          const double v =
              bridge_limit_sample_stream(null_theta, 1000, kJ, rng);
          return Moments{v, v * v};
        },
        [](Moments a, Moments b) {
          return Moments{a.sum + b.sum, a.sumsq + b.sumsq};
        });
    const double mean = m.sum / static_cast<double>(kDraws);
    const double var =
        std::max(0.0, m.sumsq / static_cast<double>(kDraws) - mean * mean);
    const double se = std::sqrt(var / static_cast<double>(kDraws));
    const double gap = std::abs(mean - 1.0 / 6.0);
    out.pass = gap <= 4.0 * se;
    out.detail = "mean=" + detail::fmt(mean, "%.6f") + " target=" +
                 detail::fmt(1.0 / 6.0, "%.6f") + " |gap|/se=" +
                 detail::fmt(se > 0.0 ? gap / se : 1e300, "%.2f") +
                 " (limit 4)";
  });
}

// 7. The example weight family: A1-A5 verdicts plus factor-2 bands for
// rho_n n^{2r}, k_n / n^{2-4r}, and A_n on n in {2^10..2^14}.
inline CriterionResult accept_assumption_bands(std::uint64_t) {
  return detail::timed_criterion("assumption-bands", [&](CriterionResult& out) {
    const std::vector<std::int64_t> grid{1024, 2048, 4096, 8192, 16384};
    const double params[][2] = {{0.2, 2.0}, {0.25, 2.0}, {0.25, 3.0}};
    out.pass = true;
    for (const auto& p : params) {
      const double r = p[0];
      const double gamma = p[1];
      const auto fam = example_family_rule(r, gamma, 1.0, 1.0, 32);
      const auto report = validate_assumptions(fam, grid);
      detail::FactorBand rho_band, kn_band, an_band;
      for (const std::int64_t n : grid) {
        const auto w = fam.make(n);
        const double nn = static_cast<double>(n);
        rho_band.add(w.rho * std::pow(nn, 2.0 * r));
        kn_band.add(static_cast<double>(w.k_n) / std::pow(nn, 2.0 - 4.0 * r));
        an_band.add(w.a_n);
      }
      const bool ok = report.a1_to_a5() && rho_band.within_factor2() &&
                      kn_band.within_factor2() && an_band.within_factor2();
      out.pass = out.pass && ok;
      out.detail += "(r=" + detail::fmt(r, "%.2f") + ",g=" +
                    detail::fmt(gamma, "%.0f") + ") A1-A5 " +
                    (report.a1_to_a5() ? "ok" : "FAIL") + " rho" +
                    rho_band.show() + " kn" + kn_band.show() + " An" +
                    an_band.show() + (ok ? "" : " FAIL") + "; ";
    }
  });
}

// 8. Compactness demonstrations: the l2-ball mixture power decays to the
// level as the dimension grows to 1e4; the ellipsoid keeps its minimax
// direction detectable.
inline CriterionResult accept_compactness(std::uint64_t seed) {
  return detail::timed_criterion("compactness-demo", [&](CriterionResult& out) {
    constexpr double kAlpha = 0.05;
    const std::uint64_t mkey = derive_key(seed, "accept-mixture");
    const double p1 = mixture_test_power(0.15, 100, 1.0, 1, kAlpha, 20000, mkey);
    const double p100 =
        mixture_test_power(0.15, 100, 1.0, 100, kAlpha, 20000, mkey);
    const double p_big =
        mixture_test_power(0.15, 100, 1.0, 10000, kAlpha, 20000, mkey);
    const bool mixture_ok =
        std::abs(p_big - kAlpha) <= 0.02 && p1 >= p_big + 0.1;

    const auto rows = ellipsoid_direction_powers(
        [](std::int64_t j) { return 1.0 / static_cast<double>(j); }, 0.5, 100,
        1.0, {1, 2, 3, 10}, kAlpha, 10000,
        derive_key(seed, "accept-ellipsoid"));
    double minimax = 1.0;
    bool any_feasible = false;
    for (const auto& row : rows) {
      if (row.feasible) {
        any_feasible = true;
        minimax = std::min(minimax, row.power);
      }
    }
    const bool ellipsoid_ok = any_feasible && minimax >= kAlpha + 0.1;
    out.pass = mixture_ok && ellipsoid_ok;
    out.detail = "mixture J=1:" + detail::fmt(p1) + " J=100:" +
                 detail::fmt(p100) + " J=1e4:" + detail::fmt(p_big) +
                 (mixture_ok ? "" : " FAIL") +
                 "; ellipsoid minimax power=" + detail::fmt(minimax) +
                 (ellipsoid_ok ? "" : " FAIL");
  });
}

namespace detail {

inline ExperimentConfig determinism_config(const ordered_json& body) {
  return config_from_string(body.dump());
}

}  // namespace detail

// 9. Bitwise determinism: the reduced manifest run twice at one worker and
// once at eight workers produces identical bundles (timing stripped) and
// identical CSV bytes.
inline CriterionResult accept_determinism(std::uint64_t seed) {
  return detail::timed_criterion("determinism", [&](CriterionResult& out) {
    const std::uint64_t config_seed = derive_key(seed, "accept-determinism");
    std::vector<ExperimentConfig> manifest;
    manifest.push_back(detail::determinism_config(
        {{"schema", kConfigSchema},
         {"id", "det-quadratic"},
         {"statistic", "quadratic"},
         {"family", "boundary"},
         {"amplitude", 2.5},
         {"n_grid", {128}},
         {"reps", 2000},
         {"alpha", 0.05},
         {"seed", config_seed}}));
    manifest.push_back(detail::determinism_config(
        {{"schema", kConfigSchema},
         {"id", "det-kernel"},
         {"statistic", "kernel"},
         {"kernel", "epanechnikov"},
         {"n_grid", {128}},
         {"reps", 2000},
         {"alpha", 0.05},
         {"seed", config_seed}}));
    manifest.push_back(detail::determinism_config(
        {{"schema", kConfigSchema},
         {"id", "det-chi2"},
         {"statistic", "chi2"},
         {"n_grid", {256}},
         {"reps", 2000},
         {"alpha", 0.05},
         {"seed", config_seed}}));
    manifest.push_back(detail::determinism_config(
        {{"schema", kConfigSchema},
         {"id", "det-cvm"},
         {"statistic", "cvm"},
         {"family", "boundary"},
         {"amplitude", 2.0},
         {"n_grid", {150}},
         {"reps", 2000},
         {"alpha", 0.05},
         {"seed", config_seed},
         {"params",
          {{"calib_draws", 20000},
           {"calib_j", 256},
           {"predict_draws", 2000},
           {"predict_j", 256}}}}));

    namespace fs = std::filesystem;
    const fs::path base =
        fs::temp_directory_path() / ("npgof-accept-" + std::to_string(seed));
    fs::remove_all(base);
    const auto first = run_suite(manifest, 1, (base / "w1a").string());
    const auto second = run_suite(manifest, 1, (base / "w1b").string());
    const auto wide = run_suite(manifest, 8, (base / "w8").string());
    const std::string a = strip_timing(first.bundle).dump(2);
    const std::string b = strip_timing(second.bundle).dump(2);
    const std::string c = strip_timing(wide.bundle).dump(2);
    const bool rerun_ok = a == b;
    const bool workers_ok = a == c;
    bool csv_ok = first.csv_paths.size() == second.csv_paths.size() &&
                  first.csv_paths.size() == wide.csv_paths.size();
    for (std::size_t i = 0; csv_ok && i < first.csv_paths.size(); ++i) {
      const auto bytes = detail::read_file_bytes(first.csv_paths[i]);
      csv_ok = bytes == detail::read_file_bytes(second.csv_paths[i]) &&
               bytes == detail::read_file_bytes(wide.csv_paths[i]);
    }
    fs::remove_all(base);
    out.pass = rerun_ok && workers_ok && csv_ok;
    out.detail = std::string("rerun ") + (rerun_ok ? "identical" : "DIFFERS") +
                 "; 1-vs-8 workers " + (workers_ok ? "identical" : "DIFFERS") +
                 "; csv " + (csv_ok ? "identical" : "DIFFERS") + " (" +
                 std::to_string(manifest.size()) + " experiments)";
  });
}

// The nine criteria in their contract order.
inline std::vector<CriterionResult> run_acceptance(std::uint64_t seed,
                                                   int workers) {
  std::vector<CriterionResult> results;
  results.push_back(accept_identity_suite(seed));
  results.push_back(accept_null_calibration(seed, workers));
  results.push_back(accept_power_formulas(seed, workers));
  results.push_back(accept_dichotomy(seed, workers));
  results.push_back(accept_interaction(seed, workers));
  results.push_back(accept_bridge_null_mean(seed, workers));
  results.push_back(accept_assumption_bands(seed));
  results.push_back(accept_compactness(seed));
  results.push_back(accept_determinism(seed));
  return results;
}

}  // namespace npgof
