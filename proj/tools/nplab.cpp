// nplab: command-line front end for the nonparametric testing laboratory.
// Every command is deterministic in --seed; --workers changes wall time only,
// never results.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "npgof/acceptance.hpp"
#include "npgof/besov.hpp"
#include "npgof/classify.hpp"
#include "npgof/cvm.hpp"
#include "npgof/families.hpp"
#include "npgof/harness.hpp"
#include "npgof/identities.hpp"
#include "npgof/quadratic.hpp"

namespace {

using npgof::Basis;
using npgof::CoefficientVector;

// Shared knobs for commands built on the example weight family.
struct FamilyFlags {
  double r = 0.25;
  double gamma = 2.0;
  double c = 1.0;
  int j_factor = 32;
};

// Shared knobs for alternative-family presets.
struct PresetFlags {
  std::string name = "all-low";
  double parameter = 0.0;
  double amplitude = 1.0;
};

void add_family_flags(CLI::App* cmd, FamilyFlags& f) {
  cmd->add_option("--r", f.r, "consistency rate r in (0, 1/2)");
  cmd->add_option("--gamma", f.gamma, "weight decay exponent (> 1)");
  cmd->add_option("--c", f.c, "weight crossover constant (> 0)");
  cmd->add_option("--j-factor", f.j_factor, "truncation multiple of n^(2-4r)");
}

void add_preset_flags(CLI::App* cmd, PresetFlags& p) {
  cmd->add_option("--family", p.name,
                  "preset: all-low, escaping, boundary, mixed, power-law");
  cmd->add_option("--parameter", p.parameter,
                  "preset parameter (factor, fraction, or decay)");
  cmd->add_option("--amplitude", p.amplitude, "norm multiple of n^-r");
}

npgof::KnRule rule_from_name(const std::string& name, const FamilyFlags& f) {
  if (name == "frequency") return npgof::kn_rule_frequency(f.r);
  if (name == "rank") return npgof::kn_rule_rank(f.r);
  if (name == "half-mass") {
    return npgof::kn_rule_half_mass(
        npgof::example_family_rule(f.r, f.gamma, f.c, 1.0, f.j_factor));
  }
  throw CLI::ValidationError("--rule",
                             "must be frequency, rank, or half-mass");
}

int cmd_validate_assumptions(const FamilyFlags& f,
                             std::vector<std::int64_t> grid) {
  if (grid.empty()) grid = {1024, 2048, 4096, 8192, 16384};
  const auto fam = npgof::example_family_rule(f.r, f.gamma, f.c, 1.0, f.j_factor);
  const auto report = npgof::validate_assumptions(fam, grid);
  const auto line = [](const char* name, const npgof::AssumptionCheck& chk) {
    std::printf("%s %s  lo=%.6g hi=%.6g  (%s)\n", chk.pass ? "PASS" : "FAIL",
                name, chk.lo, chk.hi, chk.note.c_str());
  };
  line("A1", report.a1);
  line("A2", report.a2);
  line("A3", report.a3);
  line("A4", report.a4);
  line("A5", report.a5);
  line("A6", report.a6);
  for (const std::int64_t n : grid) {
    const auto w = fam.make(n);
    std::printf("n=%lld  J=%d  k_n=%d  rho*n^2r=%.6g  k_n/n^(2-4r)=%.6g  A_n=%.6g\n",
                static_cast<long long>(n), w.J(), w.k_n,
                w.rho * std::pow(static_cast<double>(n), 2.0 * f.r),
                static_cast<double>(w.k_n) /
                    std::pow(static_cast<double>(n), 2.0 - 4.0 * f.r),
                w.a_n);
  }
  return report.a1_to_a5() ? 0 : 1;
}

int cmd_identity_check(const std::string& which, std::uint64_t seed) {
  const auto checks = npgof::run_identity_suite(seed);
  const auto matches = [&](const std::string& name) {
    if (which == "all") return true;
    if (which == "chi2") return name == "chi2-fourier-pairing";
    if (which == "cvm") return name == "cvm-spectral-bridge";
    if (which == "kernel") return name == "kernel-t1n-time-domain";
    return false;
  };
  int shown = 0;
  int failed = 0;
  for (const auto& chk : checks) {
    if (!matches(chk.name)) continue;
    ++shown;
    if (!chk.pass) ++failed;
    std::printf("%s %s  cases=%d  worst=%.3e  tol=%.0e\n",
                chk.pass ? "PASS" : "FAIL", chk.name.c_str(), chk.cases,
                chk.worst, chk.tol);
  }
  if (shown == 0) {
    std::fprintf(stderr, "identity-check: unknown group '%s'\n", which.c_str());
    return 2;
  }
  return failed == 0 ? 0 : 1;
}

int cmd_power(const std::string& config_path, const std::string& out_dir,
              int workers, bool override_reps, std::int64_t reps,
              bool override_alpha, double alpha, bool override_seed,
              std::uint64_t seed) {
  std::ifstream in(config_path);
  if (!in) {
    std::fprintf(stderr, "power: cannot read %s\n", config_path.c_str());
    return 2;
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  std::vector<npgof::ExperimentConfig> manifest;
  try {
    const auto parsed = npgof::ordered_json::parse(buffer.str());
    if (parsed.is_array()) {
      for (const auto& one : parsed) {
        manifest.push_back(npgof::config_from_json(one));
      }
    } else {
      manifest.push_back(npgof::config_from_json(parsed));
    }
  } catch (const std::exception& err) {
    std::fprintf(stderr, "power: %s\n", err.what());
    return 2;
  }
  for (auto& config : manifest) {
    if (override_reps) config.reps = reps;
    if (override_alpha) config.alpha = alpha;
    if (override_seed) config.seed = seed;
  }
  try {
    const auto outcome = npgof::run_suite(manifest, workers, out_dir);
    for (const auto& experiment : outcome.bundle["experiments"]) {
      const auto& assertion = experiment["assertion"];
      const std::string id = experiment["config"]["id"];
      if (assertion.is_null()) {
        std::printf("----  %s (no assertion)\n", id.c_str());
      } else if (assertion["pass"].get<bool>()) {
        std::printf("PASS  %s\n", id.c_str());
      } else {
        std::printf("FAIL  %s  %s\n", id.c_str(),
                    assertion["detail"].get<std::string>().c_str());
      }
    }
    std::printf("bundle: %s\n", outcome.bundle_path.c_str());
    return outcome.all_pass ? 0 : 1;
  } catch (const std::exception& err) {
    std::fprintf(stderr, "power: %s\n", err.what());
    return 2;
  }
}

int cmd_classify(const FamilyFlags& f, const PresetFlags& p,
                 const std::string& rule_name, std::vector<std::int64_t> grid,
                 std::vector<double> c2_grid) {
  if (grid.empty()) grid = {256, 1024, 4096, 16384};
  if (c2_grid.empty()) c2_grid = {0.5, 1.0, 2.0};
  const auto rule = rule_from_name(rule_name, f);
  const auto family = npgof::make_preset(p.name, f.r, Basis::cosine_half, rule,
                                         p.parameter, p.amplitude);
  const auto report = npgof::classify_family(family, rule, grid, c2_grid);
  std::printf("family=%s  rule=%s\n", family.name.c_str(),
              report.kn_rule.c_str());
  std::printf("%10s %8s %14s %14s\n", "n", "c2", "low*n^2r", "tail*n^2r");
  for (const auto& cell : report.cells) {
    std::printf("%10lld %8.3g %14.6g %14.6g\n",
                static_cast<long long>(cell.n), cell.c2, cell.low_value,
                cell.tail_value);
  }
  std::printf("verdict: %s (tau- = %.3g, tau0 = %.3g)\n",
              report.verdict.c_str(), report.tau_minus, report.tau_zero);
  return 0;
}

int cmd_purity(const FamilyFlags& f, const PresetFlags& p,
               const std::string& rule_name, std::vector<std::int64_t> grid,
               double epsilon, std::vector<double> c1_grid) {
  if (grid.empty()) grid = {256, 1024, 4096, 16384};
  if (c1_grid.empty()) c1_grid = {1.0, 2.0, 4.0, 8.0, 16.0};
  const auto rule = rule_from_name(rule_name, f);
  const auto family = npgof::make_preset(p.name, f.r, Basis::cosine_half, rule,
                                         p.parameter, p.amplitude);
  const auto report = npgof::purity_check(family, rule, grid, c1_grid, epsilon);
  for (const auto& level : report.levels) {
    if (level.achieved) {
      std::printf("epsilon=%.4g  achieved with C1=%.4g\n", level.epsilon,
                  level.c1);
    } else {
      std::printf("epsilon=%.4g  not achieved on the C1 grid\n",
                  level.epsilon);
    }
  }
  std::printf("purity trend: %s\n", report.purity_trend ? "yes" : "no");
  return 0;
}

int cmd_maxiset(const FamilyFlags& f, const PresetFlags& p,
                const std::string& rule_name, std::int64_t n,
                std::int64_t cutoff, double s) {
  const auto rule = rule_from_name(rule_name, f);
  const auto family = npgof::make_preset(p.name, f.r, Basis::cosine_half, rule,
                                         p.parameter, p.amplitude);
  const auto theta = family.theta(n);
  if (cutoff < 1) cutoff = rule(n);
  const auto split = npgof::maxiset_decompose(theta, cutoff, s);
  const auto ortho = npgof::orthogonality_check(split.f1, split.f2);
  std::printf("n=%lld  cutoff=%lld  s=%.3g\n", static_cast<long long>(n),
              static_cast<long long>(cutoff), s);
  std::printf("||theta||^2=%.6g  ||f1||^2=%.6g  ||f2||^2=%.6g\n",
              theta.norm_squared(), split.f1.norm_squared(),
              split.f2.norm_squared());
  std::printf("besov norm f1 (s=%.3g): %.6g\n", s, split.besov_norm_f1);
  std::printf("cross term=%.3e  pythagoras defect=%.3e\n", ortho.cross_term,
              ortho.pythagoras_defect);
  return 0;
}

int cmd_interaction(const FamilyFlags& f, std::int64_t n, double amp_f,
                    double amp_g, double escape_factor, double alpha,
                    std::int64_t reps, std::uint64_t seed, int workers) {
  const auto fam_rule =
      npgof::example_family_rule(f.r, f.gamma, f.c, 1.0, f.j_factor);
  const auto w = fam_rule.make(n);
  const auto rule = npgof::kn_rule_half_mass(fam_rule);
  const auto theta_f =
      npgof::family_all_low(f.r, Basis::cosine_half, amp_f).theta(n);
  const auto theta_g =
      npgof::family_escaping(f.r, Basis::cosine_half, rule, escape_factor,
                             amp_g)
          .theta(n);
  const auto res = npgof::interaction_experiment_quadratic(
      theta_f, theta_g, w, alpha, reps, seed, workers);
  std::printf("n=%lld  J=%d  k_n=%d  g at j=%lld\n",
              static_cast<long long>(n), w.J(), w.k_n,
              static_cast<long long>(theta_g.max_index()));
  std::printf("beta(f)   = %.4f\n", res.beta_f);
  std::printf("beta(f+g) = %.4f\n", res.beta_fg);
  std::printf("paired diff = %.4f +- %.4f (reps %lld)\n", res.diff,
              res.diff_half_width, static_cast<long long>(res.reps));
  return 0;
}

int cmd_demo_compactness(double rho, std::int64_t n, std::vector<int> dims,
                         double alpha, std::int64_t reps, std::uint64_t seed) {
  if (dims.empty()) dims = {1, 100, 10000};
  std::printf("mixture over J unit directions (rho=%.3g, n=%lld):\n", rho,
              static_cast<long long>(n));
  for (const int J : dims) {
    const double power =
        npgof::mixture_test_power(rho, n, 1.0, J, alpha, reps, seed);
    std::printf("  J=%-8d power=%.4f\n", J, power);
  }
  std::printf("ellipsoid a_j = 1/j at rho=0.5 (n=%lld):\n",
              static_cast<long long>(n));
  const auto rows = npgof::ellipsoid_direction_powers(
      [](std::int64_t j) { return 1.0 / static_cast<double>(j); }, 0.5, n, 1.0,
      {1, 2, 3, 10}, alpha, reps, seed);
  for (const auto& row : rows) {
    std::printf("  j=%-4lld amplitude=%.4g %s power=%.4f\n",
                static_cast<long long>(row.j), row.amplitude,
                row.feasible ? "feasible  " : "infeasible", row.power);
  }
  return 0;
}

int cmd_calibrate_cvm(double alpha, int J, std::int64_t draws,
                      std::uint64_t seed, int workers,
                      const std::string& out_path) {
  const auto critical =
      npgof::calibrate_cvm_critical(alpha, J, draws, seed, workers);
  std::printf("alpha=%.4g  J=%d  draws=%lld  seed=%llu  x_alpha=%.10g\n",
              critical.alpha, critical.J,
              static_cast<long long>(critical.draws),
              static_cast<unsigned long long>(critical.seed),
              critical.x_alpha);
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
      std::fprintf(stderr, "calibrate-cvm: cannot open %s\n",
                   out_path.c_str());
      return 2;
    }
    npgof::write_cvm_cache(out, {critical});
    std::printf("cache: %s\n", out_path.c_str());
  }
  return 0;
}

int cmd_accept(std::uint64_t seed, int workers, const std::string& out_path) {
  const auto results = npgof::run_acceptance(seed, workers);
  int failed = 0;
  for (const auto& r : results) {
    std::printf("%s %-24s %7.1f s  %s\n", r.pass ? "PASS" : "FAIL",
                r.name.c_str(), static_cast<double>(r.runtime_ms) / 1000.0,
                r.detail.c_str());
    if (!r.pass) ++failed;
  }
  std::printf("acceptance: %zu/%zu criteria passed\n",
              results.size() - static_cast<std::size_t>(failed),
              results.size());
  if (!out_path.empty()) {
    npgof::ordered_json report;
    report["schema"] = "npgof-acceptance/1";
    report["seed"] = seed;
    report["criteria"] = npgof::ordered_json::array();
    for (const auto& r : results) {
      report["criteria"].push_back({{"name", r.name},
                                    {"pass", r.pass},
                                    {"detail", r.detail},
                                    {"runtime_ms", r.runtime_ms}});
    }
    report["all_pass"] = failed == 0;
    std::ofstream out(out_path, std::ios::binary);
    if (!out) {
      std::fprintf(stderr, "accept: cannot open %s\n", out_path.c_str());
      return 2;
    }
    out << report.dump(2) << "\n";
    std::printf("report: %s\n", out_path.c_str());
  }
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nonparametric hypothesis-testing laboratory"};
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = 1729;
  std::int64_t reps = 20000;
  double alpha = 0.05;
  int workers = 1;
  std::string out_path;
  std::string config_path;
  auto* seed_opt = app.add_option("--seed", seed, "master random seed");
  auto* reps_opt = app.add_option("--reps", reps, "Monte Carlo replications");
  auto* alpha_opt = app.add_option("--alpha", alpha, "test level in (0,1)");
  app.add_option("--workers", workers, "worker threads (results unchanged)");
  app.add_option("--out", out_path, "output path (file or directory)");
  app.add_option("--config", config_path, "experiment config JSON");

  FamilyFlags va_fam;
  std::vector<std::int64_t> va_grid;
  auto* va = app.add_subcommand("validate-assumptions",
                                "check A1-A6 for the example weight family");
  add_family_flags(va, va_fam);
  va->add_option("--n", va_grid, "sample-size grid (repeatable)");

  std::string id_which = "all";
  auto* id = app.add_subcommand("identity-check",
                                "re-derive a spectral identity by quadrature");
  id->add_option("group", id_which, "chi2, cvm, kernel, or all");

  auto* pw = app.add_subcommand("power",
                                "run experiment configs and write bundle+CSV");

  FamilyFlags cl_fam;
  PresetFlags cl_preset;
  std::string cl_rule = "frequency";
  std::vector<std::int64_t> cl_grid;
  std::vector<double> cl_c2;
  auto* cl = app.add_subcommand("classify",
                                "low-frequency-mass trend of a family");
  add_family_flags(cl, cl_fam);
  add_preset_flags(cl, cl_preset);
  cl->add_option("--rule", cl_rule, "k_n rule: frequency, rank, half-mass");
  cl->add_option("--n", cl_grid, "sample-size grid (repeatable)");
  cl->add_option("--c2", cl_c2, "window constants (repeatable)");

  FamilyFlags pu_fam;
  PresetFlags pu_preset;
  std::string pu_rule = "frequency";
  std::vector<std::int64_t> pu_grid;
  std::vector<double> pu_c1;
  double pu_epsilon = 0.1;
  auto* pu = app.add_subcommand("purity", "tail-mass purity ladder");
  add_family_flags(pu, pu_fam);
  add_preset_flags(pu, pu_preset);
  pu->add_option("--rule", pu_rule, "k_n rule: frequency, rank, half-mass");
  pu->add_option("--n", pu_grid, "sample-size grid (repeatable)");
  pu->add_option("--c1", pu_c1, "tail-window constants (repeatable)");
  pu->add_option("--epsilon", pu_epsilon, "top of the epsilon ladder");

  FamilyFlags mx_fam;
  PresetFlags mx_preset;
  std::string mx_rule = "frequency";
  std::int64_t mx_n = 4096;
  std::int64_t mx_cutoff = 0;
  double mx_s = 0.5;
  auto* mx = app.add_subcommand("maxiset",
                                "split a family at a frequency cutoff");
  add_family_flags(mx, mx_fam);
  add_preset_flags(mx, mx_preset);
  mx->add_option("--rule", mx_rule, "k_n rule: frequency, rank, half-mass");
  mx->add_option("--n", mx_n, "sample size");
  mx->add_option("--cutoff", mx_cutoff, "split index (default k_n)");
  mx->add_option("--s", mx_s, "smoothness for the Besov tail norm");

  FamilyFlags in_fam;
  in_fam.r = 0.3;
  in_fam.j_factor = 16;
  std::int64_t in_n = 4096;
  double in_amp_f = 1.4;
  double in_amp_g = 1.5;
  double in_escape = 10.0;
  auto* in = app.add_subcommand(
      "interaction", "paired type II errors for f versus f plus escaping g");
  add_family_flags(in, in_fam);
  in->add_option("--n", in_n, "sample size");
  in->add_option("--amp-f", in_amp_f, "detectable-arm amplitude");
  in->add_option("--amp-g", in_amp_g, "escaping-arm amplitude");
  in->add_option("--escape-factor", in_escape, "g sits at factor * k_n");

  double dc_rho = 0.15;
  std::int64_t dc_n = 100;
  std::vector<int> dc_dims;
  auto* dc = app.add_subcommand("demo-compactness",
                                "mixture decay and ellipsoid directions");
  dc->add_option("--rho", dc_rho, "alternative norm");
  dc->add_option("--n", dc_n, "sample size");
  dc->add_option("--dim", dc_dims, "mixture dimensions (repeatable)");

  int cv_j = 1024;
  std::int64_t cv_draws = 200000;
  auto* cv = app.add_subcommand("calibrate-cvm",
                                "Monte Carlo critical value for n T^2");
  cv->add_option("--j", cv_j, "limit-series truncation");
  cv->add_option("--draws", cv_draws, "calibration draws");

  auto* ac = app.add_subcommand("accept", "run the acceptance criteria");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*va) return cmd_validate_assumptions(va_fam, va_grid);
    if (*id) return cmd_identity_check(id_which, seed);
    if (*pw) {
      if (config_path.empty()) {
        std::fprintf(stderr, "power: --config is required\n");
        return 2;
      }
      return cmd_power(config_path, out_path.empty() ? "results" : out_path,
                       workers, reps_opt->count() > 0, reps,
                       alpha_opt->count() > 0, alpha, seed_opt->count() > 0,
                       seed);
    }
    if (*cl) return cmd_classify(cl_fam, cl_preset, cl_rule, cl_grid, cl_c2);
    if (*pu) {
      return cmd_purity(pu_fam, pu_preset, pu_rule, pu_grid, pu_epsilon,
                        pu_c1);
    }
    if (*mx) {
      return cmd_maxiset(mx_fam, mx_preset, mx_rule, mx_n, mx_cutoff, mx_s);
    }
    if (*in) {
      return cmd_interaction(in_fam, in_n, in_amp_f, in_amp_g, in_escape,
                             alpha, reps, seed, workers);
    }
    if (*dc) return cmd_demo_compactness(dc_rho, dc_n, dc_dims, alpha, reps, seed);
    if (*cv) return cmd_calibrate_cvm(alpha, cv_j, cv_draws, seed, workers, out_path);
    if (*ac) return cmd_accept(seed, workers, out_path);
  } catch (const std::exception& err) {
    std::fprintf(stderr, "nplab: %s\n", err.what());
    return 2;
  }
  return 2;
}
