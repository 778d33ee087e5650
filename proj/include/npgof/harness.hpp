#pragma once
// Experiment orchestration: declarative experiment configs with a strict
// JSON schema, per-statistic Monte Carlo drivers for type I / type II error
// estimation, suite execution with per-experiment CSV tables and a single
// schema-versioned JSON bundle. Output bytes are a pure function of
// (manifest, seed) aside from the timing fields.

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "npgof/chi_squared.hpp"
#include "npgof/classify.hpp"
#include "npgof/cvm.hpp"
#include "npgof/families.hpp"
#include "npgof/kernel.hpp"
#include "npgof/montecarlo.hpp"
#include "npgof/quadratic.hpp"
#include "npgof/sequence_model.hpp"

namespace npgof {

using ordered_json = nlohmann::ordered_json;

inline constexpr const char* kConfigSchema = "npgof-config/1";
inline constexpr const char* kResultSchema = "npgof-results/1";
inline constexpr const char* kCsvHeader =
    "experiment,n,alpha_hat,alpha_lo,alpha_hi,beta_hat,beta_lo,beta_hi,"
    "prediction";

// Single source for every tunable constant: thresholds, panel counts, and
// the per-statistic parameter defaults a config may override.
inline const ordered_json& harness_defaults() {
  static const ordered_json table = {
      {"tau_minus", 0.1},
      {"tau_zero", 0.01},
      {"wilson_z", 1.96},
      {"mc_block", kMcBlockSize},
      {"quadrature_panels", 64},
      {"statistics",
       {{"quadratic",
         {{"r", 0.25},
          {"gamma", 2.0},
          {"c", 1.0},
          {"sigma", 1.0},
          {"j_factor", 4.0}}},
        {"kernel",
         {{"r", 0.25},
          {"sigma", 1.0},
          {"h_coeff", 1.0},
          {"h_exponent", 1.0},
          {"j_override", 0.0}}},
        {"chi2", {{"r", 0.375}, {"m", 0.0}, {"cell_coeff", 1.0}}},
        {"cvm",
         {{"r", 0.25},
          {"calib_draws", 200000.0},
          {"calib_j", 1024.0},
          {"predict_draws", 20000.0},
          {"predict_j", 2000.0}}}}}};
  return table;
}

struct SuiteAssertion {
  std::string kind;  // alpha-within | beta-matches-prediction |
                     // power-minus-alpha-at-least | power-near-alpha
  double tol = 0.0;
  double value = 0.0;
};

struct ExperimentConfig {
  std::string id;
  std::string statistic;       // quadratic | kernel | chi2 | cvm
  std::string kernel_shape = "uniform";  // kernel statistic only
  std::string family = "none";
  double family_parameter = 0.0;
  double amplitude = 1.0;
  std::vector<std::int64_t> n_grid;
  std::int64_t reps = 0;
  double alpha = 0.05;
  std::uint64_t seed = 0;
  std::map<std::string, double> params;
  std::optional<SuiteAssertion> assertion;

  double param(const std::string& key) const {
    const auto it = params.find(key);
    if (it == params.end()) {
      throw std::logic_error("ExperimentConfig: missing parameter " + key);
    }
    return it->second;
  }
};

namespace detail {

[[noreturn]] inline void config_error(const std::string& field,
                                      const std::string& message) {
  throw std::invalid_argument("config." + field + ": " + message);
}

inline bool valid_id(const std::string& id) {
  if (id.empty()) return false;
  for (const char ch : id) {
    const bool ok = std::isalnum(static_cast<unsigned char>(ch)) != 0 ||
                    ch == '-' || ch == '_' || ch == '.';
    if (!ok) return false;
  }
  return true;
}

inline void fill_params(ExperimentConfig& config, const ordered_json& given) {
  const auto& table = harness_defaults().at("statistics").at(config.statistic);
  for (const auto& [key, value] : given.items()) {
    if (!table.contains(key)) {
      config_error("params." + key,
                   "unknown parameter for statistic '" + config.statistic + "'");
    }
    if (!value.is_number()) {
      config_error("params." + key, "must be a number");
    }
    config.params[key] = value.get<double>();
  }
  for (const auto& [key, value] : table.items()) {
    config.params.emplace(key, value.get<double>());
  }
}

inline double number_field(const ordered_json& j, const std::string& field) {
  if (!j.at(field).is_number()) config_error(field, "must be a number");
  return j.at(field).get<double>();
}

}  // namespace detail

inline ordered_json to_json(const ExperimentConfig& config) {
  ordered_json j;
  j["schema"] = kConfigSchema;
  j["id"] = config.id;
  j["statistic"] = config.statistic;
  if (config.statistic == "kernel") j["kernel"] = config.kernel_shape;
  j["family"] = config.family;
  j["family_parameter"] = config.family_parameter;
  j["amplitude"] = config.amplitude;
  j["n_grid"] = config.n_grid;
  j["reps"] = config.reps;
  j["alpha"] = config.alpha;
  j["seed"] = config.seed;
  j["params"] = config.params;  // std::map: keys serialize sorted
  if (config.assertion) {
    j["assert"] = {{"kind", config.assertion->kind},
                   {"tol", config.assertion->tol},
                   {"value", config.assertion->value}};
  }
  return j;
}

inline ExperimentConfig config_from_json(const ordered_json& j) {
  if (!j.is_object()) detail::config_error("<root>", "must be an object");
  static const std::vector<std::string> known = {
      "schema", "id",    "statistic", "kernel", "family", "family_parameter",
      "amplitude", "n_grid", "reps",   "alpha",  "seed",   "params",
      "assert"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      detail::config_error(key, "unknown field");
    }
  }
  for (const char* field : {"schema", "id", "statistic", "n_grid", "reps",
                            "alpha", "seed"}) {
    if (!j.contains(field)) detail::config_error(field, "missing");
  }
  ExperimentConfig config;
  if (j.at("schema") != kConfigSchema) {
    detail::config_error("schema", "expected " + std::string(kConfigSchema));
  }
  config.id = j.at("id").get<std::string>();
  if (!detail::valid_id(config.id)) {
    detail::config_error("id", "must be nonempty [A-Za-z0-9._-]");
  }
  config.statistic = j.at("statistic").get<std::string>();
  if (config.statistic != "quadratic" && config.statistic != "kernel" &&
      config.statistic != "chi2" && config.statistic != "cvm") {
    detail::config_error("statistic",
                         "must be quadratic, kernel, chi2, or cvm");
  }
  if (j.contains("kernel")) {
    if (config.statistic != "kernel") {
      detail::config_error("kernel", "only valid for the kernel statistic");
    }
    config.kernel_shape = j.at("kernel").get<std::string>();
    if (config.kernel_shape != "uniform" &&
        config.kernel_shape != "epanechnikov") {
      detail::config_error("kernel", "must be uniform or epanechnikov");
    }
  }
  if (j.contains("family")) config.family = j.at("family").get<std::string>();
  if (config.family != "none" && config.family != "all-low" &&
      config.family != "escaping" && config.family != "boundary" &&
      config.family != "mixed" && config.family != "power-law") {
    detail::config_error("family", "unknown preset");
  }
  if (j.contains("family_parameter")) {
    config.family_parameter = detail::number_field(j, "family_parameter");
    if (config.family_parameter < 0.0) {
      detail::config_error("family_parameter", "must be >= 0");
    }
  }
  if (j.contains("amplitude")) {
    config.amplitude = detail::number_field(j, "amplitude");
    if (!(config.amplitude > 0.0)) {
      detail::config_error("amplitude", "must be > 0");
    }
  }
  if (!j.at("n_grid").is_array() || j.at("n_grid").empty()) {
    detail::config_error("n_grid", "must be a nonempty array");
  }
  for (const auto& item : j.at("n_grid")) {
    if (!item.is_number_integer() || item.get<std::int64_t>() < 2) {
      detail::config_error("n_grid", "entries must be integers >= 2");
    }
    config.n_grid.push_back(item.get<std::int64_t>());
  }
  if (!j.at("reps").is_number_integer() || j.at("reps").get<std::int64_t>() < 1) {
    detail::config_error("reps", "must be a positive integer");
  }
  config.reps = j.at("reps").get<std::int64_t>();
  config.alpha = detail::number_field(j, "alpha");
  if (!(config.alpha > 0.0 && config.alpha < 1.0)) {
    detail::config_error("alpha", "must lie in (0, 1)");
  }
  if (!j.at("seed").is_number_unsigned() && !j.at("seed").is_number_integer()) {
    detail::config_error("seed", "must be an unsigned integer");
  }
  if (j.at("seed").is_number_integer() && j.at("seed").get<std::int64_t>() < 0) {
    detail::config_error("seed", "must be an unsigned integer");
  }
  config.seed = j.at("seed").get<std::uint64_t>();
  detail::fill_params(config, j.contains("params") ? j.at("params")
                                                   : ordered_json::object());
  if (j.contains("assert")) {
    const auto& a = j.at("assert");
    if (!a.is_object() || !a.contains("kind")) {
      detail::config_error("assert", "must be an object with a kind");
    }
    SuiteAssertion assertion;
    assertion.kind = a.at("kind").get<std::string>();
    if (assertion.kind != "alpha-within" &&
        assertion.kind != "beta-matches-prediction" &&
        assertion.kind != "power-minus-alpha-at-least" &&
        assertion.kind != "power-near-alpha") {
      detail::config_error("assert.kind", "unknown assertion kind");
    }
    if (a.contains("tol")) assertion.tol = a.at("tol").get<double>();
    if (a.contains("value")) assertion.value = a.at("value").get<double>();
    config.assertion = assertion;
  }
  return config;
}

inline ExperimentConfig config_from_string(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") +
                                err.what());
  }
  return config_from_json(j);
}

struct GridPointResult {
  std::int64_t n = 0;
  PowerEstimate alpha_hat;
  std::optional<PowerEstimate> beta_hat;
  double prediction = std::numeric_limits<double>::quiet_NaN();
  ordered_json metadata;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<GridPointResult> points;
};

namespace detail {

// Preset placement scale for the alternative family of each statistic.
inline KnRule family_rule_for(const ExperimentConfig& config) {
  const double r = config.param("r");
  if (config.statistic == "quadratic") {
    const double gamma = config.param("gamma");
    const double c = config.param("c");
    const double sigma = config.param("sigma");
    const int j_factor = static_cast<int>(config.param("j_factor"));
    return kn_rule_half_mass(
        example_family_rule(r, gamma, c, sigma, j_factor));
  }
  if (config.statistic == "cvm") return kn_rule_rank(r);
  return kn_rule_frequency(r);
}

// Basis per statistic: the quadratic test lives on the real sequence model
// and the classical statistic is calibrated on the cosine ladder; kernel and
// chi2 work on trig densities; cvm spectra are cosine by construction.
inline std::optional<AlternativeFamily> family_for(
    const ExperimentConfig& config) {
  if (config.family == "none") return std::nullopt;
  const Basis basis =
      config.statistic == "kernel" || config.statistic == "chi2"
          ? Basis::trig_complex
          : Basis::cosine_half;
  return make_preset(config.family, config.param("r"), basis,
                     family_rule_for(config), config.family_parameter,
                     config.amplitude);
}

inline std::uint64_t arm_key(const ExperimentConfig& config,
                             const std::string& arm, std::int64_t n) {
  const std::uint64_t experiment_key = derive_key(config.seed, config.id);
  return derive_key(experiment_key, arm + ":n=" + std::to_string(n));
}

inline void require_support_fits(const CoefficientVector& theta, int J,
                                 const std::string& knob) {
  if (theta.max_index() > J) {
    config_error(knob, "family support " + std::to_string(theta.max_index()) +
                           " exceeds the truncation J = " + std::to_string(J));
  }
}

inline GridPointResult quadratic_grid_point(const ExperimentConfig& config,
                                            std::int64_t n, int workers) {
  const auto weights =
      example_family_rule(config.param("r"), config.param("gamma"),
                          config.param("c"), config.param("sigma"),
                          static_cast<int>(config.param("j_factor")))
          .make(n);
  GridPointResult point;
  point.n = n;
  point.metadata = {{"J", weights.J()},
                    {"k_n", weights.k_n},
                    {"rho", weights.rho},
                    {"a_n", weights.a_n}};
  const CoefficientVector null_theta(Basis::cosine_half);
  const std::uint64_t key0 = arm_key(config, "h0", n);
  point.alpha_hat = estimate_power(
      config.reps, workers, config.seed, [&](std::int64_t rep) {
        auto rng = replication_stream(key0, static_cast<std::uint64_t>(rep));
        const auto obs = sample_sequence_observation_stream(
            null_theta, n, weights.sigma, weights.J(), rng);
        return quadratic_decide(obs, weights, config.alpha).reject;
      });
  if (const auto family = family_for(config)) {
    const CoefficientVector theta = family->theta(n);
    require_support_fits(theta, weights.J(), "params.j_factor");
    const auto drift = noncentrality(theta, weights);
    point.prediction =
        quadratic_power_formula(drift.r_n, drift.a_n, config.alpha);
    point.metadata["support_max"] = theta.max_index();
    const std::uint64_t key1 = arm_key(config, "h1", n);
    point.beta_hat = estimate_power(
        config.reps, workers, config.seed, [&](std::int64_t rep) {
          auto rng = replication_stream(key1, static_cast<std::uint64_t>(rep));
          const auto obs = sample_sequence_observation_stream(
              theta, n, weights.sigma, weights.J(), rng);
          return !quadratic_decide(obs, weights, config.alpha).reject;
        });
  }
  return point;
}

inline GridPointResult kernel_grid_point(const ExperimentConfig& config,
                                         std::int64_t n, int workers) {
  const double h = config.param("h_coeff") *
                   std::pow(static_cast<double>(n), -config.param("h_exponent"));
  const Kernel shape = config.kernel_shape == "epanechnikov"
                           ? Kernel::epanechnikov()
                           : Kernel::uniform();
  const int j_override = static_cast<int>(config.param("j_override"));
  const auto plan = KernelPlan::make(shape, h, n, config.param("sigma"),
                                     j_override > 0 ? j_override : -1);
  GridPointResult point;
  point.n = n;
  point.metadata = {{"h", h}, {"J", plan.J}, {"gamma", plan.gamma}};
  const CoefficientVector null_theta(Basis::trig_complex);
  const std::uint64_t key0 = arm_key(config, "h0", n);
  point.alpha_hat = estimate_power(
      config.reps, workers, config.seed, [&](std::int64_t rep) {
        auto rng = replication_stream(key0, static_cast<std::uint64_t>(rep));
        const auto obs = sample_sequence_observation_stream(
            null_theta, n, plan.sigma, plan.J, rng);
        return kernel_decide(obs, plan, config.alpha).reject;
      });
  if (const auto family = family_for(config)) {
    const CoefficientVector theta = family->theta(n);
    require_support_fits(theta, plan.J, "params.j_override");
    point.prediction = kernel_power_formula(theta, plan, config.alpha);
    point.metadata["support_max"] = theta.max_index();
    const std::uint64_t key1 = arm_key(config, "h1", n);
    point.beta_hat = estimate_power(
        config.reps, workers, config.seed, [&](std::int64_t rep) {
          auto rng = replication_stream(key1, static_cast<std::uint64_t>(rep));
          const auto obs = sample_sequence_observation_stream(
              theta, n, plan.sigma, plan.J, rng);
          return !kernel_decide(obs, plan, config.alpha).reject;
        });
  }
  return point;
}

inline GridPointResult chi2_grid_point(const ExperimentConfig& config,
                                       std::int64_t n, int workers) {
  const int m_param = static_cast<int>(config.param("m"));
  const int m = m_param > 0
                    ? m_param
                    : default_cell_count(n, config.param("r"),
                                         config.param("cell_coeff"));
  GridPointResult point;
  point.n = n;
  point.metadata = {{"m", m}};
  const std::uint64_t key0 = arm_key(config, "h0", n);
  point.alpha_hat = estimate_power(
      config.reps, workers, config.seed, [&](std::int64_t rep) {
        auto rng = replication_stream(key0, static_cast<std::uint64_t>(rep));
        CellHistogram hist;
        hist.m = m;
        hist.n = n;
        hist.counts.assign(static_cast<std::size_t>(m), 0);
        for (std::int64_t i = 0; i < n; ++i) {
          const auto cell = std::min<std::int64_t>(
              static_cast<std::int64_t>(rng.uniform() * m), m - 1);
          ++hist.counts[static_cast<std::size_t>(cell)];
        }
        return chi2_decide(hist, config.alpha).reject;
      });
  if (const auto family = family_for(config)) {
    const CoefficientVector theta = family->theta(n);
    point.prediction = chi2_power_formula(theta, m, n, config.alpha);
    point.metadata["support_max"] = theta.max_index();
    const DensitySpec density(theta);
    const std::uint64_t key1 = arm_key(config, "h1", n);
    point.beta_hat = estimate_power(
        config.reps, workers, config.seed, [&](std::int64_t rep) {
          const auto sample = sample_density_iid(
              density, n, derive_key(key1, static_cast<std::uint64_t>(rep)));
          return !chi2_decide(sample, m, config.alpha).reject;
        });
  }
  return point;
}

inline GridPointResult cvm_grid_point(const ExperimentConfig& config,
                                      std::int64_t n, int workers,
                                      const CvmCriticalValue& critical) {
  GridPointResult point;
  point.n = n;
  point.metadata = {{"x_alpha", critical.x_alpha},
                    {"calib_j", critical.J},
                    {"calib_draws", critical.draws}};
  const std::uint64_t key0 = arm_key(config, "h0", n);
  point.alpha_hat = estimate_power(
      config.reps, workers, config.seed, [&](std::int64_t rep) {
        auto rng = replication_stream(key0, static_cast<std::uint64_t>(rep));
        std::vector<double> sample(static_cast<std::size_t>(n));
        for (auto& x : sample) x = rng.uniform();
        return cvm_decide(sample, critical).reject;
      });
  if (const auto family = family_for(config)) {
    const CoefficientVector theta = family->theta(n);
    point.metadata["support_max"] = theta.max_index();
    // Prediction: type II error of the limit experiment, sampled from the
    // shifted bridge law at the calibrated threshold.
    const auto predict_draws =
        static_cast<std::int64_t>(config.param("predict_draws"));
    const int predict_j = static_cast<int>(config.param("predict_j"));
    require_support_fits(theta, predict_j, "params.predict_j");
    const std::uint64_t key_pred = arm_key(config, "predict", n);
    const std::int64_t limit_rejects = mc_rejection_count(
        predict_draws, workers, [&](std::int64_t rep) {
          auto rng =
              replication_stream(key_pred, static_cast<std::uint64_t>(rep));
          return bridge_limit_sample_stream(theta, n, predict_j, rng) >
                 critical.x_alpha;
        });
    point.prediction = 1.0 - static_cast<double>(limit_rejects) /
                                 static_cast<double>(predict_draws);
    const DensitySpec density(theta);
    const std::uint64_t key1 = arm_key(config, "h1", n);
    point.beta_hat = estimate_power(
        config.reps, workers, config.seed, [&](std::int64_t rep) {
          const auto sample = sample_density_iid(
              density, n, derive_key(key1, static_cast<std::uint64_t>(rep)));
          return !cvm_decide(sample, critical).reject;
        });
  }
  return point;
}

}  // namespace detail

// Type I error under the null and, when an alternative family is declared,
// type II error plus the theoretical prediction at every grid point.
inline ExperimentResult estimate_errors(const ExperimentConfig& config,
                                        int workers = 1) {
  if (config.reps < 1000) {
    detail::config_error("reps", "estimate_errors needs at least 1000");
  }
  if (workers < 1) {
    throw std::invalid_argument("estimate_errors: workers must be >= 1");
  }
  ExperimentResult result;
  result.config = config;
  std::optional<CvmCriticalValue> critical;
  if (config.statistic == "cvm") {
    critical = calibrate_cvm_critical(
        config.alpha, static_cast<int>(config.param("calib_j")),
        static_cast<std::int64_t>(config.param("calib_draws")),
        derive_key(config.seed, config.id + ":cvm-calibration"), workers);
  }
  for (const std::int64_t n : config.n_grid) {
    if (config.statistic == "quadratic") {
      result.points.push_back(detail::quadratic_grid_point(config, n, workers));
    } else if (config.statistic == "kernel") {
      result.points.push_back(detail::kernel_grid_point(config, n, workers));
    } else if (config.statistic == "chi2") {
      result.points.push_back(detail::chi2_grid_point(config, n, workers));
    } else {
      result.points.push_back(
          detail::cvm_grid_point(config, n, workers, *critical));
    }
  }
  return result;
}

struct AssertionOutcome {
  bool pass = true;
  std::string detail;
};

inline AssertionOutcome evaluate_assertion(const ExperimentResult& result) {
  AssertionOutcome outcome;
  if (!result.config.assertion) return outcome;
  const auto& rule = *result.config.assertion;
  std::ostringstream note;
  for (const auto& point : result.points) {
    if (rule.kind == "alpha-within") {
      const double gap =
          std::abs(point.alpha_hat.estimate - result.config.alpha);
      if (gap > rule.tol) {
        outcome.pass = false;
        note << "n=" << point.n << " |alpha_hat-alpha|=" << gap << " > "
             << rule.tol << "; ";
      }
      continue;
    }
    if (!point.beta_hat) {
      outcome.pass = false;
      note << "n=" << point.n << " no alternative arm; ";
      continue;
    }
    const double beta = point.beta_hat->estimate;
    if (rule.kind == "beta-matches-prediction") {
      const double gap = std::abs(beta - point.prediction);
      if (!(gap <= rule.tol)) {
        outcome.pass = false;
        note << "n=" << point.n << " |beta-prediction|=" << gap << " > "
             << rule.tol << "; ";
      }
    } else if (rule.kind == "power-minus-alpha-at-least") {
      const double excess = (1.0 - beta) - result.config.alpha;
      if (excess < rule.value) {
        outcome.pass = false;
        note << "n=" << point.n << " power-alpha=" << excess << " < "
             << rule.value << "; ";
      }
    } else {  // power-near-alpha
      const double gap = std::abs((1.0 - beta) - result.config.alpha);
      if (gap > rule.tol) {
        outcome.pass = false;
        note << "n=" << point.n << " |power-alpha|=" << gap << " > "
             << rule.tol << "; ";
      }
    }
  }
  outcome.detail = note.str();
  return outcome;
}

namespace detail {

inline std::string csv_number(double value) {
  if (!std::isfinite(value)) return "";
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

inline ordered_json estimate_to_json(const PowerEstimate& estimate) {
  return {{"rejections", estimate.rejections}, {"reps", estimate.reps},
          {"estimate", estimate.estimate},     {"ci_low", estimate.ci_low},
          {"ci_high", estimate.ci_high},       {"seed", estimate.seed},
          {"runtime_ms", estimate.runtime_ms}};
}

}  // namespace detail

inline ordered_json result_to_json(const ExperimentResult& result) {
  ordered_json points = ordered_json::array();
  for (const auto& point : result.points) {
    ordered_json p;
    p["n"] = point.n;
    p["alpha"] = detail::estimate_to_json(point.alpha_hat);
    p["beta"] = point.beta_hat
                    ? detail::estimate_to_json(*point.beta_hat)
                    : ordered_json(nullptr);
    p["prediction"] = std::isfinite(point.prediction)
                          ? ordered_json(point.prediction)
                          : ordered_json(nullptr);
    p["metadata"] = point.metadata;
    points.push_back(std::move(p));
  }
  const auto outcome = evaluate_assertion(result);
  ordered_json j;
  j["config"] = to_json(result.config);
  j["points"] = std::move(points);
  j["assertion"] =
      result.config.assertion
          ? ordered_json{{"kind", result.config.assertion->kind},
                         {"pass", outcome.pass},
                         {"detail", outcome.detail}}
          : ordered_json(nullptr);
  return j;
}

inline std::string result_to_csv(const ExperimentResult& result) {
  std::ostringstream out;
  out << kCsvHeader << "\n";
  for (const auto& point : result.points) {
    out << result.config.id << "," << point.n << ","
        << detail::csv_number(point.alpha_hat.estimate) << ","
        << detail::csv_number(point.alpha_hat.ci_low) << ","
        << detail::csv_number(point.alpha_hat.ci_high) << ",";
    if (point.beta_hat) {
      out << detail::csv_number(point.beta_hat->estimate) << ","
          << detail::csv_number(point.beta_hat->ci_low) << ","
          << detail::csv_number(point.beta_hat->ci_high) << ",";
    } else {
      out << ",,,";
    }
    out << detail::csv_number(point.prediction) << "\n";
  }
  return out.str();
}

// Recursively drop timing fields; used for the determinism contract
// ("byte-identical modulo timing").
inline ordered_json strip_timing(const ordered_json& j) {
  if (j.is_object()) {
    ordered_json out = ordered_json::object();
    for (const auto& [key, value] : j.items()) {
      if (key == "runtime_ms" || key == "total_ms" || key == "timing") continue;
      out[key] = strip_timing(value);
    }
    return out;
  }
  if (j.is_array()) {
    ordered_json out = ordered_json::array();
    for (const auto& value : j) out.push_back(strip_timing(value));
    return out;
  }
  return j;
}

struct SuiteOutcome {
  ordered_json bundle;
  bool all_pass = true;
  std::vector<std::string> csv_paths;
  std::string bundle_path;
};

// Run every experiment in the manifest, write <out_dir>/<id>.csv per
// experiment plus <out_dir>/bundle.json, and report assertion status.
inline SuiteOutcome run_suite(const std::vector<ExperimentConfig>& manifest,
                              int workers, const std::string& out_dir) {
  if (manifest.empty()) {
    throw std::invalid_argument("run_suite: manifest must be nonempty");
  }
  const auto start = std::chrono::steady_clock::now();
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) {
    throw std::runtime_error("run_suite: cannot create output directory " +
                             out_dir + ": " + ec.message());
  }
  SuiteOutcome outcome;
  outcome.bundle["schema"] = kResultSchema;
  outcome.bundle["experiments"] = ordered_json::array();
  for (const auto& config : manifest) {
    const auto result = estimate_errors(config, workers);
    outcome.all_pass = outcome.all_pass && evaluate_assertion(result).pass;
    outcome.bundle["experiments"].push_back(result_to_json(result));
    const auto csv_path =
        (std::filesystem::path(out_dir) / (config.id + ".csv")).string();
    std::ofstream csv(csv_path, std::ios::binary);
    if (!csv) throw std::runtime_error("run_suite: cannot open " + csv_path);
    csv << result_to_csv(result);
    if (!csv.flush()) {
      throw std::runtime_error("run_suite: write failed for " + csv_path);
    }
    outcome.csv_paths.push_back(csv_path);
  }
  outcome.bundle["all_pass"] = outcome.all_pass;
  outcome.bundle["timing"] = {
      {"workers", workers},
      {"total_ms", std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - start)
                       .count()}};
  outcome.bundle_path =
      (std::filesystem::path(out_dir) / "bundle.json").string();
  std::ofstream bundle(outcome.bundle_path, std::ios::binary);
  if (!bundle) {
    throw std::runtime_error("run_suite: cannot open " + outcome.bundle_path);
  }
  bundle << outcome.bundle.dump(2) << "\n";
  if (!bundle.flush()) {
    throw std::runtime_error("run_suite: write failed for " +
                             outcome.bundle_path);
  }
  return outcome;
}

}  // namespace npgof
