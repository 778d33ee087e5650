#include <catch2/catch_amalgamated.hpp>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "npgof/cvm.hpp"
#include "npgof/identities.hpp"
#include "npgof/quadrature.hpp"
#include "npgof/rng.hpp"
#include "npgof/sequence_model.hpp"

namespace {

using npgof::Basis;
using npgof::CoefficientVector;

CoefficientVector random_cosine(int degree, std::uint64_t stream, double scale) {
  return npgof::random_coefficients(Basis::cosine_half, degree,
                                    npgof::derive_key(29, "cvm-test"), stream,
                                    scale);
}

// Brute Riemann oracle for the sample statistic on a fine grid.
double n_t_squared_by_grid(std::vector<double> sample, int grid) {
  std::sort(sample.begin(), sample.end());
  const auto n = static_cast<double>(sample.size());
  double sum = 0.0;
  for (int g = 0; g < grid; ++g) {
    const double t = (g + 0.5) / grid;
    const auto below = std::upper_bound(sample.begin(), sample.end(), t) -
                       sample.begin();
    const double gap = static_cast<double>(below) / n - t;
    sum += gap * gap;
  }
  return n * sum / grid;
}

TEST_CASE("cvm statistic closed forms") {
  const auto single = npgof::cvm_statistic({0.5});
  CHECK(single.n == 1);
  CHECK(single.n_t_squared == Catch::Approx(1.0 / 12.0).epsilon(1e-15));

  // Equispaced grid attains the minimum 1/(12n).
  for (const int n : {4, 9, 50}) {
    std::vector<double> grid;
    for (int i = 1; i <= n; ++i) grid.push_back((2.0 * i - 1.0) / (2.0 * n));
    CHECK(npgof::cvm_statistic(grid).n_t_squared ==
          Catch::Approx(1.0 / (12.0 * n)).epsilon(1e-13));
  }

  CHECK_THROWS_AS(npgof::cvm_statistic({}), std::invalid_argument);
  CHECK_THROWS_AS(npgof::cvm_statistic({0.0, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(npgof::cvm_statistic({0.5, 1.0}), std::invalid_argument);
}

TEST_CASE("cvm statistic matches grid integration") {
  auto rng = npgof::RngStream(npgof::derive_key(29, "cvm-grid"), 0);
  for (const int n : {1, 7, 100}) {
    std::vector<double> sample;
    for (int i = 0; i < n; ++i) sample.push_back(rng.uniform());
    const double exact = npgof::cvm_statistic(sample).n_t_squared;
    CHECK(exact == Catch::Approx(n_t_squared_by_grid(sample, 1000000)).margin(1e-6));
  }
}

TEST_CASE("grid sample is the minimizer") {
  const int n = 20;
  std::vector<double> grid;
  for (int i = 1; i <= n; ++i) grid.push_back((2.0 * i - 1.0) / (2.0 * n));
  const double base = npgof::cvm_statistic(grid).n_t_squared;
  auto rng = npgof::RngStream(npgof::derive_key(29, "cvm-perturb"), 0);
  for (int rep = 0; rep < 100; ++rep) {
    auto perturbed = grid;
    for (auto& x : perturbed) {
      x = std::clamp(x + 0.02 * (rng.uniform() - 0.5), 1e-9, 1.0 - 1e-9);
    }
    CHECK(npgof::cvm_statistic(perturbed).n_t_squared >= base);
  }
}

TEST_CASE("spectral functional and bridge-kernel oracle") {
  CHECK(npgof::cvm_spectral(CoefficientVector(Basis::cosine_half), 100) == 0.0);

  CoefficientVector one(Basis::cosine_half);
  one.set(1, std::numbers::pi);
  CHECK(npgof::cvm_spectral(one, 1) == Catch::Approx(1.0).epsilon(1e-15));

  CoefficientVector trig(Basis::trig_complex);
  trig.set(1, 0.1);
  CHECK_THROWS_AS(npgof::cvm_spectral(trig, 10), std::invalid_argument);

  // Even-frequency signals have zero mean deviation, so the raw bridge
  // kernel matches directly.
  CoefficientVector even(Basis::cosine_half);
  even.set(2, 0.4);
  even.set(4, -0.25);
  const auto raw_inner = [&](double s) {
    const auto left = npgof::integrate_gl(
        [&](double t) { return (t - s * t) * even.evaluate(t); }, 0.0, s, 64);
    const auto right = npgof::integrate_gl(
        [&](double t) { return (s - s * t) * even.evaluate(t); }, s, 1.0, 64);
    return (left + right) * even.evaluate(s);
  };
  CHECK(npgof::cvm_spectral(even, 1) ==
        Catch::Approx(npgof::integrate_gl(raw_inner, 0.0, 1.0, 128)).margin(1e-10));

  for (int rep = 0; rep < 20; ++rep) {
    const auto theta = random_cosine(8, 200 + static_cast<std::uint64_t>(rep), 0.5);
    const double spectral = npgof::cvm_spectral(theta, 1);
    CHECK(spectral ==
          Catch::Approx(npgof::cvm_t_squared_by_bridge_kernel(theta)).margin(1e-8));
  }
}

TEST_CASE("bridge sampler null mean and shift") {
  const CoefficientVector null_theta(Basis::cosine_half);
  const std::uint64_t key = npgof::derive_key(12, "bridge-null");
  const int draws = 20000;
  const int J = 1000;
  double sum = 0.0, sq = 0.0;
  for (int rep = 0; rep < draws; ++rep) {
    auto rng = npgof::replication_stream(key, static_cast<std::uint64_t>(rep));
    const double v = npgof::bridge_limit_sample_stream(null_theta, 1, J, rng);
    sum += v;
    sq += v * v;
  }
  const double mean = sum / draws;
  const double sd = std::sqrt(sq / draws - mean * mean);
  CHECK(mean == Catch::Approx(1.0 / 6.0).margin(4.0 * sd / std::sqrt(1.0 * draws)));
  // Limit variance is 2 sum (pi j)^{-4} = 1/45.
  CHECK(sd * sd == Catch::Approx(1.0 / 45.0).epsilon(0.1));

  // Mean shift under theta is exactly the spectral functional.
  CoefficientVector theta(Basis::cosine_half);
  theta.set(2, 0.05);
  theta.set(5, -0.03);
  const std::int64_t n = 400;
  const double shift = npgof::cvm_spectral(theta, n);
  const std::uint64_t key2 = npgof::derive_key(12, "bridge-shift");
  double sum2 = 0.0;
  for (int rep = 0; rep < draws; ++rep) {
    auto rng = npgof::replication_stream(key2, static_cast<std::uint64_t>(rep));
    sum2 += npgof::bridge_limit_sample_stream(theta, n, J, rng);
  }
  CHECK(sum2 / draws - 1.0 / 6.0 ==
        Catch::Approx(shift).margin(5.0 * (sd + shift) / std::sqrt(1.0 * draws)));

  CHECK_THROWS_AS(npgof::bridge_limit_sample(theta, 4, 4, 1),
                  std::invalid_argument);
  CHECK(npgof::bridge_limit_sample(null_theta, 1, 64, 5) ==
        npgof::bridge_limit_sample(null_theta, 1, 64, 5));
}

TEST_CASE("bridge quantile is stable under truncation refinement") {
  const CoefficientVector null_theta(Basis::cosine_half);
  const auto quantile_at = [&](int J, const char* tag) {
    const std::uint64_t key = npgof::derive_key(12, tag);
    const int draws = 50000;
    std::vector<double> values(draws);
    for (int rep = 0; rep < draws; ++rep) {
      auto rng = npgof::replication_stream(key, static_cast<std::uint64_t>(rep));
      values[static_cast<std::size_t>(rep)] =
          npgof::bridge_limit_sample_stream(null_theta, 1, J, rng);
    }
    std::sort(values.begin(), values.end());
    return values[static_cast<std::size_t>(draws * 95 / 100)];
  };
  CHECK(quantile_at(1000, "q-lowJ") ==
        Catch::Approx(quantile_at(10000, "q-highJ")).margin(0.01));
}

TEST_CASE("calibrated decision keeps level and detects shifts") {
  const auto critical =
      npgof::calibrate_cvm_critical(0.05, 1024, 200000, 99, 4);
  // The classical 5% point of the limit law is near 0.461.
  CHECK(critical.x_alpha == Catch::Approx(0.4614).margin(0.01));
  // Deterministic in the worker count.
  CHECK(npgof::calibrate_cvm_critical(0.05, 1024, 200000, 99, 1).x_alpha ==
        critical.x_alpha);

  const CoefficientVector null_theta(Basis::cosine_half);
  const npgof::DensitySpec uniform{null_theta};
  const std::int64_t n = 500;
  const int reps = 4000;
  int rejects = 0;
  for (int rep = 0; rep < reps; ++rep) {
    const std::uint64_t seed =
        npgof::splitmix64(0xCC1u + 0x9E3779B97F4A7C15ull *
                          static_cast<std::uint64_t>(rep));
    const auto sample = npgof::sample_density_iid(uniform, n, seed);
    rejects += npgof::cvm_decide(sample, critical).reject ? 1 : 0;
  }
  CHECK(static_cast<double>(rejects) / reps == Catch::Approx(0.05).margin(0.02));

  // Fixed spectral shift a = 1: rejection rate stays well above alpha.
  for (const std::int64_t nn : {100, 1000}) {
    CoefficientVector theta(Basis::cosine_half);
    theta.set(1, std::numbers::pi / std::sqrt(static_cast<double>(nn)));
    CHECK(npgof::cvm_spectral(theta, nn) == Catch::Approx(1.0).epsilon(1e-12));
    const npgof::DensitySpec density{theta};
    int hits = 0;
    const int power_reps = 1500;
    for (int rep = 0; rep < power_reps; ++rep) {
      const std::uint64_t seed =
          npgof::splitmix64(0xAB00u + static_cast<std::uint64_t>(nn) +
                            0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(rep));
      const auto sample = npgof::sample_density_iid(density, nn, seed);
      hits += npgof::cvm_decide(sample, critical).reject ? 1 : 0;
    }
    CHECK(static_cast<double>(hits) / power_reps >= 0.05 + 0.1);
  }
}

TEST_CASE("critical value cache round-trips") {
  const std::vector<npgof::CvmCriticalValue> records{
      {0.05, 1024, 200000, 99, 0.46139283712},
      {0.1, 2048, 1000000, 7, 0.34730001}};
  std::ostringstream out;
  npgof::write_cvm_cache(out, records);
  std::istringstream in(out.str());
  const auto loaded = npgof::read_cvm_cache(in);
  REQUIRE(loaded.size() == 2);
  CHECK(loaded[0].alpha == records[0].alpha);
  CHECK(loaded[0].J == records[0].J);
  CHECK(loaded[0].draws == records[0].draws);
  CHECK(loaded[0].seed == records[0].seed);
  CHECK(loaded[0].x_alpha == records[0].x_alpha);
  CHECK(loaded[1].x_alpha == records[1].x_alpha);

  const auto hit = npgof::find_cvm_critical(loaded, 0.1);
  REQUIRE(hit.has_value());
  CHECK(hit->J == 2048);
  CHECK(!npgof::find_cvm_critical(loaded, 0.01).has_value());

  std::istringstream bad("alpha;J\n1,2,3,4,5\n");
  CHECK_THROWS_AS(npgof::read_cvm_cache(bad), std::invalid_argument);
  std::istringstream torn("alpha,J,draws,seed,x_alpha\n0.05,10\n");
  CHECK_THROWS_AS(npgof::read_cvm_cache(torn), std::invalid_argument);
}

TEST_CASE("g1 low-frequency weighted mass") {
  const std::vector<std::int64_t> grid{1 << 10, 1 << 12, 1 << 14};
  const double r = 0.25;

  // Fixed mass at j = 1: the value grows like n^{1-2r}.
  const auto fixed = [](std::int64_t n) {
    CoefficientVector v(Basis::cosine_half);
    v.set(1, std::pow(static_cast<double>(n), -0.25));
    return v;
  };
  const auto bad = npgof::g1_check(fixed, r, 4.0, grid);
  REQUIRE(bad.points.size() == 3);
  CHECK(bad.points.back().value > bad.points.front().value);
  CHECK(!bad.vanishing_trend);
  CHECK(bad.points.front().k_n == 5);
  CHECK(bad.points.front().value ==
        Catch::Approx(std::pow(1024.0, 0.5)).epsilon(1e-12));

  // Mass concentrated at j = k_n: any window below k_n misses it entirely.
  const auto escaping = [r](std::int64_t n) {
    CoefficientVector v(Basis::cosine_half);
    v.set(static_cast<int>(npgof::cvm_k_n(n, r)),
          std::pow(static_cast<double>(n), -0.25));
    return v;
  };
  const auto good = npgof::g1_check(escaping, r, 0.5, grid);
  for (const auto& point : good.points) CHECK(point.value == 0.0);
  CHECK(good.vanishing_trend);

  const auto zero = [](std::int64_t) {
    return CoefficientVector(Basis::cosine_half);
  };
  CHECK(npgof::g1_check(zero, r, 1.0, grid).vanishing_trend);
  CHECK_THROWS_AS(npgof::g1_check(zero, r, 1.0, {}), std::invalid_argument);
  CHECK_THROWS_AS(npgof::g1_check(zero, 0.7, 1.0, grid), std::invalid_argument);
}

}  // namespace
