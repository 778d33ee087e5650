#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "npgof/normal.hpp"
#include "npgof/quadrature.hpp"
#include "npgof/sequence_model.hpp"

namespace {

using npgof::Basis;
using npgof::CoefficientVector;
using npgof::DensitySpec;

TEST_CASE("observation sampling validates inputs") {
  CoefficientVector theta(Basis::cosine_half);
  theta.set(5, 0.3);
  CHECK_THROWS_AS(npgof::sample_sequence_observation(theta, 10, 1.0, 4, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(npgof::sample_sequence_observation(theta, 10, 0.0, 8, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(npgof::sample_sequence_observation(theta, 0, 1.0, 8, 1),
                  std::invalid_argument);
}

TEST_CASE("observation sampling is reproducible bit for bit") {
  CoefficientVector theta(Basis::trig_complex);
  theta.set(1, std::complex<double>{0.2, -0.1});
  const auto a = npgof::sample_sequence_observation(theta, 64, 1.0, 16, 99);
  const auto b = npgof::sample_sequence_observation(theta, 64, 1.0, 16, 99);
  const auto c = npgof::sample_sequence_observation(theta, 64, 1.0, 16, 100);
  REQUIRE(a.y.size() == b.y.size());
  CHECK(a.y0 == b.y0);
  bool identical = true;
  bool differs_from_c = false;
  for (std::size_t i = 0; i < a.y.size(); ++i) {
    identical = identical && a.y[i] == b.y[i];
    differs_from_c = differs_from_c || a.y[i] != c.y[i];
  }
  CHECK(identical);
  CHECK(differs_from_c);
}

TEST_CASE("signed access respects conjugate symmetry") {
  CoefficientVector theta(Basis::trig_complex);
  theta.set(2, std::complex<double>{0.1, 0.05});
  const auto obs = npgof::sample_sequence_observation(theta, 32, 1.0, 8, 5);
  CHECK(obs.at(-2) == std::conj(obs.at(2)));
  CHECK(obs.at(0).imag() == 0.0);
  CHECK_THROWS_AS(obs.at(9), std::out_of_range);

  const auto plug = npgof::observation_from_theta(theta, 32, 1.0, 8);
  CHECK(plug.at(2) == theta.at(2));
  CHECK(plug.at(5) == std::complex<double>{0.0, 0.0});
  CHECK(plug.y0 == 0.0);
}

TEST_CASE("observation moments match the generating rule") {
  // theta_1 = 0.3, n = 100, sigma = 1 on the real basis: Var[y_1] = 1/100.
  CoefficientVector theta(Basis::cosine_half);
  theta.set(1, 0.3);
  const int reps = 20000;
  double sum1 = 0.0, sum2 = 0.0, sq = 0.0;
  const std::uint64_t key = npgof::derive_key(11, "obs-moments");
  for (int rep = 0; rep < reps; ++rep) {
    auto rng = npgof::replication_stream(key, static_cast<std::uint64_t>(rep));
    const auto obs = npgof::sample_sequence_observation_stream(theta, 100, 1.0, 4, rng);
    sum1 += obs.y[0].real();
    sum2 += obs.y[1].real();
    const double d = obs.y[0].real() - 0.3;
    sq += d * d;
  }
  const double se_mean = 0.1 / std::sqrt(static_cast<double>(reps));
  CHECK(sum1 / reps == Catch::Approx(0.3).margin(3.5 * se_mean));
  CHECK(sum2 / reps == Catch::Approx(0.0).margin(3.5 * se_mean));

  // sigma = 1, n = 4: E|y_j - theta_j|^2 = 0.25, complex basis included.
  CoefficientVector tc(Basis::trig_complex);
  tc.set(1, std::complex<double>{0.1, 0.2});
  double sqc = 0.0;
  for (int rep = 0; rep < reps; ++rep) {
    auto rng = npgof::replication_stream(key, static_cast<std::uint64_t>(rep), 1);
    const auto obs = npgof::sample_sequence_observation_stream(tc, 4, 1.0, 2, rng);
    sqc += std::norm(obs.y[0] - tc.at(1));
  }
  CHECK(sq / reps == Catch::Approx(0.01).margin(4 * 0.01 * std::sqrt(2.0 / reps)));
  CHECK(sqc / reps == Catch::Approx(0.25).margin(4 * 0.25 * std::sqrt(2.0 / reps)));
}

TEST_CASE("density spec certifies positivity") {
  // 1 + cos(2 pi x) touches zero: accepted for sampling.
  CoefficientVector touch(Basis::trig_complex);
  touch.set(1, 0.5);
  const DensitySpec d(touch);
  CHECK(d.min_density() >= 0.0);
  CHECK(d.min_density() < 1e-6);
  CHECK(d.certified_floor() < 0.0);
  const auto pts = npgof::sample_density_iid(d, 100, 3);
  CHECK(pts.size() == 100);

  // 1 + 1.2 cos(2 pi x) dips to -0.2: rejected.
  CoefficientVector neg(Basis::trig_complex);
  neg.set(1, 0.6);
  const DensitySpec bad(neg);
  CHECK(bad.min_density() < 0.0);
  CHECK_THROWS_AS(npgof::sample_density_iid(bad, 10, 3), std::invalid_argument);

  CoefficientVector g(Basis::generic);
  g.set(1, 0.1);
  CHECK_THROWS_AS(DensitySpec(g), std::invalid_argument);
}

TEST_CASE("iid sampler hits the target moments") {
  // f = 0.5 cos(2 pi x): theta_{+-1} = 0.25. E[cos(2 pi X)] = 0.25.
  CoefficientVector theta(Basis::trig_complex);
  theta.set(1, 0.25);
  const DensitySpec d(theta);
  const std::int64_t n = 200000;
  const auto pts = npgof::sample_density_iid(d, n, 17);
  const auto again = npgof::sample_density_iid(d, n, 17);
  CHECK(pts == again);
  double mean_cos = 0.0;
  for (const double x : pts) mean_cos += std::cos(2.0 * std::numbers::pi * x);
  mean_cos /= static_cast<double>(n);
  CHECK(mean_cos == Catch::Approx(0.25).margin(3.0 / std::sqrt(static_cast<double>(n))));
}

TEST_CASE("iid sampler passes a binned goodness check on its own target") {
  CoefficientVector theta(Basis::trig_complex);
  theta.set(1, 0.2);
  theta.set(3, std::complex<double>{-0.05, 0.1});
  const DensitySpec d(theta);
  const std::int64_t n = 1000000;
  const auto pts = npgof::sample_density_iid(d, n, 23);

  const int m = 64;
  std::vector<std::int64_t> counts(m, 0);
  for (const double x : pts) {
    int cell = static_cast<int>(x * m);
    cell = std::min(std::max(cell, 0), m - 1);
    ++counts[static_cast<std::size_t>(cell)];
  }
  double stat = 0.0;
  for (int k = 0; k < m; ++k) {
    const double pk = npgof::integrate_gl(
        [&](double x) { return d.density(x); }, static_cast<double>(k) / m,
        static_cast<double>(k + 1) / m, 4);
    const double expect = static_cast<double>(n) * pk;
    const double diff = static_cast<double>(counts[static_cast<std::size_t>(k)]) - expect;
    stat += diff * diff / expect;
  }
  // Wilson-Hilferty 99.9% quantile of chi-squared with 63 dof.
  const double dof = 63.0;
  const double z = npgof::std_normal_quantile(0.999);
  const double q = dof * std::pow(1.0 - 2.0 / (9.0 * dof) +
                                      z * std::sqrt(2.0 / (9.0 * dof)),
                                  3.0);
  CHECK(stat < q);
}

TEST_CASE("alternative family norm envelope is checked not assumed") {
  npgof::AlternativeFamily fam;
  fam.name = "single-low";
  fam.r = 0.25;
  fam.c_low = 0.99;
  fam.c_high = 1.01;
  fam.generator = [](std::int64_t n) {
    CoefficientVector v(Basis::cosine_half);
    v.set(1, std::pow(static_cast<double>(n), -0.25));
    return v;
  };
  const std::vector<std::int64_t> grid{1 << 8, 1 << 10, 1 << 12};
  const auto chk = fam.check_norm_bounds(grid);
  CHECK(chk.ok);
  CHECK(chk.worst_low >= 1.0);
  CHECK(chk.worst_high <= 1.0);

  fam.c_low = 1.5;  // claims a floor the family does not meet
  CHECK_FALSE(fam.check_norm_bounds(grid).ok);
  CHECK_THROWS_AS(fam.check_norm_bounds({}), std::invalid_argument);
}

}  // namespace
