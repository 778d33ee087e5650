#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "npgof/normal.hpp"
#include "oracles.hpp"

namespace {

TEST_CASE("normal cdf matches quadrature oracle") {
  const std::vector<double> xs{-8.0, -5.0, -3.0, -1.2, -0.5, 0.0,
                               0.3,  1.0,  2.5,  4.0,  6.0};
  for (const double x : xs) {
    const double want = static_cast<double>(oracle::norm_cdf(x));
    CHECK(npgof::std_normal_cdf(x) == Catch::Approx(want).margin(1e-14));
  }
  CHECK(npgof::std_normal_cdf(0.0) == Catch::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("normal pdf normalizes") {
  const long double mass =
      oracle::simpson([](long double t) { return npgof::std_normal_pdf(
                          static_cast<double>(t)); },
                      -12.0L, 12.0L, 1 << 15);
  CHECK(static_cast<double>(mass) == Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("quantile round trips") {
  const std::vector<double> ps{1e-10, 1e-6, 1e-3, 0.025, 0.2, 0.5,
                               0.8,   0.95, 0.99, 1.0 - 1e-6};
  for (const double p : ps) {
    const double x = npgof::std_normal_quantile(p);
    CHECK(npgof::std_normal_cdf(x) == Catch::Approx(p).epsilon(1e-12));
  }
  for (const double x : {-6.0, -2.0, -0.3, 0.0, 0.7, 1.5, 5.0}) {
    CHECK(npgof::std_normal_quantile(npgof::std_normal_cdf(x)) ==
          Catch::Approx(x).margin(1e-10));
  }
}

TEST_CASE("critical values") {
  CHECK(npgof::normal_critical_value(0.05) ==
        Catch::Approx(1.6448536269514722).margin(1e-10));
  CHECK(npgof::normal_critical_value(0.025) ==
        Catch::Approx(1.9599639845400545).margin(1e-10));
  // Definition: P(Z > x_alpha) = alpha.
  CHECK(1.0 - npgof::std_normal_cdf(npgof::normal_critical_value(0.01)) ==
        Catch::Approx(0.01).epsilon(1e-10));
}

TEST_CASE("quantile rejects p outside (0,1)") {
  CHECK_THROWS_AS(npgof::std_normal_quantile(0.0), std::invalid_argument);
  CHECK_THROWS_AS(npgof::std_normal_quantile(1.0), std::invalid_argument);
  CHECK_THROWS_AS(npgof::std_normal_quantile(-0.5), std::invalid_argument);
}

}  // namespace
