#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <numbers>

#include "npgof/quadrature.hpp"

namespace {

constexpr double kPi = std::numbers::pi;

TEST_CASE("gauss-legendre integrates polynomials exactly") {
  const auto f = [](double x) { return 7.0 * x * x * x * x * x * x * x; };
  CHECK(npgof::integrate_gl(f, 0.0, 1.0, 1) == Catch::Approx(7.0 / 8.0).epsilon(1e-15));
  const auto g = [](double x) { return x * x - 3.0 * x + 2.0; };
  CHECK(npgof::integrate_gl(g, -1.0, 2.0, 4) ==
        Catch::Approx(9.0 / 3.0 - 3.0 * 3.0 / 2.0 + 2.0 * 3.0).epsilon(1e-14));
}

TEST_CASE("gauss-legendre handles smooth transcendental integrands") {
  CHECK(npgof::integrate_gl([](double x) { return std::exp(x); }, 0.0, 2.0) ==
        Catch::Approx(std::exp(2.0) - 1.0).epsilon(1e-13));
  const auto s2 = [](double x) {
    const double s = std::sin(2.0 * kPi * x);
    return s * s;
  };
  CHECK(npgof::integrate_gl(s2, 0.0, 1.0) == Catch::Approx(0.5).epsilon(1e-13));
  const auto osc = [](double x) {
    const double c = std::cos(2.0 * kPi * 50.0 * x);
    return c * c;
  };
  CHECK(npgof::integrate_gl(osc, 0.0, 1.0) == Catch::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("adaptive simpson agrees and survives mild singularities") {
  CHECK(npgof::integrate_adaptive([](double x) { return std::sqrt(x); }, 0.0,
                                  1.0, 1e-12) ==
        Catch::Approx(2.0 / 3.0).margin(1e-10));
  const auto f = [](double x) { return std::exp(-x * x); };
  const double gl = npgof::integrate_gl(f, -4.0, 4.0);
  const double ad = npgof::integrate_adaptive(f, -4.0, 4.0, 1e-13);
  CHECK(gl == Catch::Approx(ad).epsilon(1e-12));
  CHECK(ad == Catch::Approx(std::sqrt(kPi) * std::erf(4.0)).epsilon(1e-12));
}

}  // namespace
