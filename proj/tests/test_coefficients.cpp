#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "npgof/coefficients.hpp"
#include "npgof/quadrature.hpp"
#include "npgof/rng.hpp"

namespace {

using npgof::Basis;
using npgof::CoefficientVector;

CoefficientVector random_vector(Basis basis, int max_j, std::uint64_t stream) {
  auto rng = npgof::RngStream(npgof::derive_key(77, "coef"), stream);
  CoefficientVector v(basis);
  for (int j = 1; j <= max_j; ++j) {
    const double re = rng.normal() / j;
    const double im = basis == Basis::trig_complex ? rng.normal() / j : 0.0;
    v.set(j, {re, im});
  }
  return v;
}

TEST_CASE("set validates indices and realness") {
  CoefficientVector v(Basis::cosine_half);
  CHECK_THROWS_AS(v.set(0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(v.set(-3, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(v.set(2, std::complex<double>{1.0, 0.5}),
                  std::invalid_argument);
  v.set(2, 1.5);
  CHECK(v.at(2).real() == 1.5);
  v.set(2, 0.0);
  CHECK(v.entries().empty());

  CoefficientVector t(Basis::trig_complex);
  t.set(4, std::complex<double>{0.5, -0.25});
  CHECK(t.at(4) == std::complex<double>{0.5, -0.25});
  CHECK(t.at(5) == std::complex<double>{0.0, 0.0});
  CHECK(t.max_index() == 4);
}

TEST_CASE("norm counts conjugate pairs") {
  CoefficientVector t(Basis::trig_complex);
  t.set(1, std::complex<double>{3.0, 4.0});
  CHECK(t.norm_squared() == Catch::Approx(50.0));

  CoefficientVector c(Basis::cosine_half);
  c.set(1, 3.0);
  CHECK(c.norm_squared() == Catch::Approx(9.0));
  CHECK(npgof::parseval_norm(c) == Catch::Approx(3.0));
}

TEST_CASE("parseval holds against quadrature") {
  for (const Basis basis : {Basis::trig_complex, Basis::cosine_half}) {
    const auto v = random_vector(basis, 8, basis == Basis::trig_complex ? 1 : 2);
    const double integral = npgof::integrate_gl(
        [&](double x) {
          const double f = v.evaluate(x);
          return f * f;
        },
        0.0, 1.0, 1 << 10);
    CHECK(integral == Catch::Approx(v.norm_squared()).epsilon(1e-11));
  }
}

TEST_CASE("dot matches the L2 inner product") {
  const auto f = random_vector(Basis::trig_complex, 6, 3);
  const auto g = random_vector(Basis::trig_complex, 9, 4);
  const double integral = npgof::integrate_gl(
      [&](double x) { return f.evaluate(x) * g.evaluate(x); }, 0.0, 1.0,
      1 << 10);
  CHECK(integral == Catch::Approx(npgof::dot(f, g)).margin(1e-11));

  CoefficientVector other(Basis::cosine_half);
  CHECK_THROWS_AS(npgof::dot(f, other), std::invalid_argument);
}

TEST_CASE("two-sided evaluation agrees with the real form") {
  const auto v = random_vector(Basis::trig_complex, 10, 5);
  for (const double x : {0.0, 0.1, 0.37, 0.5, 0.93, 1.0}) {
    const auto z = v.evaluate_two_sided(x);
    CHECK(std::abs(z.imag()) < 1e-12);
    CHECK(z.real() == Catch::Approx(v.evaluate(x)).margin(1e-11));
  }
  CoefficientVector c(Basis::cosine_half);
  c.set(1, 1.0);
  CHECK_THROWS_AS(c.evaluate_two_sided(0.5), std::logic_error);
  CHECK(c.evaluate(0.25) ==
        Catch::Approx(std::sqrt(2.0) * std::cos(std::numbers::pi * 0.25)));
}

TEST_CASE("restriction is a strict partition") {
  const auto v = random_vector(Basis::trig_complex, 12, 6);
  const auto low = v.below(5);
  const auto high = v.from(5);
  CHECK(low.max_index() == 4);
  for (const auto& [j, val] : high.entries()) CHECK(j >= 5);
  CHECK(low.norm_squared() + high.norm_squared() ==
        Catch::Approx(v.norm_squared()).epsilon(1e-14));

  CHECK(npgof::low_frequency_mass(v, 5) == Catch::Approx(low.norm_squared()));
  // Strictness: cutoff equal to an occupied index excludes it both ways.
  CHECK(npgof::low_frequency_mass(v, 1) == 0.0);
  CHECK(npgof::tail_mass(v, 12) == 0.0);
  CHECK(npgof::tail_mass(v, 11) ==
        Catch::Approx(2.0 * std::norm(v.at(12))).epsilon(1e-14));
  CHECK_THROWS_AS(npgof::low_frequency_mass(v, 0), std::invalid_argument);
}

TEST_CASE("arithmetic and bounds") {
  const auto v = random_vector(Basis::trig_complex, 7, 8);
  const auto w = v.scaled(-2.0).plus(v).plus(v);
  CHECK(w.norm_squared() < 1e-28);

  const auto f = random_vector(Basis::cosine_half, 5, 9);
  const double sup = f.sup_bound();
  const double lip = f.lipschitz_bound();
  double max_abs = 0.0;
  double prev = f.evaluate(0.0);
  const int grid = 4096;
  for (int i = 1; i <= grid; ++i) {
    const double x = static_cast<double>(i) / grid;
    const double fx = f.evaluate(x);
    max_abs = std::max(max_abs, std::abs(fx));
    CHECK(std::abs(fx - prev) <= lip / grid + 1e-12);
    prev = fx;
  }
  CHECK(max_abs <= sup + 1e-12);

  CoefficientVector g(Basis::generic);
  g.set(3, 2.0);
  CHECK(g.norm_squared() == Catch::Approx(4.0));
  CHECK_THROWS_AS(g.evaluate(0.5), std::logic_error);
  CHECK_THROWS_AS(g.sup_bound(), std::logic_error);

  CoefficientVector mism(Basis::cosine_half);
  CHECK_THROWS_AS(v.plus(mism), std::invalid_argument);
}

}  // namespace
