#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <cstdint>
#include <vector>

#include "npgof/identities.hpp"
#include "npgof/rng.hpp"

namespace {

using npgof::Basis;

TEST_CASE("random_coefficients replays bit for bit") {
  const std::uint64_t key = npgof::derive_key(17, "identities-test");
  const auto a = npgof::random_coefficients(Basis::trig_complex, 12, key, 3, 0.4);
  const auto b = npgof::random_coefficients(Basis::trig_complex, 12, key, 3, 0.4);
  CHECK(a.max_index() == 12);
  CHECK(a.entries().size() == 12);
  for (const auto& [j, v] : a.entries()) {
    CHECK(v == b.at(j));
    CHECK(v.imag() != 0.0);
  }

  const auto c = npgof::random_coefficients(Basis::cosine_half, 5, key, 3, 0.4);
  CHECK(c.basis() == Basis::cosine_half);
  CHECK(c.entries().size() == 5);
  for (const auto& [j, v] : c.entries()) CHECK(v.imag() == 0.0);

  // A different stream must give a different draw.
  const auto d = npgof::random_coefficients(Basis::trig_complex, 12, key, 4, 0.4);
  CHECK(a.at(1) != d.at(1));
}

TEST_CASE("identity suite passes with the contracted shape") {
  const auto checks = npgof::run_identity_suite(2026);
  REQUIRE(checks.size() == 4);

  CHECK(checks[0].name == "chi2-fourier-pairing");
  CHECK(checks[0].cases == 150);
  CHECK(checks[0].tol == 1e-10);

  CHECK(checks[1].name == "cvm-spectral-bridge");
  CHECK(checks[1].cases == 20);
  CHECK(checks[1].tol == 1e-8);

  CHECK(checks[2].name == "kernel-t1n-time-domain");
  CHECK(checks[2].cases == 20);
  CHECK(checks[2].tol == 1e-6);

  CHECK(checks[3].name == "parseval-pythagoras");
  CHECK(checks[3].cases == 20);
  CHECK(checks[3].tol == 1e-10);

  for (const auto& chk : checks) {
    INFO(chk.name << " worst defect " << chk.worst);
    CHECK(chk.pass);
    CHECK(chk.worst <= chk.tol);
    // Floating point, not symbolic math: a literal zero would mean the
    // comparison degenerated.
    CHECK(chk.worst > 0.0);
  }
}

TEST_CASE("identity suite is deterministic in the seed") {
  const auto first = npgof::run_identity_suite(99);
  const auto second = npgof::run_identity_suite(99);
  REQUIRE(first.size() == second.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    CHECK(first[i].worst == second[i].worst);
    CHECK(first[i].cases == second[i].cases);
  }
}

}  // namespace
