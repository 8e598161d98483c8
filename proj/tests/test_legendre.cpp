#include "bravl/legendre.hpp"

#include "oracle_utils.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

TEST_SUITE_BEGIN("legendre");

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("frozen 40-digit anchors across orders and arguments") {
  // references from an independent arbitrary-precision evaluation of the
  // integral representation
  CHECK(bravl::legendre_q(0, 3.0) ==
        doctest::Approx(0.34657359027997265).epsilon(1e-15));
  CHECK(bravl::legendre_q(1, 1.25) ==
        doctest::Approx(0.37326536083513711).epsilon(1e-15));
  CHECK(bravl::legendre_q(2, 2.0) ==
        doctest::Approx(0.021183793837301651).epsilon(1e-14));
  CHECK(bravl::legendre_q(5, 1.1) ==
        doctest::Approx(0.065641420663917103).epsilon(1e-13));
}

TEST_CASE("agrees with the integral-representation oracle on random input") {
  auto gen = oracle::rng(101);
  for (int trial = 0; trial < 120; ++trial) {
    const int l = static_cast<int>(gen() % (bravl::L_MAX + 1));
    const double t = oracle::log_uniform(gen, 1.05, 20.0);
    const double ref = oracle::legendre_q_integral(l, t);
    const double got = bravl::legendre_q(l, t);
    CAPTURE(l);
    CAPTURE(t);
    CHECK(got == doctest::Approx(ref).epsilon(1e-10));
  }
}

TEST_CASE("order-zero closed form atanh(1/t)") {
  auto gen = oracle::rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const double t = oracle::log_uniform(gen, 1.0001, 1e6);
    CHECK(bravl::legendre_q(0, t) ==
          doctest::Approx(std::atanh(1.0 / t)).epsilon(1e-14));
  }
}

TEST_CASE("shifted evaluation survives shifts far below t-representability") {
  // Q_0(1 + d) = (1/2) log1p(2/d) exactly; at d = 1e-8 the unshifted call
  // must be rejected while the shifted one stays accurate.
  const double d = 1e-8;
  CHECK(bravl::legendre_q_shifted(0, d) ==
        doctest::Approx(9.5569139647561554).epsilon(1e-15));
  CHECK(bravl::legendre_q_shifted(0, d) ==
        doctest::Approx(0.5 * std::log1p(2.0 / d)).epsilon(1e-15));
  CHECK_THROWS_AS(bravl::legendre_q(0, 1.0 + 1e-13), std::domain_error);

  // against the oracle at shifts where t is still representable
  auto gen = oracle::rng(13);
  for (int trial = 0; trial < 60; ++trial) {
    const int l = static_cast<int>(gen() % (bravl::L_MAX + 1));
    const double delta = oracle::log_uniform(gen, 1e-7, 10.0);
    const double ref = oracle::legendre_q_integral(l, 1.0 + delta);
    CAPTURE(l);
    CAPTURE(delta);
    CHECK(bravl::legendre_q_shifted(l, delta) ==
          doctest::Approx(ref).epsilon(1e-9));
  }
}

TEST_CASE("paired evaluation matches two single evaluations bitwise") {
  auto gen = oracle::rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    const int la = static_cast<int>(gen() % (bravl::L_MAX + 1));
    const int lb = static_cast<int>(gen() % (bravl::L_MAX + 1));
    const double delta = oracle::log_uniform(gen, 1e-12, 100.0);
    double qa = 0.0, qb = 0.0;
    bravl::legendre_q_shifted_pair(la, lb, delta, qa, qb);
    CHECK(qa == bravl::legendre_q_shifted(la, delta));
    CHECK(qb == bravl::legendre_q_shifted(lb, delta));
  }
}

TEST_CASE("positive and strictly decreasing in the order") {
  auto gen = oracle::rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    const double t = oracle::log_uniform(gen, 1.001, 1e3);
    double prev = bravl::legendre_q(0, t);
    CHECK(prev > 0.0);
    for (int l = 1; l <= bravl::L_MAX; ++l) {
      const double cur = bravl::legendre_q(l, t);
      CHECK(cur > 0.0);
      CHECK(cur < prev);
      prev = cur;
    }
  }
}

TEST_CASE("strictly decreasing in the argument") {
  for (int l : {0, 1, 4, 12}) {
    double prev = bravl::legendre_q(l, 1.01);
    for (double t : {1.1, 1.5, 2.0, 5.0, 50.0, 5e3}) {
      const double cur = bravl::legendre_q(l, t);
      CHECK(cur < prev);
      prev = cur;
    }
  }
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(bravl::legendre_q(-1, 2.0), std::invalid_argument);
  CHECK_THROWS_AS(bravl::legendre_q(bravl::L_MAX + 1, 2.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(bravl::legendre_q(0, 1.0), std::domain_error);
  CHECK_THROWS_AS(bravl::legendre_q(0, 0.5), std::domain_error);
  CHECK_THROWS_AS(bravl::legendre_q_shifted(0, 0.0), std::domain_error);
  CHECK_THROWS_AS(bravl::legendre_q_shifted(0, -1.0), std::domain_error);
  CHECK_THROWS_AS(bravl::legendre_q_shifted(13, 1.0), std::invalid_argument);
}

TEST_CASE("angular profile: reflection symmetry and order-zero closed form") {
  auto gen = oracle::rng(29);
  for (int trial = 0; trial < 100; ++trial) {
    const double u = oracle::log_uniform(gen, 1e-3, 0.999);
    CHECK(bravl::g_profile(1, u) ==
          doctest::Approx(bravl::g_profile(1, 1.0 / u)).epsilon(1e-13));
    CHECK(bravl::g_profile(0, u) ==
          doctest::Approx(std::log((u + 1.0) / (1.0 - u))).epsilon(1e-13));
  }
  CHECK(bravl::g_profile(0, 3.0) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("g-profile integral constants reproduce the closed forms") {
  const std::vector<bravl::IdentityResult> rows = bravl::verify_identities();
  CHECK(rows.size() == 9);
  for (const bravl::IdentityResult& row : rows) {
    CAPTURE(row.id);
    CHECK(row.converged);
    CHECK(row.abs_error <= 1e-8);
  }
  // reference column carries the closed forms themselves
  auto ref_of = [&rows](const std::string& id) {
    for (const bravl::IdentityResult& row : rows)
      if (row.id == id) return row.reference;
    FAIL("missing identity row: ", id);
    return 0.0;
  };
  CHECK(ref_of("g1_over_u") == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(ref_of("g1_unit_interval") ==
        doctest::Approx(0.73370055013616983).epsilon(1e-15));
  CHECK(ref_of("g1_tail_interval") ==
        doctest::Approx(1.7337005501361698).epsilon(1e-15));
  CHECK(ref_of("g1_over_u_sq") ==
        doctest::Approx(kPi * kPi / 4.0).epsilon(1e-15));
  CHECK(ref_of("g1_full") == doctest::Approx(kPi * kPi / 4.0).epsilon(1e-15));
  CHECK(ref_of("g0_halfpower") == doctest::Approx(2.0 * kPi).epsilon(1e-15));
  CHECK(ref_of("g0_threehalfpower") ==
        doctest::Approx(2.0 * kPi).epsilon(1e-15));
}

TEST_CASE("identity refinement deltas shrink with the level") {
  const std::vector<bravl::IdentityResult> coarse = bravl::verify_identities(2);
  const std::vector<bravl::IdentityResult> fine = bravl::verify_identities(4);
  REQUIRE(coarse.size() == fine.size());
  for (std::size_t i = 0; i < fine.size(); ++i) {
    CAPTURE(fine[i].id);
    CHECK(fine[i].abs_error <= coarse[i].abs_error + 1e-14);
  }
}

TEST_CASE("radial convolution reductions hit 4 pi^2 p^{1-expo}") {
  const std::vector<bravl::IdentityResult> rows =
      bravl::verify_convolution_identities();
  CHECK(rows.size() == 4);
  for (const bravl::IdentityResult& row : rows) {
    CAPTURE(row.id);
    CHECK(row.converged);
    CHECK(row.abs_error / std::abs(row.reference) <= 1e-7);
  }
  // spot-check one reference value: 4 pi^2 p^{-1/2} at p = 4 is 2 pi^2
  bool found = false;
  for (const bravl::IdentityResult& row : rows)
    if (row.id == "conv_exp3half_p4") {
      CHECK(row.reference ==
            doctest::Approx(2.0 * kPi * kPi).epsilon(1e-15));
      found = true;
    }
  CHECK(found);
}

TEST_SUITE_END();
