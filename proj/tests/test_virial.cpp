#include "bravl/virial.hpp"

#include "bravl/spectral.hpp"
#include "oracle_utils.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

using bravl::Channel;
using bravl::PhysicalParams;
using bravl::ProfileId;

TEST_SUITE_BEGIN("virial");

namespace {

constexpr double kPi = std::numbers::pi;

PhysicalParams coupling(double nu) {
  PhysicalParams params;
  params.alpha = 1.0;
  params.Z = nu;
  return params;
}

bravl::ChannelScan ground_scan() {
  static const bravl::ChannelScan scan =
      bravl::scan_channel(Channel{0, 1}, coupling(0.5), {60, 90, 140});
  return scan;
}

} // namespace

TEST_CASE("both identity forms vanish on a genuine eigenpair") {
  const bravl::ChannelScan scan = ground_scan();
  const bravl::EigenSolution& sol = scan.solutions.back();
  REQUIRE(sol.eigenvalues(0) < 1.0);
  const Eigen::VectorXcd v =
      sol.eigenvectors.col(0).cast<std::complex<double>>();

  const bravl::VirialReport cor =
      bravl::virial_residual(sol.eigenvalues(0), v, scan.matrices.back());
  const bravl::VirialReport thm = bravl::virial_residual_theorem_form(
      sol.eigenvalues(0), v, scan.matrices.back());

  CHECK(cor.form == "corollary");
  CHECK(thm.form == "theorem");
  CHECK(cor.rel_residual < 5e-4);
  CHECK(thm.rel_residual < 5e-4);
  CHECK(cor.imag_ok);
  CHECK(thm.imag_ok);
  CHECK(cor.imag_leak == 0.0); // real input, real arithmetic throughout
  // undifferenced residual = e0 * differenced residual when both reuse the
  // assembled kernels; after scaling the relative residuals must agree
  CHECK(thm.rel_residual ==
        doctest::Approx(cor.rel_residual).epsilon(1e-9));
  CHECK(cor.norm_sq == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cor.lambda == sol.eigenvalues(0));
}

TEST_CASE("identity residual is invariant under a global phase") {
  const bravl::ChannelScan scan = ground_scan();
  const bravl::EigenSolution& sol = scan.solutions.back();
  const Eigen::VectorXcd v =
      sol.eigenvectors.col(0).cast<std::complex<double>>();
  const std::complex<double> phase = std::polar(1.0, 0.37);
  const bravl::VirialReport base =
      bravl::virial_residual(sol.eigenvalues(0), v, scan.matrices.back());
  const bravl::VirialReport rotated = bravl::virial_residual(
      sol.eigenvalues(0), (phase * v).eval(), scan.matrices.back());
  CHECK(rotated.rel_residual ==
        doctest::Approx(base.rel_residual).epsilon(1e-12));
  CHECK(rotated.imag_ok);
}

TEST_CASE("identity rejects vectors that are not eigenfunctions") {
  const bravl::ChannelScan scan = ground_scan();
  const bravl::EigenSolution& sol = scan.solutions.back();
  // an orthogonal eigenvector with a wrong eigenvalue pairing
  const Eigen::VectorXcd wrong =
      sol.eigenvectors.col(3).cast<std::complex<double>>();
  const bravl::VirialReport report =
      bravl::virial_residual(sol.eigenvalues(0), wrong, scan.matrices.back());
  CHECK(report.rel_residual > 1e-2);

  // a random direction
  auto gen = oracle::rng(53);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXcd random(sol.eigenvalues.size());
  for (Eigen::Index i = 0; i < random.size(); ++i)
    random(i) = std::complex<double>(normal(gen), normal(gen));
  const bravl::VirialReport rnd = bravl::virial_residual(
      sol.eigenvalues(0), random, scan.matrices.back());
  CHECK(rnd.rel_residual > 1e-2);
}

TEST_CASE("input validation of the identity evaluators") {
  const bravl::ChannelScan scan = ground_scan();
  const bravl::ChannelMatrix& cm = scan.matrices.back();
  const Eigen::VectorXcd good =
      scan.solutions.back().eigenvectors.col(0).cast<std::complex<double>>();
  CHECK_THROWS_AS(
      bravl::virial_residual(0.9, Eigen::VectorXcd::Zero(good.size()), cm),
      std::invalid_argument);
  CHECK_THROWS_AS(bravl::virial_residual(0.9, Eigen::VectorXcd(), cm),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      bravl::virial_residual(0.9, Eigen::VectorXcd::Ones(good.size() + 1), cm),
      std::invalid_argument);
  CHECK_THROWS_AS(
      bravl::virial_residual(std::nan(""), good, cm), std::invalid_argument);
}

TEST_CASE("free pseudo-eigenpairs carry the analytic rejection residual") {
  const PhysicalParams params = coupling(0.0);
  auto gen = oracle::rng(59);
  for (int k = 0; k < 1000; ++k) {
    const double p = oracle::log_uniform(gen, 1e-3, 1e3);
    const double r = bravl::diagonal_virial_residual(p, params);
    const double x = bravl::energy(p, params) / params.rest_energy();
    CAPTURE(p);
    CHECK(r > 0.0);
    CHECK(r == doctest::Approx((x * x - 1.0) / x).epsilon(1e-12));
  }
}

TEST_CASE("profile identifiers round-trip through their names") {
  for (ProfileId id : {ProfileId::ratio_r, ProfileId::ratio_s, ProfileId::Phi,
                       ProfileId::Psi, ProfileId::Theta})
    CHECK(bravl::parse_profile_id(bravl::profile_name(id)) == id);
  CHECK_THROWS_AS(bravl::parse_profile_id("no_such_profile"),
                  std::invalid_argument);
}

TEST_CASE("profile closed-form anchors") {
  // (2 sqrt(p^2+1) - 1)/(p + sqrt(p^2+1)) at p = 3/4 is exactly 3/4
  CHECK(bravl::profile_value(ProfileId::ratio_r, 0.75, 0.0) ==
        doctest::Approx(0.75).epsilon(1e-15));
  // frozen 40-digit value of the second ratio at p = 1: 1/(3 - sqrt(2))
  CHECK(bravl::profile_value(ProfileId::ratio_s, 1.0, 0.0) ==
        doctest::Approx(0.63060193748187072).epsilon(1e-14));
  // the combined profiles factor through the two ratios
  auto gen = oracle::rng(61);
  for (int k = 0; k < 50; ++k) {
    const double p = oracle::log_uniform(gen, 1e-2, 1e2);
    const double nu = 0.5;
    const double expected =
        bravl::profile_value(ProfileId::ratio_s, p, nu) *
        (nu - bravl::profile_value(ProfileId::ratio_r, p, nu));
    CHECK(bravl::profile_value(ProfileId::Phi, p, nu) ==
          doctest::Approx(expected).epsilon(1e-13));
    CHECK(bravl::profile_value(ProfileId::Theta, p, nu) ==
          doctest::Approx(expected).epsilon(1e-13));
  }
}

TEST_CASE("extremal constants of the two ratios") {
  const bravl::BoundProfile r =
      bravl::bound_profile(ProfileId::ratio_r, 1e-4, 1e4, 0.0);
  CHECK(!r.extremum_at_infinity);
  CHECK(std::abs(r.extremum_value - 0.75) <= 1e-9);
  CHECK(r.extremum_p == doctest::Approx(0.75).epsilon(1e-4));

  const bravl::BoundProfile s =
      bravl::bound_profile(ProfileId::ratio_s, 1e-4, 1e4, 0.0);
  CHECK(s.extremum_at_infinity);
  CHECK(std::abs(s.extremum_value - 2.0) <= 1e-6);
  // every sampled value stays below the supremum
  for (double v : s.value) CHECK(v < 2.0);
}

TEST_CASE("combined profiles stay nonpositive up to three quarters") {
  for (double nu : {0.25, 0.5, 0.75}) {
    const bravl::BoundProfile phi =
        bravl::bound_profile(ProfileId::Phi, 1e-4, 1e4, nu);
    double max_phi = phi.value.front();
    for (double v : phi.value) max_phi = std::max(max_phi, v);
    CAPTURE(nu);
    CHECK(max_phi <= 0.0);
  }
}

TEST_CASE("third profile is strictly negative at the critical coupling") {
  const bravl::BoundProfile psi = bravl::bound_profile(
      ProfileId::Psi, 1e-4, 1e4, bravl::critical_nu());
  double max_psi = psi.value.front();
  for (double v : psi.value) max_psi = std::max(max_psi, v);
  CHECK(max_psi < 0.0);
}

TEST_CASE("coefficient that controls the negativity is below one") {
  const bravl::PsiCheck check = bravl::psi_coefficient_check();
  // closed form (pi^2 + 8)/(2 (pi^2 + 4)); frozen 40-digit reference
  CHECK(check.coefficient ==
        doctest::Approx(0.64420021957100047).epsilon(1e-14));
  CHECK(check.reference ==
        doctest::Approx((kPi * kPi + 8.0) / (2.0 * (kPi * kPi + 4.0)))
            .epsilon(1e-15));
  CHECK(check.coefficient ==
        doctest::Approx(check.reference).epsilon(1e-14));
  CHECK(check.below_one);
  CHECK(check.strictly_negative);
  CHECK(check.max_psi < 0.0);
}

TEST_CASE("profile sampling validation") {
  CHECK_THROWS_AS(bravl::bound_profile(ProfileId::ratio_r, 0.0, 1.0, 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(bravl::bound_profile(ProfileId::ratio_r, 2.0, 1.0, 0.5),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      bravl::bound_profile(ProfileId::ratio_r, 1.0, 2.0, 0.5, 1),
      std::invalid_argument);
}

TEST_CASE("embedded exclusion edge: raised only for the exceptional channel") {
  CHECK(bravl::embedded_threshold(Channel{1, -1}, 0.8) ==
        doctest::Approx(2.0 * 0.8 - 0.5).epsilon(1e-15));
  CHECK(bravl::embedded_threshold(Channel{1, -1}, 0.6) == 1.0);
  CHECK(bravl::embedded_threshold(Channel{0, 1}, 0.9) == 1.0);
  CHECK(bravl::embedded_threshold(Channel{2, -1}, 0.9) == 1.0);
}

TEST_CASE("coupling sweep emits one consistent row per grid and coupling") {
  const std::vector<bravl::SweepRow> rows =
      bravl::z_sweep(Channel{0, 1}, {0.25, 0.5}, {60, 90, 140});
  REQUIRE(rows.size() == 6);
  for (const bravl::SweepRow& row : rows) {
    CAPTURE(row.nu);
    CAPTURE(row.n);
    CHECK(row.ok);
    CHECK(row.embedded_verdict == "PASS");
    CHECK(std::isfinite(row.lambda_min_over_mc2));
    CHECK(row.lambda_min_over_mc2 >= row.lower_bound - 1e-3);
    CHECK(row.lambda_min_over_mc2 < 1.0);
    CHECK(std::isfinite(row.residual_corollary));
    CHECK(row.residual_theorem ==
          doctest::Approx(row.residual_corollary).epsilon(1e-6));
  }
  // stronger coupling binds deeper at every grid
  for (int g = 0; g < 3; ++g)
    CHECK(rows[3 + g].lambda_min_over_mc2 < rows[g].lambda_min_over_mc2);
  // the lower bound column is (1 - nu/nu_c); frozen reference values
  CHECK(rows[0].lower_bound ==
        doctest::Approx(0.72407298760469025).epsilon(1e-14));
  CHECK(rows[3].lower_bound ==
        doctest::Approx(0.44814597520938051).epsilon(1e-14));
}

TEST_CASE("coupling sweep validates its inputs") {
  CHECK_THROWS_AS(bravl::z_sweep(Channel{0, 1}, {}, {60, 90, 140}),
                  std::invalid_argument);
  CHECK_THROWS_AS(bravl::z_sweep(Channel{0, 1}, {1.2}, {60, 90, 140}),
                  std::invalid_argument);
  CHECK_THROWS_AS(bravl::z_sweep(Channel{0, 1}, {-0.1}, {60, 90, 140}),
                  std::invalid_argument);
}

TEST_SUITE_END();
