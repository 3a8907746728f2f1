#include <doctest.h>

#include <cmath>

#include "../oracles/oracles.hpp"

TEST_CASE("oracle report") {
  const auto ok = oracle::compare("x", 2.0, 2.01, 0.01);
  CHECK(ok.pass);
  CHECK(ok.relative_error == doctest::Approx(0.005));
  CHECK(!oracle::compare("x", 2.0, 2.1, 0.01).pass);
  // A zero oracle value switches to the absolute error.
  CHECK(oracle::compare("z", 0.0, 1e-9, 1e-8).pass);
  CHECK(oracle::format(ok).find("ok") != std::string::npos);
}

TEST_CASE("rotating-wave closed form") {
  const double w = 0.37;
  CHECK(oracle::rwa_population(w, 0, M_PI / w) == doctest::Approx(1.0));
  for (double t : {0.0, 1.0, 17.3}) CHECK(oracle::rwa_population(0, 0.2, t) == 0.0);
  CHECK(oracle::rwa_population(w, w, M_PI / (std::sqrt(2.0) * w)) == doctest::Approx(0.5));
}

TEST_CASE("box energies") {
  CHECK(oracle::analytic_box_energy(1, 1, 1, 20, 20, 0.067) == doctest::Approx(42.1).epsilon(1e-3));
  CHECK(oracle::analytic_box_energy(1, 1, 1, 20, 20, 0.67) == doctest::Approx(4.21).epsilon(1e-3));
  // Doubling the width quarters the lateral terms.
  const double lz = oracle::analytic_box_energy3(0, 0, 1, 1, 1, 20, 0.067);
  const double lat_w = oracle::analytic_box_energy(1, 1, 1, 20, 20, 0.067) - lz;
  const double lat_2w = oracle::analytic_box_energy(1, 1, 1, 40, 20, 0.067) - lz;
  CHECK(lat_2w == doctest::Approx(lat_w / 4));
  CHECK(oracle::analytic_box_energy3(2, 1, 1, 10, 20, 30, 0.1) ==
        doctest::Approx(oracle::hbar2_over_2m0_mev_nm2() / 0.1 * M_PI * M_PI * (0.04 + 1.0 / 400 + 1.0 / 900)));
}

TEST_CASE("SI-derived constants") {
  CHECK(oracle::hbar_mev_ps() == doctest::Approx(0.6582120).epsilon(1e-6));
  CHECK(oracle::hbar2_over_2m0_mev_nm2() == doctest::Approx(38.0998).epsilon(1e-5));
  CHECK(oracle::coulomb_mev_nm() == doctest::Approx(1439.96).epsilon(1e-5));
  CHECK(oracle::boltzmann_mev_per_k() == doctest::Approx(0.0861733).epsilon(1e-6));
  CHECK(oracle::planck_mev_per_thz() == doctest::Approx(4.135667).epsilon(1e-6));
}

TEST_CASE("Bessel J1 and the dressed Rabi frequency") {
  CHECK(oracle::bessel_j1(0) == 0.0);
  CHECK(oracle::bessel_j1(1.0) == doctest::Approx(0.4400505857).epsilon(1e-9));
  CHECK(oracle::bessel_j1(3.8317059702) == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
  CHECK(oracle::bessel_j1(-2.0) == doctest::Approx(-oracle::bessel_j1(2.0)));
  CHECK(oracle::dressed_rabi_frequency(0.3, 1.0, 1.0, 1.5, 40.0) == doctest::Approx(0.3));
  CHECK(oracle::dressed_rabi_frequency(0.3, -1.0, 1.0, 1.0, 2.0 / oracle::hbar_mev_ps()) ==
        doctest::Approx(0.3 * 2 * 0.4400505857).epsilon(1e-8));
}

TEST_CASE("exponential decay") {
  CHECK(oracle::decayed_population(1.0, 0.1, 0.0, 10.0) == doctest::Approx(std::exp(-1.0)));
  CHECK(oracle::decayed_population(0.7, 0.1, 0.0, 0.0) == doctest::Approx(0.7));
  CHECK(oracle::decayed_population(1.0, 0.1, 1.0, 1e4) == doctest::Approx(1.0 / 3));
}

TEST_CASE("point charges and thermal occupation") {
  CHECK(oracle::point_charge_potential(1, 10, 20) == doctest::Approx(7.1998).epsilon(1e-4));
  CHECK(oracle::point_charge_energy(1, -1, 10, 20) == doctest::Approx(-7.1998).epsilon(1e-4));
  CHECK(oracle::bose_einstein(20, 77) == doctest::Approx(0.0516).epsilon(2e-3));
  CHECK(oracle::bose_einstein(20, 0) == 0.0);
}

TEST_CASE("stratified sphere sampling") {
  const auto one = oracle::monte_carlo_sphere([](double, double, double) { return 1.0; }, 20, 20, 7);
  CHECK(one.value == doctest::Approx(4 * M_PI));
  CHECK(one.samples == 400);
  const auto z2 = oracle::monte_carlo_sphere([](double, double, double z) { return z * z; }, 100, 100, 7);
  CHECK(z2.value == doctest::Approx(4 * M_PI / 3).epsilon(1e-3));
  CHECK(z2.standard_error < 1e-3);
  const auto again = oracle::monte_carlo_sphere([](double, double, double z) { return z * z; }, 100, 100, 7);
  CHECK(again.value == z2.value);
  CHECK(oracle::gaussian_angular_integral(0.0, 2.0) == doctest::Approx(4 * M_PI));
  CHECK(oracle::golden_rule_prefactor(-6.8, 5.4e3, 3.4e3, 26) > 0);
}
