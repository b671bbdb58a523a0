#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "telepassive/freq.hpp"

using namespace telepassive;
using std::numbers::pi;

// Hand-derived reductions of the sweep integrand, used as independent oracles.
// With C(z) = K - L (z-1)/(T z):
//   Re{(1 - e^{-jt})C(e^{jt})} = K (1-cos t) + (2L/T) cos t (1-cos t)
// so dividing by (1-cos t) and scaling by T leaves  K T + 2 L cos(wT).
// The pd-like transfer Kd*g (z-1)/(T z) + K reduces the same way with the
// opposite sign on the difference path:  K T - 2 Kd g cos(wT).

TEST_CASE("passivity_rhs anchors for the p-like transfer") {
  const ControllerLaw law = PLikeGains{1.0, 0.1, 1.0, 0.1};
  const double T = 0.002;
  const auto C = discretize(law, Side::master, T);

  CHECK(passivity_rhs(C, T, 1.0, (pi / 2.0) / T) == doctest::Approx(0.002).epsilon(1e-9));
  CHECK(passivity_rhs(C, T, 1.0, pi / T) == doctest::Approx(-0.198).epsilon(1e-12));
}

TEST_CASE("passivity_rhs of the zero controller is zero") {
  const auto C = discretize(PLikeGains{0.0, 0.0, 0.0, 0.0}, Side::master, 0.002);
  for (const double omega : {1e-3, 1.0, 100.0, pi / 0.002}) {
    CHECK(passivity_rhs(C, 0.002, 1.0, omega) == 0.0);
  }
}

TEST_CASE("passivity_rhs rejects frequencies at the sampling singularity") {
  const auto C = discretize(PLikeGains{1.0, 0.1, 1.0, 0.1}, Side::master, 0.002);
  CHECK_THROWS_AS(passivity_rhs(C, 0.002, 1.0, 1e-4), std::domain_error);
  CHECK_THROWS_AS(passivity_rhs(C, 0.002, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(passivity_rhs(C, 0.002, 1.0, 2.0 * pi / 0.002), std::invalid_argument);
}

TEST_CASE("passivity_rhs matches the analytic reductions across the default grid") {
  const double T = 0.002;
  const auto grid = FrequencyGrid::default_for_period(T);

  SUBCASE("p-like") {
    const double K = 1.0, L = 0.1;
    const auto C = discretize(PLikeGains{K, L, K, L}, Side::master, T);
    for (const double omega : grid.omegas) {
      const double expected = K * T + 2.0 * L * std::cos(omega * T);
      CHECK(std::abs(passivity_rhs(C, T, 1.0, omega) - expected) < 1e-10);
    }
  }
  SUBCASE("pd-like") {
    const double K = 2.0, Kd = 1.0, gamma = 1.0;
    const auto C = discretize(PDLikeGains{Kd, K, K, gamma, gamma}, Side::master, T);
    for (const double omega : grid.omegas) {
      const double expected = K * T - 2.0 * Kd * gamma * std::cos(omega * T);
      CHECK(std::abs(passivity_rhs(C, T, 1.0, omega) - expected) < 1e-10);
    }
  }
}

TEST_CASE("passivity_rhs scaling constant covers alpha != 1") {
  const double T = 0.004;
  const auto C = discretize(PLikeGains{1.0, 0.2, 1.0, 0.2}, Side::slave, T);
  const double omega = 50.0;
  const double base = passivity_rhs(C, T, 1.0, omega);
  // c = T (alpha+1)/2 scales linearly in (alpha+1)
  CHECK(passivity_rhs(C, T, 3.0, omega) == doctest::Approx(2.0 * base).epsilon(1e-12));
}

TEST_CASE("passivity_margin_sweep reproduces the closed forms") {
  const RobotParams plant{3.5 / 2.2, 4.0 / 2.2};

  SUBCASE("p-like supremum is approached at the low end") {
    const ControllerLaw law = PLikeGains{1.0, 0.1, 1.0, 0.1};
    const double T = 0.002;
    const auto grid = FrequencyGrid::default_for_period(T);
    const auto report = passivity_margin_sweep(law, Side::master, T, 1.0, grid, plant);
    CHECK(report.closed_form == 0.202);
    CHECK(report.sweep_sup == doctest::Approx(0.202).epsilon(1e-3));
    CHECK(report.sweep_argmax_omega == grid.omegas.front());
    CHECK(report.passive_by_sweep);
    CHECK(report.passive_by_closed_form);
    CHECK_FALSE(report.discrepancy_flag);
    CHECK(report.per_omega_rhs.size() == grid.omegas.size());
  }

  SUBCASE("pd-like supremum is attained at Nyquist") {
    const ControllerLaw law = PDLikeGains{1.0, 2.0, 2.0, 1.0, 1.0};
    const double T = 0.005;
    const auto grid = FrequencyGrid::default_for_period(T);
    const auto report = passivity_margin_sweep(law, Side::master, T, 1.0, grid, plant);
    CHECK(report.closed_form == 2.01);
    CHECK(std::abs(report.sweep_sup - 2.01) < 1e-9);
    CHECK(report.sweep_argmax_omega == grid.omegas.back());
    CHECK_FALSE(report.discrepancy_flag);
  }

  SUBCASE("single-point grid at Nyquist carries the pd-like supremum") {
    const ControllerLaw law = PDLikeGains{1.0, 2.0, 2.0, 1.0, 1.0};
    const double T = 0.005;
    FrequencyGrid grid;
    grid.omegas = {pi / T};
    const auto report = passivity_margin_sweep(law, Side::slave, T, 1.0, grid, plant);
    REQUIRE(report.per_omega_rhs.size() == 1);
    CHECK(std::abs(report.per_omega_rhs[0].second - 2.01) < 1e-9);
  }

  SUBCASE("zero-gain law is passive for any positive damping") {
    const ControllerLaw law = PLikeGains{0.0, 0.0, 0.0, 0.0};
    const auto grid = FrequencyGrid::default_for_period(0.002);
    const auto report =
        passivity_margin_sweep(law, Side::slave, 0.002, 1.0, grid, {1.0, 0.5});
    CHECK(report.sweep_sup == 0.0);
    CHECK(report.passive_by_sweep);
    CHECK_FALSE(report.discrepancy_flag);
  }

  SUBCASE("pd-with-dissipation raises the discrepancy flag") {
    const ControllerLaw law = PDDissipationGains{10.0, 1.0, 2.0, 0.002};
    const double T = 0.006;
    const auto grid = FrequencyGrid::default_for_period(T);
    const auto report = passivity_margin_sweep(law, Side::master, T, 1.0, grid, plant);
    CHECK(report.closed_form == -15.998);
    CHECK(report.sweep_sup > 20.0);  // the two routes disagree by design
    CHECK(report.discrepancy_flag);
    CHECK_FALSE(report.passive_by_sweep);
    CHECK(report.passive_by_closed_form);
  }
}

TEST_CASE("sweep supremum never drops when the grid is refined") {
  const ControllerLaw law = PLikeGains{1.0, 0.1, 1.0, 0.1};
  const double T = 0.002;
  const RobotParams plant{1.0, 1.0};
  const auto coarse = FrequencyGrid::default_for_period(T, 200);

  FrequencyGrid refined = coarse;
  for (std::size_t i = 0; i + 1 < coarse.omegas.size(); ++i) {
    refined.omegas.push_back(0.5 * (coarse.omegas[i] + coarse.omegas[i + 1]));
  }
  std::sort(refined.omegas.begin(), refined.omegas.end());

  const double sup_coarse =
      passivity_margin_sweep(law, Side::master, T, 1.0, coarse, plant).sweep_sup;
  const double sup_refined =
      passivity_margin_sweep(law, Side::master, T, 1.0, refined, plant).sweep_sup;
  CHECK(sup_refined >= sup_coarse);
}

TEST_CASE("sweep and closed form agree within 0.1% for p-like and pd-like") {
  const RobotParams plant{1.0, 1.0};
  const std::vector<std::pair<ControllerLaw, double>> cases = {
      {PLikeGains{1.0, 0.1, 1.0, 0.1}, 0.002},
      {PDLikeGains{1.0, 2.0, 2.0, 1.0, 1.0}, 0.005},
  };
  for (const auto& [law, T] : cases) {
    const auto grid = FrequencyGrid::default_for_period(T);
    const auto report = passivity_margin_sweep(law, Side::master, T, 1.0, grid, plant);
    CHECK(std::abs(report.sweep_sup - report.closed_form) / report.closed_form < 1e-3);
  }
}

TEST_CASE("serial and parallel sweeps are bit-identical") {
  const double T = 0.003;
  const auto grid = FrequencyGrid::default_for_period(T, 501);
  const auto C = discretize(PDLikeGains{1.2, 2.0, 1.7, 0.9, 0.8}, Side::slave, T);
  const auto serial = rhs_over_grid(C, T, 1.0, grid, ExecMode::serial);
  const auto parallel = rhs_over_grid(C, T, 1.0, grid, ExecMode::parallel);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) CHECK(serial[i] == parallel[i]);
}

TEST_CASE("closed_form_bound per family") {
  CHECK(closed_form_bound(PLikeGains{1.0, 0.1, 1.0, 0.1}, Side::master, 0.002) == 0.202);
  CHECK(closed_form_bound(PDLikeGains{1.0, 2.0, 2.0, 1.0, 1.0}, Side::slave, 0.005) == 2.01);
  CHECK(closed_form_bound(PDDissipationGains{10.0, 1.0, 2.0, 0.002}, Side::master, 0.006) ==
        -15.998);

  // the pd-like bound pairs each side with the remote gamma
  const ControllerLaw crossed = PDLikeGains{1.0, 2.0, 3.0, 0.5, 0.25};
  CHECK(closed_form_bound(crossed, Side::master, 0.01) == 2.0 * 0.01 + 2.0 * 1.0 * 0.25);
  CHECK(closed_form_bound(crossed, Side::slave, 0.01) == 3.0 * 0.01 + 2.0 * 1.0 * 0.5);
}

TEST_CASE("check_gain_conditions per family") {
  SUBCASE("p-like damping product") {
    const ControllerLaw law = PLikeGains{1.0, 0.1, 1.0, 0.1};
    const auto pass = check_gain_conditions(law, {0.1, 0.1, 0.2});
    REQUIRE(pass.size() == 1);
    CHECK(pass[0].lhs == doctest::Approx(0.04).epsilon(1e-15));
    CHECK(pass[0].rhs == doctest::Approx(0.02).epsilon(1e-15));
    CHECK(pass[0].pass);

    const ControllerLaw weak = PLikeGains{1.0, 0.05, 1.0, 0.05};
    CHECK_FALSE(check_gain_conditions(weak, {0.1, 0.1, 0.2})[0].pass);
  }
  SUBCASE("pd-like slave stiffness dominance allows equality") {
    CHECK(check_gain_conditions(PDLikeGains{1.0, 2.0, 2.0, 1.0, 1.0}, {})[0].pass);
    CHECK(check_gain_conditions(PDLikeGains{1.0, 2.0, 2.5, 1.0, 1.0}, {})[0].pass);
    CHECK_FALSE(check_gain_conditions(PDLikeGains{1.0, 2.0, 1.9, 1.0, 1.0}, {})[0].pass);
  }
  SUBCASE("dissipation gain matched to the delay bound") {
    const DelayConfig delay{0.0, 0.0, 4.0};
    CHECK(check_gain_conditions(PDDissipationGains{10.0, 1.0, 2.0, 0.002}, delay)[0].pass);
    CHECK_FALSE(check_gain_conditions(PDDissipationGains{10.0, 1.0, 2.1, 0.002}, delay)[0].pass);
  }
}

TEST_CASE("virtual_wall_bound") {
  CHECK(virtual_wall_bound(1000.0, 0.0, 0.001) == 0.5);
  CHECK(virtual_wall_bound(0.0, 0.0, 0.37) == 0.0);
  CHECK(virtual_wall_bound(200.0, 1.0, 0.01) == 2.0);
}

TEST_CASE("frequency grid construction") {
  const auto grid = FrequencyGrid::log_spaced(1e-3, pi / 0.002, 2000);
  CHECK(grid.omegas.size() == 2000);
  CHECK(grid.omegas.front() == 1e-3);
  CHECK(grid.omegas.back() == pi / 0.002);  // Nyquist included exactly
  CHECK_THROWS_AS(FrequencyGrid::log_spaced(0.0, 1.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(FrequencyGrid::log_spaced(1.0, 1.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(FrequencyGrid::log_spaced(1e-3, 1.0, 1), std::invalid_argument);
}
