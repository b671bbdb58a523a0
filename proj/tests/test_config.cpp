#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "telepassive/config.hpp"
#include "telepassive/csv.hpp"
#include "telepassive/numfmt.hpp"
#include "telepassive/sim.hpp"

using namespace telepassive;

#ifndef SCENARIO_DIR
#define SCENARIO_DIR "scenarios"
#endif

namespace {

std::string scenario_path(const std::string& name) {
  return std::string(SCENARIO_DIR) + "/" + name;
}

}  // namespace

TEST_CASE("bundled reference scenarios parse to the expected parameters") {
  const Scenario p = parse_config_file(scenario_path("p_like_sec5.cfg"));
  CHECK(p.master.mass == doctest::Approx(3.5 / 2.2).epsilon(1e-15));
  CHECK(p.master.damping == doctest::Approx(4.0 / 2.2).epsilon(1e-15));
  CHECK(p.sampling.period == 0.002);
  REQUIRE(std::holds_alternative<PLikeGains>(p.law));
  const auto& pg = std::get<PLikeGains>(p.law);
  CHECK(pg.K_master == 1.0);
  CHECK(pg.K_slave == 1.0);
  CHECK(pg.L_master == 0.1);
  CHECK(pg.L_slave == 0.1);
  CHECK(p.wall.contact_position == 4.0);
  CHECK(p.operator_termination.stiffness == 10.0);
  CHECK(p.operator_termination.damping == 1.0);

  const Scenario pd = parse_config_file(scenario_path("pd_like_sec5.cfg"));
  CHECK(pd.sampling.period == 0.005);
  REQUIRE(std::holds_alternative<PDLikeGains>(pd.law));
  const auto& pdg = std::get<PDLikeGains>(pd.law);
  CHECK(pdg.Kd == 1.0);
  CHECK(pdg.K_master == 2.0);
  CHECK(pdg.K_slave == 2.0);
  CHECK(pdg.gamma_master == 1.0);

  const Scenario diss = parse_config_file(scenario_path("pd_diss_sec5.cfg"));
  CHECK(diss.sampling.period == 0.006);
  REQUIRE(std::holds_alternative<PDDissipationGains>(diss.law));
  const auto& dg = std::get<PDDissipationGains>(diss.law);
  CHECK(dg.Kv == 10.0);
  CHECK(dg.Kp == 1.0);
  CHECK(dg.Kd == 2.0);
  CHECK(dg.Peps == 0.002);
  CHECK(diss.delay.nu == 4.0);
}

TEST_CASE("empty config text yields the documented defaults") {
  CHECK(parse_config_text("") == default_scenario());
  CHECK(parse_config_text("# only a comment\n\n") == default_scenario());
}

TEST_CASE("config errors name the offending key and line") {
  SUBCASE("invariant violation names the key") {
    try {
      parse_config_text("sampling.period = -1\n");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("sampling.period") != std::string::npos);
    }
  }
  SUBCASE("unknown key") {
    try {
      parse_config_text("# comment\nmaster.mass = 1\nrobot.weight = 2\n");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("line 3") != std::string::npos);
      CHECK(msg.find("robot.weight") != std::string::npos);
    }
  }
  SUBCASE("duplicate key") {
    CHECK_THROWS_AS(parse_config_text("duration = 1\nduration = 2\n"), ConfigError);
  }
  SUBCASE("malformed number") {
    try {
      parse_config_text("master.mass = heavy\n");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("master.mass") != std::string::npos);
    }
  }
  SUBCASE("missing separator") {
    CHECK_THROWS_AS(parse_config_text("just words\n"), ConfigError);
  }
  SUBCASE("gain key of a different controller family") {
    CHECK_THROWS_AS(parse_config_text("controller.type = pd_like\ncontroller.L.master = 1\n"),
                    ConfigError);
  }
  SUBCASE("unknown controller type") {
    CHECK_THROWS_AS(parse_config_text("controller.type = fuzzy\n"), ConfigError);
  }
  SUBCASE("unknown wall mode") {
    CHECK_THROWS_AS(parse_config_text("wall.mode = bouncy\n"), ConfigError);
  }
}

TEST_CASE("dump and parse round-trip exactly") {
  std::vector<Scenario> scenarios = {default_scenario(),
                                     parse_config_file(scenario_path("p_like_sec5.cfg")),
                                     parse_config_file(scenario_path("pd_like_sec5.cfg")),
                                     parse_config_file(scenario_path("pd_diss_sec5.cfg")),
                                     parse_config_file(scenario_path("p_like_margin.cfg"))};

  Scenario awkward = default_scenario();
  awkward.master.mass = 1.0 / 3.0;
  awkward.slave.damping = 0.1 + 0.2;  // not exactly 0.3
  awkward.sampling.alpha = 1.25;
  awkward.law = PDLikeGains{0.37, 1.0 / 7.0, 2.0 / 7.0, 0.9, 0.85};
  scenarios.push_back(awkward);

  for (const auto& sc : scenarios) {
    const std::string text = dump_config(sc);
    const Scenario back = parse_config_text(text);
    CHECK(back == sc);
    CHECK(dump_config(back) == text);
  }
}

TEST_CASE("format_double round-trips and stays short") {
  CHECK(format_double(0.202) == "0.202");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-15.998) == "-15.998");

  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> dist(-1e6, 1e6);
  for (int i = 0; i < 1000; ++i) {
    const double v = dist(rng);
    const auto parsed = parse_double(format_double(v));
    REQUIRE(parsed.has_value());
    CHECK(*parsed == v);
  }
}

TEST_CASE("csv writers use the fixed column orders") {
  SimulationTrace trace;
  trace.period = 0.5;
  trace.alpha = 1.0;
  trace.samples = {{0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0}};
  CHECK(trace_csv(trace) ==
        "t,q_m,q_s,qdot_m,qdot_s,F_h,F_e,F_m,F_s,energy\n0,1,2,3,4,5,6,7,8,9\n");
  CHECK(positions_csv(trace) == "t,q_m,q_s\n0,1,2\n");
  CHECK(forces_csv(trace) == "t,F_m,F_s\n0,7,8\n");

  PassivityReport master;
  master.per_omega_rhs = {{1.0, 0.25}};
  PassivityReport slave;
  slave.per_omega_rhs = {{1.0, 0.5}};
  CHECK(rhs_csv(master, slave) == "omega,rhs_master,rhs_slave\n1,0.25,0.5\n");
}
