#include "telepassive/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace telepassive {

double TerminationModel::exogenous_force_at(double t) const {
  double total = 0.0;
  for (const auto& seg : force_segments) {
    if (t >= seg.start && t < seg.end) total += seg.magnitude;
  }
  return total;
}

namespace {

void require(std::vector<ValidationIssue>& issues, bool ok, const std::string& field,
             const std::string& message) {
  if (!ok) issues.push_back({field, message});
}

void check_robot(std::vector<ValidationIssue>& issues, const RobotParams& robot,
                 const std::string& prefix) {
  require(issues, robot.mass > 0.0, prefix + ".mass", "mass must be positive");
  require(issues, robot.damping >= 0.0, prefix + ".damping", "damping must be non-negative");
}

void check_termination(std::vector<ValidationIssue>& issues, const TerminationModel& term,
                       const std::string& prefix) {
  require(issues, term.stiffness >= 0.0, prefix + ".stiffness", "stiffness must be non-negative");
  require(issues, term.damping >= 0.0, prefix + ".damping", "damping must be non-negative");

  auto sorted = term.force_segments;
  std::sort(sorted.begin(), sorted.end(),
            [](const ForceSegment& a, const ForceSegment& b) { return a.start < b.start; });
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    require(issues, sorted[i].start < sorted[i].end, prefix + ".force",
            "segment start must precede its end");
    if (i > 0) {
      require(issues, sorted[i].start >= sorted[i - 1].end, prefix + ".force",
              "segments must not overlap");
    }
  }
}

struct LawChecker {
  std::vector<ValidationIssue>& issues;

  void gain(double value, const std::string& field) {
    require(issues, value >= 0.0, field, "gain must be non-negative");
  }
  void gamma(double value, const std::string& field) {
    require(issues, value > 0.0 && value <= 1.0, field, "gamma must lie in (0,1]");
  }

  void operator()(const PLikeGains& g) {
    gain(g.K_master, "controller.K.master");
    gain(g.L_master, "controller.L.master");
    gain(g.K_slave, "controller.K.slave");
    gain(g.L_slave, "controller.L.slave");
  }
  void operator()(const PDLikeGains& g) {
    gain(g.Kd, "controller.Kd");
    gain(g.K_master, "controller.K.master");
    gain(g.K_slave, "controller.K.slave");
    gamma(g.gamma_master, "controller.gamma.master");
    gamma(g.gamma_slave, "controller.gamma.slave");
  }
  void operator()(const PDDissipationGains& g) {
    gain(g.Kv, "controller.Kv");
    gain(g.Kp, "controller.Kp");
    gain(g.Kd, "controller.Kd");
    gain(g.Peps, "controller.Peps");
  }
};

}  // namespace

std::vector<ValidationIssue> validate_scenario(const Scenario& scenario) {
  std::vector<ValidationIssue> issues;

  check_robot(issues, scenario.master, "master");
  check_robot(issues, scenario.slave, "slave");
  check_termination(issues, scenario.operator_termination, "operator");

  if (scenario.wall.mode == WallMode::spring) {
    require(issues, scenario.wall.stiffness > 0.0, "wall.stiffness",
            "stiffness must be positive in spring mode");
  }

  std::visit(LawChecker{issues}, scenario.law);

  require(issues, scenario.sampling.period > 0.0, "sampling.period", "period must be positive");
  require(issues, scenario.sampling.alpha > 0.0, "sampling.alpha", "alpha must be positive");
  require(issues, scenario.sampling.substeps >= 1, "sampling.substeps",
          "substeps must be at least 1");

  require(issues, scenario.delay.forward >= 0.0, "delay.t1", "delay must be non-negative");
  require(issues, scenario.delay.backward >= 0.0, "delay.t2", "delay must be non-negative");
  require(issues, scenario.delay.nu >= scenario.delay.forward + scenario.delay.backward,
          "delay.nu", "nu must bound the round-trip delay t1 + t2");

  require(issues, scenario.duration > 0.0, "duration", "duration must be positive");

  return issues;
}

void ensure_valid(const Scenario& scenario) {
  const auto issues = validate_scenario(scenario);
  if (issues.empty()) return;
  std::ostringstream oss;
  oss << "invalid scenario:";
  for (const auto& issue : issues) oss << "\n  " << issue.field << ": " << issue.message;
  throw std::invalid_argument(oss.str());
}

std::complex<double> robot_impedance(const RobotParams& robot, double omega,
                                     ZConvention convention) {
  if (omega < 0.0) throw std::invalid_argument("robot_impedance: omega must be non-negative");
  const std::complex<double> z{robot.damping, robot.mass * omega};
  return convention == ZConvention::impedance ? z : 1.0 / z;
}

}  // namespace telepassive
