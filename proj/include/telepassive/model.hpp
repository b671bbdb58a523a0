#pragma once

#include <complex>
#include <string>
#include <variant>
#include <vector>

namespace telepassive {

enum class Side { master, slave };

/// Frequency-domain convention for a robot: `impedance` is Z(jw) = mass*jw + damping,
/// `reciprocal` is its inverse (the admittance form some references print).
enum class ZConvention { impedance, reciprocal };

/// 1-DOF rigid robot: inertia plus viscous damping.
struct RobotParams {
  double mass = 1.0;     // kg*m^2 (rotary) or kg (linear)
  double damping = 0.0;  // N*m*s/rad or N*s/m

  bool operator==(const RobotParams&) const = default;
};

/// One piecewise-constant segment of an exogenous force signal, active on [start, end).
struct ForceSegment {
  double start = 0.0;      // s
  double end = 0.0;        // s
  double magnitude = 0.0;  // N*m

  bool operator==(const ForceSegment&) const = default;
};

/// Spring-damper termination with an exogenous drive; models the operator hand.
struct TerminationModel {
  double stiffness = 0.0;  // N*m/rad
  double damping = 0.0;    // N*m*s/rad
  std::vector<ForceSegment> force_segments;

  double exogenous_force_at(double t) const;

  bool operator==(const TerminationModel&) const = default;
};

enum class WallMode { spring, rigid_reflect };

/// Environment wall the slave contacts once it passes contact_position.
struct WallModel {
  double contact_position = 0.0;  // rad
  double stiffness = 0.0;         // N*m/rad, used in spring mode
  WallMode mode = WallMode::spring;

  bool operator==(const WallModel&) const = default;
};

/// Proportional coupling with damping injection, gains per side.
struct PLikeGains {
  double K_master = 0.0;  // N*m/rad
  double L_master = 0.0;  // N*m*s/rad
  double K_slave = 0.0;
  double L_slave = 0.0;

  bool operator==(const PLikeGains&) const = default;
};

/// PD coupling. Each side's derivative path is weighted by the remote side's gamma.
struct PDLikeGains {
  double Kd = 0.0;  // N*m*s/rad, shared derivative gain
  double K_master = 0.0;
  double K_slave = 0.0;
  double gamma_master = 1.0;  // in (0, 1]
  double gamma_slave = 1.0;

  bool operator==(const PDLikeGains&) const = default;
};

/// PD coupling with coordination and dissipation terms; identical on both sides.
struct PDDissipationGains {
  double Kv = 0.0;    // N*m*s/rad, coordination damping
  double Kp = 0.0;    // N*m/rad
  double Kd = 0.0;    // N*m*s/rad, dissipation
  double Peps = 0.0;  // N*m*s/rad, extra damping

  bool operator==(const PDDissipationGains&) const = default;
};

using ControllerLaw = std::variant<PLikeGains, PDLikeGains, PDDissipationGains>;

struct SamplingConfig {
  double period = 0.002;  // s
  double alpha = 1.0;     // position scaling factor, > 0
  int substeps = 100;     // plant integration substeps per period

  bool operator==(const SamplingConfig&) const = default;
};

struct DelayConfig {
  double forward = 0.0;   // master -> slave, s
  double backward = 0.0;  // slave -> master, s
  double nu = 0.0;        // upper bound on forward + backward, s

  bool operator==(const DelayConfig&) const = default;
};

struct Scenario {
  RobotParams master;
  RobotParams slave;
  TerminationModel operator_termination;
  WallModel wall;
  ControllerLaw law;
  SamplingConfig sampling;
  DelayConfig delay;
  double duration = 0.0;  // s

  bool operator==(const Scenario&) const = default;
};

struct ValidationIssue {
  std::string field;
  std::string message;
};

/// One issue per violated invariant; an empty result means the scenario is valid.
/// Validating an already-valid scenario is a no-op (the scenario is returned untouched
/// by value semantics), so validation is idempotent.
std::vector<ValidationIssue> validate_scenario(const Scenario& scenario);

/// Throws std::invalid_argument listing every violation.
void ensure_valid(const Scenario& scenario);

/// Z(jw) of a mass-damper robot under the chosen convention. Requires omega >= 0.
std::complex<double> robot_impedance(const RobotParams& robot, double omega,
                                     ZConvention convention = ZConvention::impedance);

}  // namespace telepassive
