#pragma once

#include <complex>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "telepassive/control.hpp"
#include "telepassive/model.hpp"

namespace telepassive {

using Complex = std::complex<double>;

/// Strictly increasing positive frequencies, rad/s. For sampled-system sweeps the
/// grid must stay within (0, pi/T].
struct FrequencyGrid {
  std::vector<double> omegas;

  /// Log-spaced grid with both endpoints included exactly.
  static FrequencyGrid log_spaced(double omega_min, double omega_max, int points);

  /// Default analysis grid for sampling period T: 2000 log points on [1e-3, pi/T].
  static FrequencyGrid default_for_period(double T, int points = 2000, double omega_min = 1e-3);
};

/// Sweep kernels come in two flavors: a plain serial loop kept as the reference,
/// and an OpenMP-parallel version. Both produce bit-identical results because each
/// grid point is evaluated independently and reductions run serially in grid order.
enum class ExecMode { serial, parallel };

/// Frequency-wise damping threshold of the sampled passivity condition:
///   c * Re{(1 - e^{-jwT}) C(e^{jwT})} / (1 - cos wT),   c = T (alpha + 1) / 2.
/// Evaluated through the half-angle identity
///   -c * Im{e^{-jwT/2} C(e^{jwT})} / sin(wT/2)
/// which is algebraically identical but avoids the 0/0 cancellation as wT -> 0.
/// Requires 0 < omega <= pi/T; throws std::domain_error when |1 - cos wT| < 1e-12.
double passivity_rhs(const DiscreteTransfer& C, double T, double alpha, double omega);

std::vector<double> rhs_over_grid(const DiscreteTransfer& C, double T, double alpha,
                                  const FrequencyGrid& grid, ExecMode mode = ExecMode::parallel);

/// Relative disagreement between sweep supremum and closed-form bound above which
/// the two routes are flagged as inconsistent.
inline constexpr double kDiscrepancyTolerance = 1e-2;

struct PassivityReport {
  Side side = Side::master;
  double sweep_sup = 0.0;
  double sweep_argmax_omega = 0.0;
  double closed_form = 0.0;
  double robot_damping = 0.0;
  bool passive_by_sweep = false;        // robot_damping > sweep_sup
  bool passive_by_closed_form = false;  // robot_damping > closed_form
  bool discrepancy_flag = false;
  std::vector<std::pair<double, double>> per_omega_rhs;
};

PassivityReport passivity_margin_sweep(const ControllerLaw& law, Side side, double T,
                                       double alpha, const FrequencyGrid& grid,
                                       const RobotParams& robot,
                                       ExecMode mode = ExecMode::parallel);

/// Closed-form damping bound of each controller family:
///   p-like:           K T + 2 L
///   pd-like:          K T + 2 Kd gamma   (gamma of the remote side)
///   pd + dissipation: Kp T + 2 Kd - 2 Peps - 2 Kv
double closed_form_bound(const ControllerLaw& law, Side side, double T);

struct GainCondition {
  std::string name;
  std::string detail;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

/// Auxiliary gain conditions per family:
///   p-like:           4 L_s L_m > (T1^2 + T2^2) K_m K_s
///   pd-like:          K_s >= K_m
///   pd + dissipation: Kd == (nu/2) Kp  (within 1e-9 absolute, scaled)
std::vector<GainCondition> check_gain_conditions(const ControllerLaw& law,
                                                 const DelayConfig& delay);

/// Minimum interface damping for a sampled virtual wall: K T / 2 + B.
double virtual_wall_bound(double wall_stiffness, double wall_damping, double T);

struct Mat2c {
  Complex a11, a12, a21, a22;
};

/// Two-port hybrid matrix of the coupled pair at one frequency:
///   [[Z_m + C_m Z_s/(Z_s + C_s), C_m/(Z_s + C_s)],
///    [-C_s/(Z_s + C_s),          1/(Z_s + C_s)]]
Mat2c hybrid_matrix(double omega, const RobotParams& master, const RobotParams& slave,
                    Complex C_m, Complex C_s, ZConvention convention = ZConvention::impedance);

/// S = diag(1, -1) (H - I)(H + I)^{-1}. Throws std::domain_error when H + I is singular.
Mat2c scattering_matrix(const Mat2c& H);

/// Largest singular value from the quadratic characteristic polynomial of S^H S:
/// sigma_max = sqrt((t + sqrt(t^2 - 4d))/2), t = trace, d = det.
double max_singular_value_2x2(const Mat2c& S);

struct ScatteringSample {
  double omega = 0.0;
  Mat2c H{};
  Mat2c S{};
  double sigma_max = 0.0;
};

/// Per-side controller response evaluated at a frequency in rad/s.
struct CouplingFunctions {
  std::function<Complex(double)> master;
  std::function<Complex(double)> slave;
};

/// C(jw) of the continuous-time law each discrete controller derives from.
CouplingFunctions continuous_coupling(const ControllerLaw& law);

/// C(e^{jwT}) of an already-discretized pair.
CouplingFunctions discrete_coupling(DiscreteTransfer C_m, DiscreteTransfer C_s);

struct ScatteringSweepInputs {
  RobotParams master;
  RobotParams slave;
  CouplingFunctions coupling;
  ZConvention convention = ZConvention::impedance;
};

struct ScatteringSweepResult {
  std::vector<ScatteringSample> samples;
  bool passive = false;  // sigma_max <= 1 at every grid point
  double worst_omega = 0.0;
  double worst_sigma = 0.0;
};

ScatteringSweepResult scattering_sweep(const FrequencyGrid& grid,
                                       const ScatteringSweepInputs& inputs,
                                       ExecMode mode = ExecMode::parallel);

enum class Port { one, two };

struct WavePair {
  Complex a;  // incident wave
  Complex b;  // reflected wave
};

/// Force/velocity to wave variables at characteristic impedance R0 > 0.
/// Port one: a = (F + R0 V)/(2 sqrt(R0)), b = (F - R0 V)/(2 sqrt(R0)); port two swaps signs.
WavePair wave_transform(Complex force, Complex velocity, double R0, Port port);

struct WaveVariables {
  Complex a1, a2, b1, b2;
  double R0 = 1.0;
};

WaveVariables wave_variables(Complex F_master, Complex V_master, Complex F_env, Complex V_env,
                             double R0);

}  // namespace telepassive
