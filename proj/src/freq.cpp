#include "telepassive/freq.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace telepassive {

namespace {

constexpr double kSingularityGuard = 1e-12;
constexpr double kSingularMatrixGuard = 1e-300;
constexpr double kNyquistSlack = 1.0 + 1e-12;

void check_sweep_frequency(double omega, double T) {
  if (!(omega > 0.0)) throw std::invalid_argument("sweep frequency must be positive");
  if (omega > kNyquistSlack * std::numbers::pi / T) {
    throw std::invalid_argument("sweep frequency exceeds pi/T");
  }
  const double s = std::sin(0.5 * omega * T);
  if (2.0 * s * s < kSingularityGuard) {
    throw std::domain_error("sweep frequency too close to a multiple of the sampling rate");
  }
}

double rhs_at(const DiscreteTransfer& C, double T, double alpha, double omega) {
  const double theta = omega * T;
  const double half_sin = std::sin(0.5 * theta);
  const Complex value = eval_transfer(C, std::polar(1.0, theta));
  const Complex rotated = std::polar(1.0, -0.5 * theta) * value;
  const double scale = T * (alpha + 1.0) / 2.0;
  return -scale * rotated.imag() / half_sin;
}

}  // namespace

FrequencyGrid FrequencyGrid::log_spaced(double omega_min, double omega_max, int points) {
  if (points < 2) throw std::invalid_argument("FrequencyGrid: need at least 2 points");
  if (!(omega_min > 0.0) || !(omega_max > omega_min)) {
    throw std::invalid_argument("FrequencyGrid: need 0 < omega_min < omega_max");
  }
  FrequencyGrid grid;
  grid.omegas.resize(points);
  const double log_lo = std::log(omega_min);
  const double log_hi = std::log(omega_max);
  for (int i = 0; i < points; ++i) {
    grid.omegas[i] = std::exp(log_lo + (log_hi - log_lo) * i / (points - 1));
  }
  grid.omegas.front() = omega_min;
  grid.omegas.back() = omega_max;
  for (std::size_t i = 1; i < grid.omegas.size(); ++i) {
    if (!(grid.omegas[i] > grid.omegas[i - 1])) {
      throw std::invalid_argument("FrequencyGrid: grid is not strictly increasing");
    }
  }
  return grid;
}

FrequencyGrid FrequencyGrid::default_for_period(double T, int points, double omega_min) {
  if (!(T > 0.0)) throw std::invalid_argument("FrequencyGrid: period must be positive");
  return log_spaced(omega_min, std::numbers::pi / T, points);
}

double passivity_rhs(const DiscreteTransfer& C, double T, double alpha, double omega) {
  if (!(T > 0.0)) throw std::invalid_argument("passivity_rhs: period must be positive");
  check_sweep_frequency(omega, T);
  return rhs_at(C, T, alpha, omega);
}

std::vector<double> rhs_over_grid(const DiscreteTransfer& C, double T, double alpha,
                                  const FrequencyGrid& grid, ExecMode mode) {
  if (!(T > 0.0)) throw std::invalid_argument("rhs_over_grid: period must be positive");

  const auto n = static_cast<std::ptrdiff_t>(grid.omegas.size());
  std::vector<double> out(grid.omegas.size());
  if (mode == ExecMode::serial) {
    for (std::ptrdiff_t i = 0; i < n; ++i) out[i] = passivity_rhs(C, T, alpha, grid.omegas[i]);
  } else {
    // Exceptions must not escape the parallel region; flag and rethrow afterwards,
    // in grid order so the first offending point surfaces deterministically.
    std::vector<unsigned char> failed(grid.omegas.size(), 0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      try {
        out[i] = passivity_rhs(C, T, alpha, grid.omegas[i]);
      } catch (...) {
        failed[i] = 1;
      }
    }
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      if (failed[i]) out[i] = passivity_rhs(C, T, alpha, grid.omegas[i]);  // rethrows
    }
  }
  return out;
}

PassivityReport passivity_margin_sweep(const ControllerLaw& law, Side side, double T,
                                       double alpha, const FrequencyGrid& grid,
                                       const RobotParams& robot, ExecMode mode) {
  if (grid.omegas.empty()) throw std::invalid_argument("passivity_margin_sweep: empty grid");
  const DiscreteTransfer C = discretize(law, side, T);
  const std::vector<double> values = rhs_over_grid(C, T, alpha, grid, mode);

  PassivityReport report;
  report.side = side;
  report.robot_damping = robot.damping;
  report.sweep_sup = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] > report.sweep_sup) {
      report.sweep_sup = values[i];
      report.sweep_argmax_omega = grid.omegas[i];
    }
  }
  report.closed_form = closed_form_bound(law, side, T);
  report.passive_by_sweep = robot.damping > report.sweep_sup;
  report.passive_by_closed_form = robot.damping > report.closed_form;
  report.discrepancy_flag =
      std::abs(report.sweep_sup - report.closed_form) >
      kDiscrepancyTolerance * std::abs(report.closed_form);

  report.per_omega_rhs.reserve(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    report.per_omega_rhs.emplace_back(grid.omegas[i], values[i]);
  }
  return report;
}

double closed_form_bound(const ControllerLaw& law, Side side, double T) {
  if (!(T > 0.0)) throw std::invalid_argument("closed_form_bound: period must be positive");
  struct Visitor {
    Side side;
    double T;
    double operator()(const PLikeGains& g) const {
      const double K = side == Side::master ? g.K_master : g.K_slave;
      const double L = side == Side::master ? g.L_master : g.L_slave;
      return K * T + 2.0 * L;
    }
    double operator()(const PDLikeGains& g) const {
      const double K = side == Side::master ? g.K_master : g.K_slave;
      const double gamma = side == Side::master ? g.gamma_slave : g.gamma_master;
      return K * T + 2.0 * g.Kd * gamma;
    }
    double operator()(const PDDissipationGains& g) const {
      return g.Kp * T + 2.0 * g.Kd - 2.0 * g.Peps - 2.0 * g.Kv;
    }
  };
  return std::visit(Visitor{side, T}, law);
}

std::vector<GainCondition> check_gain_conditions(const ControllerLaw& law,
                                                 const DelayConfig& delay) {
  struct Visitor {
    const DelayConfig& delay;

    std::vector<GainCondition> operator()(const PLikeGains& g) const {
      const double lhs = 4.0 * g.L_slave * g.L_master;
      const double rhs = (delay.forward * delay.forward + delay.backward * delay.backward) *
                         g.K_master * g.K_slave;
      return {{"damping-product bound", "4 L_s L_m > (T1^2 + T2^2) K_m K_s", lhs, rhs,
               lhs > rhs}};
    }
    std::vector<GainCondition> operator()(const PDLikeGains& g) const {
      return {{"slave stiffness dominance", "K_s >= K_m", g.K_slave, g.K_master,
               g.K_slave >= g.K_master}};
    }
    std::vector<GainCondition> operator()(const PDDissipationGains& g) const {
      const double target = 0.5 * delay.nu * g.Kp;
      const double tol = 1e-9 * std::max(1.0, std::abs(target));
      return {{"dissipation matched to delay bound", "Kd == (nu/2) Kp", g.Kd, target,
               std::abs(g.Kd - target) <= tol}};
    }
  };
  return std::visit(Visitor{delay}, law);
}

double virtual_wall_bound(double wall_stiffness, double wall_damping, double T) {
  if (!(T > 0.0)) throw std::invalid_argument("virtual_wall_bound: period must be positive");
  return wall_stiffness * T / 2.0 + wall_damping;
}

Mat2c hybrid_matrix(double omega, const RobotParams& master, const RobotParams& slave,
                    Complex C_m, Complex C_s, ZConvention convention) {
  const Complex Z_m = robot_impedance(master, omega, convention);
  const Complex Z_s = robot_impedance(slave, omega, convention);
  const Complex denom = Z_s + C_s;
  if (std::abs(denom) < kSingularMatrixGuard) {
    throw std::domain_error("hybrid_matrix: slave impedance and controller cancel");
  }
  return {Z_m + C_m * Z_s / denom, C_m / denom, -C_s / denom, 1.0 / denom};
}

Mat2c scattering_matrix(const Mat2c& H) {
  // (H + I)^{-1} by adjugate
  const Complex p11 = H.a11 + 1.0;
  const Complex p22 = H.a22 + 1.0;
  const Complex det = p11 * p22 - H.a12 * H.a21;
  if (std::abs(det) < kSingularMatrixGuard) {
    throw std::domain_error("scattering_matrix: H + I is singular");
  }
  const Complex i11 = p22 / det;
  const Complex i12 = -H.a12 / det;
  const Complex i21 = -H.a21 / det;
  const Complex i22 = p11 / det;

  const Complex m11 = H.a11 - 1.0;
  const Complex m22 = H.a22 - 1.0;
  // diag(1, -1) * (H - I) * (H + I)^{-1}
  return {m11 * i11 + H.a12 * i21, m11 * i12 + H.a12 * i22,
          -(H.a21 * i11 + m22 * i21), -(H.a21 * i12 + m22 * i22)};
}

double max_singular_value_2x2(const Mat2c& S) {
  const double g11 = std::norm(S.a11) + std::norm(S.a21);
  const double g22 = std::norm(S.a12) + std::norm(S.a22);
  const Complex g12 = std::conj(S.a11) * S.a12 + std::conj(S.a21) * S.a22;
  const double t = g11 + g22;
  const double d = g11 * g22 - std::norm(g12);
  const double disc = std::max(0.0, t * t - 4.0 * d);
  return std::sqrt(std::max(0.0, 0.5 * (t + std::sqrt(disc))));
}

CouplingFunctions continuous_coupling(const ControllerLaw& law) {
  struct Visitor {
    CouplingFunctions operator()(const PLikeGains& g) const {
      return {[g](double w) { return Complex{g.K_master, -g.L_master * w}; },
              [g](double w) { return Complex{g.K_slave, -g.L_slave * w}; }};
    }
    CouplingFunctions operator()(const PDLikeGains& g) const {
      return {[g](double w) { return Complex{g.K_master, g.Kd * g.gamma_slave * w}; },
              [g](double w) { return Complex{g.K_slave, g.Kd * g.gamma_master * w}; }};
    }
    CouplingFunctions operator()(const PDDissipationGains& g) const {
      const double sum = g.Kv + g.Kd + g.Peps;
      auto f = [Kp = g.Kp, sum](double w) { return Complex{-Kp, -sum * w}; };
      return {f, f};
    }
  };
  return std::visit(Visitor{}, law);
}

CouplingFunctions discrete_coupling(DiscreteTransfer C_m, DiscreteTransfer C_s) {
  auto make = [](DiscreteTransfer C) {
    return [C = std::move(C)](double w) { return eval_transfer(C, std::polar(1.0, w * C.period)); };
  };
  return {make(std::move(C_m)), make(std::move(C_s))};
}

namespace {

ScatteringSample scatter_at(double omega, const ScatteringSweepInputs& in) {
  ScatteringSample sample;
  sample.omega = omega;
  sample.H = hybrid_matrix(omega, in.master, in.slave, in.coupling.master(omega),
                           in.coupling.slave(omega), in.convention);
  sample.S = scattering_matrix(sample.H);
  sample.sigma_max = max_singular_value_2x2(sample.S);
  return sample;
}

}  // namespace

ScatteringSweepResult scattering_sweep(const FrequencyGrid& grid,
                                       const ScatteringSweepInputs& inputs, ExecMode mode) {
  if (grid.omegas.empty()) throw std::invalid_argument("scattering_sweep: empty grid");

  const auto n = static_cast<std::ptrdiff_t>(grid.omegas.size());
  ScatteringSweepResult result;
  result.samples.resize(grid.omegas.size());
  std::vector<unsigned char> failed(grid.omegas.size(), 0);

  auto scatter_or_rethrow = [&inputs](double omega) {
    try {
      return scatter_at(omega, inputs);
    } catch (const std::exception& e) {
      throw std::domain_error(std::string(e.what()) + " at omega=" + std::to_string(omega));
    }
  };

  if (mode == ExecMode::serial) {
    for (std::ptrdiff_t i = 0; i < n; ++i) result.samples[i] = scatter_or_rethrow(grid.omegas[i]);
  } else {
    // Exceptions must not escape the parallel region; flag and rethrow afterwards,
    // in grid order so the first offending point surfaces deterministically.
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      try {
        result.samples[i] = scatter_at(grid.omegas[i], inputs);
      } catch (...) {
        failed[i] = 1;
      }
    }
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      if (failed[i]) result.samples[i] = scatter_or_rethrow(grid.omegas[i]);
    }
  }

  result.passive = true;
  result.worst_sigma = -1.0;
  for (const auto& sample : result.samples) {
    if (sample.sigma_max > result.worst_sigma) {
      result.worst_sigma = sample.sigma_max;
      result.worst_omega = sample.omega;
    }
    if (sample.sigma_max > 1.0) result.passive = false;
  }
  return result;
}

WavePair wave_transform(Complex force, Complex velocity, double R0, Port port) {
  if (!(R0 > 0.0)) throw std::invalid_argument("wave_transform: R0 must be positive");
  const double scale = 2.0 * std::sqrt(R0);
  const Complex rv = R0 * velocity;
  if (port == Port::one) return {(force + rv) / scale, (force - rv) / scale};
  return {(force - rv) / scale, (force + rv) / scale};
}

WaveVariables wave_variables(Complex F_master, Complex V_master, Complex F_env, Complex V_env,
                             double R0) {
  const WavePair one = wave_transform(F_master, V_master, R0, Port::one);
  const WavePair two = wave_transform(F_env, V_env, R0, Port::two);
  return {one.a, two.a, one.b, two.b, R0};
}

}  // namespace telepassive
