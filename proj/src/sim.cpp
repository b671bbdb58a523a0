#include "telepassive/sim.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include "telepassive/control.hpp"

namespace telepassive {

namespace {

constexpr double kDivergenceLimit = 1e9;

struct Rates {
  double dq_m, dv_m, dq_s, dv_s;
};

struct HeldTorques {
  double master;  // applied to the master plant
  double slave;   // applied to the slave plant
};

double wall_force(const WallModel& wall, bool engaged, double q_s, double held_slave_torque) {
  if (!engaged) return 0.0;
  if (wall.mode == WallMode::spring) return -wall.stiffness * (q_s - wall.contact_position);
  return -held_slave_torque;  // rigid_reflect: cancel the held drive while in contact
}

double operator_force(const TerminationModel& op, double t, double q_m, double v_m) {
  return op.exogenous_force_at(t) - op.stiffness * q_m - op.damping * v_m;
}

Rates derivatives(const Scenario& sc, const PlantState& st, double t, const HeldTorques& u,
                  bool wall_engaged) {
  const double F_h = operator_force(sc.operator_termination, t, st.q_m, st.qdot_m);
  const double F_e = wall_force(sc.wall, wall_engaged, st.q_s, u.slave);
  return {st.qdot_m,
          (F_h + u.master - sc.master.damping * st.qdot_m) / sc.master.mass,
          st.qdot_s,
          (F_e + u.slave - sc.slave.damping * st.qdot_s) / sc.slave.mass};
}

PlantState advanced(const PlantState& st, const Rates& r, double dt) {
  return {st.q_m + dt * r.dq_m, st.q_s + dt * r.dq_s, st.qdot_m + dt * r.dv_m,
          st.qdot_s + dt * r.dv_s, st.t + dt};
}

// Classic fourth-order step. Wall engagement is frozen at the substep start, so
// contact switching happens only at substep boundaries.
void rk4_substep(const Scenario& sc, PlantState& st, double t, const HeldTorques& u, double dt) {
  const bool engaged = st.q_s > sc.wall.contact_position;
  const Rates k1 = derivatives(sc, st, t, u, engaged);
  const Rates k2 = derivatives(sc, advanced(st, k1, 0.5 * dt), t + 0.5 * dt, u, engaged);
  const Rates k3 = derivatives(sc, advanced(st, k2, 0.5 * dt), t + 0.5 * dt, u, engaged);
  const Rates k4 = derivatives(sc, advanced(st, k3, dt), t + dt, u, engaged);
  const double w = dt / 6.0;
  st.q_m += w * (k1.dq_m + 2.0 * k2.dq_m + 2.0 * k3.dq_m + k4.dq_m);
  st.qdot_m += w * (k1.dv_m + 2.0 * k2.dv_m + 2.0 * k3.dv_m + k4.dv_m);
  st.q_s += w * (k1.dq_s + 2.0 * k2.dq_s + 2.0 * k3.dq_s + k4.dq_s);
  st.qdot_s += w * (k1.dv_s + 2.0 * k2.dv_s + 2.0 * k3.dv_s + k4.dv_s);
  st.t = t + dt;
}

double max_state_magnitude(const PlantState& st) {
  double m = 0.0;
  for (double v : {st.q_m, st.q_s, st.qdot_m, st.qdot_s}) {
    if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
    m = std::max(m, std::abs(v));
  }
  return m;
}

}  // namespace

DivergenceError::DivergenceError(double time, double magnitude)
    : std::runtime_error("simulation diverged at t=" + std::to_string(time) +
                         " s (state magnitude " + std::to_string(magnitude) + ")"),
      time_(time) {}

SimulationTrace run_simulation(const Scenario& scenario, const SubstepProbe& probe) {
  ensure_valid(scenario);

  const double T = scenario.sampling.period;
  const double alpha = scenario.sampling.alpha;
  const int substeps = scenario.sampling.substeps;
  const double dt = T / substeps;

  const DiscreteTransfer C_m = discretize(scenario.law, Side::master, T);
  const DiscreteTransfer C_s = discretize(scenario.law, Side::slave, T);
  ControllerState master_ctrl(C_m);
  ControllerState slave_ctrl(C_s);
  DelayLine to_slave(scenario.delay.forward, T);
  DelayLine to_master(scenario.delay.backward, T);

  // The pd+dissipation transfer is defined on the local-minus-remote error;
  // feeding the negated error keeps the applied torque attractive for every family.
  const bool negate_error = std::holds_alternative<PDDissipationGains>(scenario.law);

  const auto n_samples = static_cast<std::size_t>(std::llround(scenario.duration / T));

  SimulationTrace trace;
  trace.period = T;
  trace.alpha = alpha;
  trace.scenario_hash = scenario_hash(scenario);
  trace.samples.reserve(n_samples);

  PlantState state;
  double energy = 0.0;

  for (std::size_t k = 0; k < n_samples; ++k) {
    const double t = static_cast<double>(k) * T;
    state.t = t;

    const double magnitude = max_state_magnitude(state);
    if (magnitude > kDivergenceLimit) throw DivergenceError(t, magnitude);

    // Ideal sampler followed by the channel delays.
    const double q_m_delayed = to_slave.push(state.q_m);
    const double q_s_delayed = to_master.push(state.q_s);

    // Folded controllers on the scaled position error, outputs held one period.
    const double err_master = alpha * q_s_delayed - state.q_m;
    const double err_slave = q_m_delayed - alpha * state.q_s;
    const double tau_m = master_ctrl.step(negate_error ? -err_master : err_master);
    const double tau_s = slave_ctrl.step(negate_error ? -err_slave : err_slave);
    const HeldTorques held{tau_m, tau_s};

    const bool engaged = state.q_s > scenario.wall.contact_position;
    const double F_h = operator_force(scenario.operator_termination, t, state.q_m, state.qdot_m);
    const double F_e = wall_force(scenario.wall, engaged, state.q_s, tau_s);

    energy += T * (F_h * state.qdot_m - F_e * state.qdot_s);

    trace.samples.push_back({t, state.q_m, state.q_s, state.qdot_m, state.qdot_s, F_h, F_e,
                             -tau_m, tau_s, energy});

    for (int i = 0; i < substeps; ++i) {
      const double t_sub = t + i * dt;
      if (probe) probe(t_sub, tau_m, tau_s);
      rk4_substep(scenario, state, t_sub, held, dt);
    }
  }
  return trace;
}

PlantState plant_substep(const PlantState& state, const RobotParams& master,
                         const RobotParams& slave, double force_master, double force_slave,
                         double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("plant_substep: dt must be positive");

  auto update = [dt](const RobotParams& robot, double force, double q, double v, double& q_out,
                     double& v_out) {
    if (robot.damping > 0.0) {
      const double lambda = robot.damping / robot.mass;
      const double decay = std::exp(-lambda * dt);
      const double settle = -std::expm1(-lambda * dt);  // 1 - e^{-lambda dt}
      const double v_terminal = force / robot.damping;
      v_out = v * decay + v_terminal * settle;
      q_out = q + v_terminal * dt + (v - v_terminal) * settle / lambda;
    } else {
      const double a = force / robot.mass;
      v_out = v + a * dt;
      q_out = q + v * dt + 0.5 * a * dt * dt;
    }
  };

  PlantState out = state;
  update(master, force_master, state.q_m, state.qdot_m, out.q_m, out.qdot_m);
  update(slave, force_slave, state.q_s, state.qdot_s, out.q_s, out.qdot_s);
  out.t = state.t + dt;
  return out;
}

EnergyReport energy_monitor(const SimulationTrace& trace, double gamma_threshold) {
  if (trace.samples.empty()) throw std::invalid_argument("energy_monitor: empty trace");

  EnergyReport report;
  report.energy.reserve(trace.samples.size());
  double cumulative = 0.0;
  double minimum = std::numeric_limits<double>::infinity();
  for (const auto& rec : trace.samples) {
    cumulative += trace.period * (rec.F_h * rec.qdot_m - rec.F_e * rec.qdot_s);
    report.energy.push_back(cumulative);
    minimum = std::min(minimum, cumulative);
  }
  report.min_energy = minimum;
  report.is_passive = minimum >= -gamma_threshold;
  return report;
}

TrackingMetrics tracking_metrics(const SimulationTrace& trace) {
  if (trace.samples.empty()) throw std::invalid_argument("tracking_metrics: empty trace");

  TrackingMetrics metrics;
  for (const auto& rec : trace.samples) {
    const double pos_err = std::abs(rec.q_m - trace.alpha * rec.q_s);
    const double force_err = std::abs(rec.F_m_held - rec.F_s_held);
    metrics.max_abs_position_error = std::max(metrics.max_abs_position_error, pos_err);
    metrics.max_abs_force_error = std::max(metrics.max_abs_force_error, force_err);
  }
  const auto& last = trace.samples.back();
  metrics.final_position_error = std::abs(last.q_m - trace.alpha * last.q_s);
  return metrics;
}

namespace {

void mix(std::uint64_t& h, const void* data, std::size_t size) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;  // FNV-1a
  }
}

void mix_double(std::uint64_t& h, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  mix(h, &bits, sizeof(bits));
}

void mix_int(std::uint64_t& h, std::int64_t v) { mix(h, &v, sizeof(v)); }

}  // namespace

std::uint64_t scenario_hash(const Scenario& sc) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const RobotParams* r : {&sc.master, &sc.slave}) {
    mix_double(h, r->mass);
    mix_double(h, r->damping);
  }
  mix_double(h, sc.operator_termination.stiffness);
  mix_double(h, sc.operator_termination.damping);
  mix_int(h, static_cast<std::int64_t>(sc.operator_termination.force_segments.size()));
  for (const auto& seg : sc.operator_termination.force_segments) {
    mix_double(h, seg.start);
    mix_double(h, seg.end);
    mix_double(h, seg.magnitude);
  }
  mix_double(h, sc.wall.contact_position);
  mix_double(h, sc.wall.stiffness);
  mix_int(h, static_cast<std::int64_t>(sc.wall.mode));
  mix_int(h, static_cast<std::int64_t>(sc.law.index()));
  std::visit(
      [&h](const auto& gains) {
        using G = std::decay_t<decltype(gains)>;
        if constexpr (std::is_same_v<G, PLikeGains>) {
          mix_double(h, gains.K_master);
          mix_double(h, gains.L_master);
          mix_double(h, gains.K_slave);
          mix_double(h, gains.L_slave);
        } else if constexpr (std::is_same_v<G, PDLikeGains>) {
          mix_double(h, gains.Kd);
          mix_double(h, gains.K_master);
          mix_double(h, gains.K_slave);
          mix_double(h, gains.gamma_master);
          mix_double(h, gains.gamma_slave);
        } else {
          mix_double(h, gains.Kv);
          mix_double(h, gains.Kp);
          mix_double(h, gains.Kd);
          mix_double(h, gains.Peps);
        }
      },
      sc.law);
  mix_double(h, sc.sampling.period);
  mix_double(h, sc.sampling.alpha);
  mix_int(h, sc.sampling.substeps);
  mix_double(h, sc.delay.forward);
  mix_double(h, sc.delay.backward);
  mix_double(h, sc.delay.nu);
  mix_double(h, sc.duration);
  return h;
}

}  // namespace telepassive
