#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "telepassive/model.hpp"

namespace telepassive {

struct PlantState {
  double q_m = 0.0;     // rad
  double q_s = 0.0;     // rad
  double qdot_m = 0.0;  // rad/s
  double qdot_s = 0.0;  // rad/s
  double t = 0.0;       // s
};

/// One row per sample instant. F_m_held / F_s_held are recorded in the transmitted-force
/// convention: each is the coupling torque the side exerts in the master-to-slave
/// direction, so with a symmetric delay-free pair the two columns coincide.
struct TraceRecord {
  double t;
  double q_m;
  double q_s;
  double qdot_m;
  double qdot_s;
  double F_h;       // operator interaction force at the sample instant
  double F_e;       // environment force at the sample instant
  double F_m_held;  // held master coupling torque, constant over [kT, (k+1)T)
  double F_s_held;  // held slave coupling torque, constant over [kT, (k+1)T)
  double energy;    // cumulative energy injected at the two ports, J
};

struct SimulationTrace {
  std::vector<TraceRecord> samples;
  double period = 0.0;
  double alpha = 1.0;
  std::uint64_t scenario_hash = 0;
};

class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(double time, double magnitude);
  double time() const { return time_; }

 private:
  double time_;
};

/// Called once per plant substep with the substep start time and the torques applied
/// over it; used by tests to verify the zero-order-hold structure.
using SubstepProbe = std::function<void(double t, double applied_master, double applied_slave)>;

/// Sampled-data loop: positions sampled at kT, passed through the constant channel
/// delays, fed to the folded discrete controllers, outputs held over [kT, (k+1)T)
/// while the continuous plants advance by fixed-step fourth-order substeps.
SimulationTrace run_simulation(const Scenario& scenario, const SubstepProbe& probe = {});

/// Exact one-interval update of both mass-damper robots under torques that are
/// constant over dt. Composing substeps of any size reproduces the same result.
PlantState plant_substep(const PlantState& state, const RobotParams& master,
                         const RobotParams& slave, double force_master, double force_slave,
                         double dt);

struct EnergyReport {
  std::vector<double> energy;  // cumulative, J
  double min_energy = 0.0;
  bool is_passive = false;  // min_energy >= -gamma_threshold
};

/// Cumulative port energy E(n) = T * sum_{k<=n} (F_h(k) qdot_m(k) - F_e(k) qdot_s(k)).
EnergyReport energy_monitor(const SimulationTrace& trace, double gamma_threshold = 1e-6);

struct TrackingMetrics {
  double max_abs_position_error = 0.0;  // max |q_m - alpha q_s|
  double final_position_error = 0.0;    // |q_m - alpha q_s| at the last sample
  double max_abs_force_error = 0.0;     // max |F_m_held - F_s_held|
};

TrackingMetrics tracking_metrics(const SimulationTrace& trace);

/// Deterministic digest of every scenario field; stored in the trace metadata.
std::uint64_t scenario_hash(const Scenario& scenario);

}  // namespace telepassive
