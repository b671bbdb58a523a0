#pragma once

#include <string>

#include "telepassive/freq.hpp"
#include "telepassive/sim.hpp"

namespace telepassive {

/// Column order is fixed: t,q_m,q_s,qdot_m,qdot_s,F_h,F_e,F_m,F_s,energy.
std::string trace_csv(const SimulationTrace& trace);

/// omega,rhs_master,rhs_slave; both reports must share one grid.
std::string rhs_csv(const PassivityReport& master, const PassivityReport& slave);

/// omega,sigma_max followed by the scattering matrix entries.
std::string scatter_csv(const ScatteringSweepResult& result);

/// Plot-ready projections of a trace.
std::string positions_csv(const SimulationTrace& trace);
std::string forces_csv(const SimulationTrace& trace);

}  // namespace telepassive
