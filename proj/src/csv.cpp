#include "telepassive/csv.hpp"

#include <sstream>
#include <stdexcept>

#include "telepassive/numfmt.hpp"

namespace telepassive {

namespace {

void append_row(std::string& out, std::initializer_list<double> values) {
  bool first = true;
  for (double v : values) {
    if (!first) out += ',';
    out += format_double(v);
    first = false;
  }
  out += '\n';
}

}  // namespace

std::string trace_csv(const SimulationTrace& trace) {
  std::string out = "t,q_m,q_s,qdot_m,qdot_s,F_h,F_e,F_m,F_s,energy\n";
  for (const auto& r : trace.samples) {
    append_row(out, {r.t, r.q_m, r.q_s, r.qdot_m, r.qdot_s, r.F_h, r.F_e, r.F_m_held, r.F_s_held,
                     r.energy});
  }
  return out;
}

std::string rhs_csv(const PassivityReport& master, const PassivityReport& slave) {
  if (master.per_omega_rhs.size() != slave.per_omega_rhs.size()) {
    throw std::invalid_argument("rhs_csv: reports use different grids");
  }
  std::string out = "omega,rhs_master,rhs_slave\n";
  for (std::size_t i = 0; i < master.per_omega_rhs.size(); ++i) {
    if (master.per_omega_rhs[i].first != slave.per_omega_rhs[i].first) {
      throw std::invalid_argument("rhs_csv: reports use different grids");
    }
    append_row(out, {master.per_omega_rhs[i].first, master.per_omega_rhs[i].second,
                     slave.per_omega_rhs[i].second});
  }
  return out;
}

std::string scatter_csv(const ScatteringSweepResult& result) {
  std::string out =
      "omega,sigma_max,s11_re,s11_im,s12_re,s12_im,s21_re,s21_im,s22_re,s22_im\n";
  for (const auto& sample : result.samples) {
    append_row(out, {sample.omega, sample.sigma_max, sample.S.a11.real(), sample.S.a11.imag(),
                     sample.S.a12.real(), sample.S.a12.imag(), sample.S.a21.real(),
                     sample.S.a21.imag(), sample.S.a22.real(), sample.S.a22.imag()});
  }
  return out;
}

std::string positions_csv(const SimulationTrace& trace) {
  std::string out = "t,q_m,q_s\n";
  for (const auto& r : trace.samples) append_row(out, {r.t, r.q_m, r.q_s});
  return out;
}

std::string forces_csv(const SimulationTrace& trace) {
  std::string out = "t,F_m,F_s\n";
  for (const auto& r : trace.samples) append_row(out, {r.t, r.F_m_held, r.F_s_held});
  return out;
}

}  // namespace telepassive
