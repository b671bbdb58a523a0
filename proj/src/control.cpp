#include "telepassive/control.hpp"

#include <cmath>
#include <stdexcept>

namespace telepassive {

namespace {

constexpr double kPoleGuard = 1e-300;

struct Discretizer {
  Side side;
  double T;

  DiscreteTransfer operator()(const PLikeGains& g) const {
    const double K = side == Side::master ? g.K_master : g.K_slave;
    const double L = side == Side::master ? g.L_master : g.L_slave;
    // K - L (z-1)/(T z) = ((K T - L) z + L) / (T z)
    return {{K * T - L, L}, {T, 0.0}, T};
  }

  DiscreteTransfer operator()(const PDLikeGains& g) const {
    const double K = side == Side::master ? g.K_master : g.K_slave;
    const double gamma = side == Side::master ? g.gamma_slave : g.gamma_master;
    // Kd*gamma (z-1)/(T z) + K = ((Kd*gamma + K T) z - Kd*gamma) / (T z)
    return {{g.Kd * gamma + K * T, -g.Kd * gamma}, {T, 0.0}, T};
  }

  DiscreteTransfer operator()(const PDDissipationGains& g) const {
    const double sum = g.Kv + g.Kd + g.Peps;
    // -(Kv + Kd + Peps)(z-1)/(T z) - Kp = ((-sum - Kp T) z + sum) / (T z)
    return {{-sum - g.Kp * T, sum}, {T, 0.0}, T};
  }
};

}  // namespace

DiscreteTransfer discretize(const ControllerLaw& law, Side side, double T) {
  if (!(T > 0.0)) throw std::invalid_argument("discretize: sampling period must be positive");
  return std::visit(Discretizer{side, T}, law);
}

std::pair<DiscreteTransfer, DiscreteTransfer> controller_pair(const ControllerLaw& law,
                                                              double alpha, double T) {
  if (!(alpha > 0.0)) throw std::invalid_argument("controller_pair: alpha must be positive");
  DiscreteTransfer slave = discretize(law, Side::slave, T);
  DiscreteTransfer master = slave;
  for (double& c : master.num) c *= alpha;
  return {master, slave};
}

std::complex<double> eval_transfer(const DiscreteTransfer& transfer, std::complex<double> z) {
  auto horner = [&z](const std::vector<double>& coeffs) {
    std::complex<double> acc = 0.0;
    for (double c : coeffs) acc = acc * z + c;
    return acc;
  };
  const std::complex<double> den = horner(transfer.den);
  if (std::abs(den) < kPoleGuard) {
    throw std::domain_error("eval_transfer: evaluation point is a pole of the transfer");
  }
  return horner(transfer.num) / den;
}

ControllerState::ControllerState(const DiscreteTransfer& transfer)
    : num_(transfer.den.size(), 0.0),
      den_(transfer.den),
      past_in_(transfer.den.size() - 1, 0.0),
      past_out_(transfer.den.size() - 1, 0.0) {
  if (transfer.den.empty() || transfer.den.front() == 0.0) {
    throw std::invalid_argument("ControllerState: denominator leading coefficient must be nonzero");
  }
  if (transfer.num.size() > transfer.den.size()) {
    throw std::invalid_argument("ControllerState: transfer must be proper");
  }
  // Align numerator coefficients with the denominator's powers of z.
  const std::size_t pad = transfer.den.size() - transfer.num.size();
  for (std::size_t i = 0; i < transfer.num.size(); ++i) num_[pad + i] = transfer.num[i];
}

double ControllerState::step(double input) {
  double acc = num_[0] * input;
  for (std::size_t i = 1; i < num_.size(); ++i) acc += num_[i] * past_in_[i - 1];
  for (std::size_t i = 1; i < den_.size(); ++i) acc -= den_[i] * past_out_[i - 1];
  const double output = acc / den_[0];

  for (std::size_t i = past_in_.size(); i-- > 1;) past_in_[i] = past_in_[i - 1];
  if (!past_in_.empty()) past_in_[0] = input;
  for (std::size_t i = past_out_.size(); i-- > 1;) past_out_[i] = past_out_[i - 1];
  if (!past_out_.empty()) past_out_[0] = output;

  return output;
}

void ControllerState::reset() {
  std::fill(past_in_.begin(), past_in_.end(), 0.0);
  std::fill(past_out_.begin(), past_out_.end(), 0.0);
}

DelayLine::DelayLine(double delay_seconds, double period) {
  if (delay_seconds < 0.0) throw std::invalid_argument("DelayLine: delay must be non-negative");
  if (!(period > 0.0)) throw std::invalid_argument("DelayLine: period must be positive");
  const auto n = static_cast<std::size_t>(std::llround(delay_seconds / period));
  buffer_.assign(n, 0.0);
}

double DelayLine::push(double sample) {
  if (buffer_.empty()) return sample;
  const double out = buffer_[head_];
  buffer_[head_] = sample;
  head_ = (head_ + 1) % buffer_.size();
  return out;
}

}  // namespace telepassive
