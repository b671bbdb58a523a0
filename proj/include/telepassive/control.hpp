#pragma once

#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

#include "telepassive/model.hpp"

namespace telepassive {

/// Rational function in z, coefficients in descending powers of z.
/// Proper by construction: deg(num) <= deg(den), leading denominator coefficient nonzero.
struct DiscreteTransfer {
  std::vector<double> num;
  std::vector<double> den;
  double period = 0.0;  // s

  int degree() const { return static_cast<int>(den.size()) - 1; }

  bool operator==(const DiscreteTransfer&) const = default;
};

/// Discrete controller of one side under the backward-difference map s -> (z-1)/(T z).
///
///   p-like:           C(z) = K - L (z-1)/(T z)
///   pd-like:          C(z) = Kd*gamma (z-1)/(T z) + K   (gamma of the remote side)
///   pd + dissipation: C(z) = -(Kv + Kd + Peps)(z-1)/(T z) - Kp
DiscreteTransfer discretize(const ControllerLaw& law, Side side, double T);

/// Scaled pair: C_s is the slave-side transfer, C_m scales its numerator by alpha.
std::pair<DiscreteTransfer, DiscreteTransfer> controller_pair(const ControllerLaw& law,
                                                              double alpha, double T);

/// N(z)/D(z). Throws std::domain_error when z is numerically a pole.
std::complex<double> eval_transfer(const DiscreteTransfer& transfer, std::complex<double> z);

/// Executes a DiscreteTransfer as a linear difference equation, one sample at a time.
/// Buffers are sized by the transfer degree at construction and never resized.
class ControllerState {
 public:
  explicit ControllerState(const DiscreteTransfer& transfer);

  double step(double input);
  void reset();

 private:
  std::vector<double> num_;      // padded to denominator length
  std::vector<double> den_;
  std::vector<double> past_in_;  // u(k-1) ... u(k-n)
  std::vector<double> past_out_; // y(k-1) ... y(k-n)
};

inline double step_controller(ControllerState& state, double error_sample) {
  return state.step(error_sample);
}

/// Constant channel delay realized as an integer number of samples, zero history.
class DelayLine {
 public:
  DelayLine(double delay_seconds, double period);

  /// Inserts the newest sample, returns the one from length() periods ago.
  double push(double sample);
  std::size_t length() const { return buffer_.size(); }

 private:
  std::vector<double> buffer_;
  std::size_t head_ = 0;
};

}  // namespace telepassive
