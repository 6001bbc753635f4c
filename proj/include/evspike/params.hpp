#pragma once

#include <cmath>
#include <stdexcept>

namespace evspike {

// Constants of a current-based leaky integrate-and-fire neuron. The membrane
// time constant is locked to twice the synaptic one; the closed-form spike
// time solver depends on that ratio.
struct NeuronParams {
  double tau_s;     // synaptic current time constant (seconds)
  double tau;       // membrane time constant, always 2 * tau_s
  double theta;     // firing threshold
  int max_spikes;   // per-neuron spike cap within one simulation window

  NeuronParams(double tau_s_, double theta_, int max_spikes_)
      : tau_s(tau_s_), tau(2.0 * tau_s_), theta(theta_), max_spikes(max_spikes_) {
    if (!(tau_s > 0.0)) throw std::invalid_argument("NeuronParams: tau_s must be > 0");
    if (!(theta > 0.0)) throw std::invalid_argument("NeuronParams: theta must be > 0");
    if (max_spikes < 1) throw std::invalid_argument("NeuronParams: max_spikes must be >= 1");
  }

  NeuronParams with_theta(double theta_) const { return {tau_s, theta_, max_spikes}; }
  NeuronParams with_max_spikes(int cap) const { return {tau_s, theta, cap}; }

  // Constant term of the firing-condition quadratic. Recomputed on demand so a
  // threshold change can never leave a stale value behind.
  double threshold_over_tau() const { return theta / tau; }
};

// Membrane potential response to a unit-weight input spike arriving at t = 0.
inline double psp_kernel(double t, const NeuronParams& p) {
  if (t <= 0.0) return 0.0;
  const double scale = p.tau * p.tau_s / (p.tau - p.tau_s);
  return scale * (std::exp(-t / p.tau) - std::exp(-t / p.tau_s));
}

// Potential removed by the soft reset that follows an own spike at t = 0.
inline double refractory_kernel(double t, const NeuronParams& p) {
  if (t <= 0.0) return 0.0;
  return p.theta * std::exp(-t / p.tau);
}

}  // namespace evspike
