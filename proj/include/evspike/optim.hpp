#pragma once

#include <span>
#include <vector>

#include "evspike/backward.hpp"
#include "evspike/network.hpp"

namespace evspike {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// First/second moment buffers for Adam, one pair per weighted layer.
struct AdamState {
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  long step = 0;

  static AdamState for_network(const NetworkSpec& net);
};

// In-place descent step w -= lr * g. Throws on a non-finite gradient.
void sgd_step(std::span<double> w, std::span<const double> g, double lr);

// In-place Adam step with bias correction on one tensor.
void adam_step(std::span<double> w, std::span<const double> g,
               std::vector<double>& m, std::vector<double>& v, long step,
               double lr, const AdamConfig& cfg = {});

// Whole-network updates over every weighted layer.
void sgd_update(NetworkSpec& net, const GradientSet& grads, double lr);
void adam_update(NetworkSpec& net, const GradientSet& grads, AdamState& state,
                 double lr, const AdamConfig& cfg = {});

// Stepwise exponential decay with a floor:
// lr(epoch) = max(lr0 * decay^floor(epoch / period), lr_min).
double lr_schedule(double lr0, double decay, int period, double lr_min,
                   int epoch);

// Clamps every weight to [-w_clip, w_clip]; a non-positive bound disables it.
void clip_weights(std::span<double> w, double w_clip);
void clip_network(NetworkSpec& net, double w_clip);

// Scales gradients so their global l2 norm does not exceed `max_norm`;
// non-positive disables.
void clip_gradient_norm(GradientSet& grads, double max_norm);

// Symmetric uniform quantizer over [-1, 1] with 2^(bits+1) - 1 levels
// (spacing 1 / (2^bits - 1)). Values are clamped first; midpoints round
// toward zero. bits must be in [1, 16].
double quantize_value(double w, int bits);
void quantize_weights(std::span<double> w, int bits);
void quantize_network(NetworkSpec& net, int bits);

}  // namespace evspike
