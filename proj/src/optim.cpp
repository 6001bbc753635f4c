#include "evspike/optim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace evspike {

AdamState AdamState::for_network(const NetworkSpec& net) {
  AdamState s;
  s.m.resize(net.layers.size());
  s.v.resize(net.layers.size());
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    s.m[l].assign(net.layers[l].weight_count(), 0.0);
    s.v[l].assign(net.layers[l].weight_count(), 0.0);
  }
  return s;
}

namespace {

void check_sizes(std::size_t w, std::size_t g, const char* who) {
  if (w != g) {
    throw std::invalid_argument(std::string(who) + ": weight/gradient size mismatch");
  }
}

void check_finite(std::span<const double> g, const char* who) {
  for (double v : g) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument(std::string(who) + ": non-finite gradient");
    }
  }
}

}  // namespace

void sgd_step(std::span<double> w, std::span<const double> g, double lr) {
  check_sizes(w.size(), g.size(), "sgd_step");
  check_finite(g, "sgd_step");
  for (std::size_t i = 0; i < w.size(); ++i) w[i] -= lr * g[i];
}

void adam_step(std::span<double> w, std::span<const double> g,
               std::vector<double>& m, std::vector<double>& v, long step,
               double lr, const AdamConfig& cfg) {
  check_sizes(w.size(), g.size(), "adam_step");
  check_finite(g, "adam_step");
  if (m.size() != w.size() || v.size() != w.size()) {
    throw std::invalid_argument("adam_step: moment buffer size mismatch");
  }
  if (step < 1) throw std::invalid_argument("adam_step: step must be >= 1");
  const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
  const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
  for (std::size_t i = 0; i < w.size(); ++i) {
    m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
    v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
    const double m_hat = m[i] / bc1;
    const double v_hat = v[i] / bc2;
    w[i] -= lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
  }
}

void sgd_update(NetworkSpec& net, const GradientSet& grads, double lr) {
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    if (!net.layers[l].weighted()) continue;
    sgd_step(net.layers[l].weights, grads.layers[l], lr);
  }
}

void adam_update(NetworkSpec& net, const GradientSet& grads, AdamState& state,
                 double lr, const AdamConfig& cfg) {
  ++state.step;
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    if (!net.layers[l].weighted()) continue;
    adam_step(net.layers[l].weights, grads.layers[l], state.m[l], state.v[l],
              state.step, lr, cfg);
  }
}

double lr_schedule(double lr0, double decay, int period, double lr_min,
                   int epoch) {
  if (!(lr0 > 0.0)) throw std::invalid_argument("lr_schedule: lr0 must be > 0");
  if (!(decay > 0.0) || decay > 1.0) {
    throw std::invalid_argument("lr_schedule: decay must be in (0, 1]");
  }
  if (period < 1) throw std::invalid_argument("lr_schedule: period must be >= 1");
  if (epoch < 0) throw std::invalid_argument("lr_schedule: epoch must be >= 0");
  const double lr = lr0 * std::pow(decay, static_cast<double>(epoch / period));
  return std::max(lr, lr_min);
}

void clip_weights(std::span<double> w, double w_clip) {
  if (w_clip <= 0.0) return;
  for (double& v : w) v = std::clamp(v, -w_clip, w_clip);
}

void clip_network(NetworkSpec& net, double w_clip) {
  for (LayerSpec& l : net.layers) clip_weights(l.weights, w_clip);
}

void clip_gradient_norm(GradientSet& grads, double max_norm) {
  if (max_norm <= 0.0) return;
  const double norm = std::sqrt(grads.squared_norm());
  if (norm > max_norm) grads.scale(max_norm / norm);
}

double quantize_value(double w, int bits) {
  if (bits < 1 || bits > 16) {
    throw std::invalid_argument("quantize_value: bits must be in [1, 16]");
  }
  const double step = 1.0 / ((1 << bits) - 1);
  const double clamped = std::clamp(w, -1.0, 1.0);
  const double scaled = clamped / step;
  // Round half toward zero so +/- step/2 both collapse onto zero.
  const double level = std::copysign(std::ceil(std::abs(scaled) - 0.5), scaled);
  return level * step;
}

void quantize_weights(std::span<double> w, int bits) {
  for (double& v : w) v = quantize_value(v, bits);
}

void quantize_network(NetworkSpec& net, int bits) {
  if (bits <= 0) return;
  for (LayerSpec& l : net.layers) quantize_weights(l.weights, bits);
}

}  // namespace evspike
