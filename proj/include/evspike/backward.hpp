#pragma once

#include <span>
#include <vector>

#include "evspike/forward.hpp"
#include "evspike/loss.hpp"

namespace evspike {

// Sign convention of the count-mode output error. kTargetMinusCount drives
// weights of under-counting units up under a plain descent update and is the
// default; kCountMinusTarget is the mirrored form.
enum class ErrorConvention { kTargetMinusCount, kCountMinusTarget };

struct BackwardOptions {
  ErrorConvention convention = ErrorConvention::kTargetMinusCount;
};

// Per-layer, per-neuron, per-spike error terms aligned with a ForwardTrace.
using SpikeErrors = std::vector<std::vector<double>>;

// Gradient of the loss with respect to every weight tensor; pooling layers
// hold an empty vector.
struct GradientSet {
  std::vector<std::vector<double>> layers;

  static GradientSet zeros_like(const NetworkSpec& net);
  void accumulate(const GradientSet& other);
  void scale(double s);
  double squared_norm() const;
};

// Count-mode error injected at each output spike: every spike of unit j
// carries the same per-unit value (y_j - n_j or its mirror).
SpikeErrors output_count_errors(const LayerTrace& out,
                                std::span<const int> targets,
                                ErrorConvention convention);

// Temporal-mode error: dL/dt lands on each unit's first spike only.
SpikeErrors output_ttfs_errors(const LayerTrace& out,
                               std::span<const double> time_errors);

// Reset-coupling term for one neuron, given the final per-spike errors of its
// later spikes. mu[k] sums delta[z] * (d t_z / d t_k) over z > k in linear
// time via a descending sweep.
std::vector<double> intra_neuron_errors(const SpikeTrain& train,
                                        std::span<const double> deltas,
                                        const NeuronParams& p);

// Combines the injected errors phi with the reset coupling into the final
// per-spike errors delta = phi + mu, per neuron.
SpikeErrors finalize_deltas(const LayerTrace& trace,
                            const SpikeErrors& phi,
                            const NeuronParams& p);

// Errors arriving at the upstream layer's spikes through the weights of the
// downstream layer, given the downstream layer's final deltas.
SpikeErrors inter_neuron_errors(const LayerSpec& down,
                                const std::vector<SpikeTrain>& upstream,
                                const LayerTrace& down_trace,
                                const SpikeErrors& down_deltas);

// Gradient of the loss with respect to one layer's weights.
std::vector<double> weight_gradients(const LayerSpec& layer,
                                     const std::vector<SpikeTrain>& upstream,
                                     const LayerTrace& trace,
                                     const SpikeErrors& deltas);

struct BackwardResult {
  double loss = 0.0;
  GradientSet grads;
};

// Full reverse pass for one sample: builds the output errors from the target
// spec and label, walks the layers back to the input, and returns exact
// weight gradients alongside the sample loss.
BackwardResult backward(const NetworkSpec& net, const ForwardTrace& trace,
                        int label, const TargetSpec& spec,
                        const BackwardOptions& options = {});

}  // namespace evspike
