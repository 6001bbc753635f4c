#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "evspike/events.hpp"
#include "evspike/network.hpp"
#include "evspike/params.hpp"

namespace evspike {

// A pre-synaptic spike as seen by one neuron: arrival time and synapse weight.
struct WeightedEvent {
  double time = 0.0;
  double weight = 0.0;
};

// One solved threshold crossing together with the quadratic state behind it.
struct SpikeSolution {
  double time;
  double a;  // fast-decay drive coefficient at the crossing
  double b;  // slow-decay drive minus accumulated reset decay
  double x;  // sqrt(b^2 - 4ac), strictly positive for a reported crossing
};

// Earliest upward threshold crossing strictly inside (t_lo, t_hi], given the
// drive coefficients valid on that interval. Returns nullopt when the
// membrane stays below threshold there.
std::optional<SpikeSolution> solve_next_spike(double a, double b, double t_lo,
                                              double t_hi,
                                              const NeuronParams& p);

// Running drive sums of one neuron. Times are absolute; the sums store
// exp(t/tau_s)- and exp(t/tau)-weighted contributions, so the window end must
// keep t/tau_s moderate (the forward pass enforces t_end/tau_s <= 500).
struct NeuronAccumulator {
  double a_syn = 0.0;    // sum of w * exp(t/tau_s) over inputs seen so far
  double b_syn = 0.0;    // sum of w * exp(t/tau) over inputs seen so far
  double b_reset = 0.0;  // (theta/tau) * sum of exp(t/tau) over own spikes

  void ingest(double t, double w, const NeuronParams& p);
  void ingest_scaled(double w, double exp_fast, double exp_slow);
  void on_spike(double t, const NeuronParams& p);

  double a() const { return a_syn; }
  double b() const { return b_syn - b_reset; }
};

// Simulates one neuron over [0, t_end] given its merged, time-sorted weighted
// input stream. Throws if the stream is out of order. When `exact_ties` is
// given it is incremented for every emitted spike that coincides exactly with
// a pending input arrival.
SpikeTrain infer_neuron(std::span<const WeightedEvent> events,
                        const NeuronParams& p, double t_end,
                        std::int64_t* exact_ties = nullptr);

// Where a pooled spike came from: absolute unit index in the source layer and
// the spike's position within that unit's train.
struct PoolOrigin {
  int source = 0;
  int spike = 0;
};

// Spike output of one layer. `origins` is filled only for pooling layers and
// is aligned with each train's times.
struct LayerTrace {
  std::vector<SpikeTrain> trains;
  std::vector<std::vector<PoolOrigin>> origins;

  std::int64_t total_spikes() const;
};

// Runs one layer given the spike trains of the previous stage.
LayerTrace infer_layer(const LayerSpec& layer,
                       const std::vector<SpikeTrain>& upstream, double t_end,
                       std::int64_t* exact_ties = nullptr);

// Full record of one forward pass; the backward pass consumes it whole.
struct ForwardTrace {
  std::vector<SpikeTrain> input_trains;  // input events viewed per unit
  std::vector<LayerTrace> layers;
  double t_end = 0.0;
  std::int64_t exact_tie_count = 0;

  const LayerTrace& output() const { return layers.back(); }
};

// Event-driven forward pass over the whole network. `batch` must be
// normalized for the network's input size.
ForwardTrace forward(const NetworkSpec& net, const EventBatch& batch,
                     double t_end);

}  // namespace evspike
