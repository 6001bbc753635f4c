#pragma once

#include <optional>
#include <span>
#include <vector>

#include "evspike/forward.hpp"

namespace evspike {

enum class LossMode { kSpikeCount, kTtfsSoftmax };

// Training objective settings. softmax_tau and no_spike_time of 0 mean
// "unset"; resolve() replaces them with their defaults (the output layer's
// membrane time constant and twice the simulation window).
struct TargetSpec {
  LossMode mode = LossMode::kSpikeCount;
  int count_true = 15;
  int count_false = 3;
  double softmax_tau = 0.0;
  double no_spike_time = 0.0;

  TargetSpec resolved(double output_tau, double t_sim) const;
  void validate() const;
};

// Per-class spike-count targets for one label.
std::vector<int> target_counts(int label, int n_out, const TargetSpec& spec);

// Squared-count objective: 0.5 * sum_j (n_j - y_j)^2.
double spike_count_loss(std::span<const int> counts, std::span<const int> targets);

// Temporal softmax over negated first-spike times. Units that never fired
// enter the probabilities at `no_spike_time` but receive no time error.
struct TtfsLossResult {
  double loss = 0.0;
  std::vector<double> probabilities;
  std::vector<double> time_errors;  // dL/dt_j for each unit's first spike; 0 for silent units
};

TtfsLossResult ttfs_softmax_loss(std::span<const std::optional<double>> first_times,
                                 int label, const TargetSpec& spec);

// Spike counts (and first spike times) of the network's readout layer.
std::vector<int> output_counts(const ForwardTrace& trace);
std::vector<std::optional<double>> output_first_times(const ForwardTrace& trace);

// Predicted class: highest spike count (count mode) or earliest first spike
// (temporal mode). Ties resolve to the lowest class index; an all-silent
// output in temporal mode also resolves to class 0.
int predict(const ForwardTrace& trace, LossMode mode);

// Loss of one completed forward pass under `spec`.
double sample_loss(const ForwardTrace& trace, int label, const TargetSpec& spec);

}  // namespace evspike
