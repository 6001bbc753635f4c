#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "evspike/data.hpp"
#include "evspike/loss.hpp"
#include "evspike/network.hpp"

namespace evspike {

struct EvalOptions {
  double t_sim = 0.2;
  int workers = 1;
  int limit = 0;               // 0 = whole set
  double jitter_sigma = 0.0;   // input-noise deviation, 0 = clean
  std::uint64_t jitter_seed = 0;
  int jitter_epoch = 0;        // epoch tag mixed into per-sample noise seeds
  int quantize_bits = 0;       // evaluate a quantized copy of the weights
};

// Accuracy plus activity statistics over a dataset.
struct EvalResult {
  int samples = 0;
  double accuracy = 0.0;
  double mean_loss = 0.0;
  std::vector<double> mean_layer_spikes;     // per layer, spikes per sample
  std::vector<double> mean_active_fraction;  // per layer, units that fired at all
  double mean_hidden_spikes = 0.0;  // spiking layers before the readout, summed
  double mean_output_spikes = 0.0;
  double mean_first_output_time = 0.0;  // earliest readout spike (silent -> t_sim)
};

EvalResult evaluate(const NetworkSpec& net, const Dataset& data,
                    const TargetSpec& target, const EvalOptions& options);

// Prediction using only spikes at or before `t_cutoff`.
int predict_prefix(const ForwardTrace& trace, LossMode mode, double t_cutoff);

// Decision quality as a function of decision time. Each sample runs forward
// once over the full window; every grid point then reads the prefix of that
// trace. `confidence` is the fraction of samples whose prefix prediction
// already equals the full-window prediction (1.0 at the window end by
// construction); `accuracy` compares the prefix prediction with the label.
struct LatencyPoint {
  double time = 0.0;
  double confidence = 0.0;
  double accuracy = 0.0;
  double mean_spikes_seen = 0.0;  // whole-network spikes at or before `time`
};

std::vector<LatencyPoint> latency_curve(const NetworkSpec& net,
                                        const Dataset& data,
                                        const TargetSpec& target,
                                        std::span<const double> time_grid,
                                        const EvalOptions& options);

// Re-evaluates with one layer's threshold set to each grid value.
struct ThresholdPoint {
  double theta = 0.0;
  double accuracy = 0.0;
  double mean_layer_spikes = 0.0;   // the swept layer
  double mean_hidden_spikes = 0.0;
  double mean_output_spikes = 0.0;
};

std::vector<ThresholdPoint> threshold_sweep(const NetworkSpec& net,
                                            const Dataset& data,
                                            const TargetSpec& target,
                                            int layer_index,
                                            std::span<const double> thetas,
                                            const EvalOptions& options);

// Accuracy with weights clamped to [-w_clip, w_clip] at evaluation time.
struct ClipPoint {
  double w_clip = 0.0;
  double accuracy = 0.0;
};

std::vector<ClipPoint> clip_sweep(const NetworkSpec& net, const Dataset& data,
                                  const TargetSpec& target,
                                  std::span<const double> clips,
                                  const EvalOptions& options);

// Accuracy under growing input time jitter.
struct RobustnessPoint {
  double sigma = 0.0;
  double accuracy = 0.0;
};

std::vector<RobustnessPoint> robustness_sweep(const NetworkSpec& net,
                                              const Dataset& data,
                                              const TargetSpec& target,
                                              std::span<const double> sigmas,
                                              const EvalOptions& options);

// Accuracy under post-training weight quantization. bits = 0 means full
// float precision (the identity entry of the sweep).
struct QuantizationPoint {
  int bits = 0;
  double accuracy = 0.0;
};

std::vector<QuantizationPoint> quantization_sweep(const NetworkSpec& net,
                                                  const Dataset& data,
                                                  const TargetSpec& target,
                                                  std::span<const int> bits_list,
                                                  const EvalOptions& options);

// Accuracy when the simulation window itself is shortened. The full-window
// entry reproduces the plain evaluation.
struct SimTimePoint {
  double t_sim = 0.0;
  double accuracy = 0.0;
  double mean_hidden_spikes = 0.0;
  double mean_output_spikes = 0.0;
};

std::vector<SimTimePoint> sim_time_sweep(const NetworkSpec& net,
                                         const Dataset& data,
                                         const TargetSpec& target,
                                         std::span<const double> times,
                                         const EvalOptions& options);

}  // namespace evspike
