#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "evspike/backward.hpp"
#include "evspike/config.hpp"
#include "evspike/data.hpp"
#include "evspike/network.hpp"
#include "evspike/optim.hpp"

namespace evspike {

struct TrainSettings {
  int epochs = 10;
  int batch_size = 50;
  int workers = 1;
  Optimizer optimizer = Optimizer::kAdam;
  double lr = 0.003;
  double lr_decay = 1.0;
  int lr_decay_every = 1;
  double lr_min = 0.0;
  double w_clip = 0.0;
  double grad_clip_norm = 0.0;
  int quantize_bits = 0;
  bool quantize_in_train = false;  // quantization-aware training with shadow weights
  double jitter_sigma = 0.0;
  std::uint64_t seed = 42;
  double t_sim = 0.2;
  ErrorConvention convention = ErrorConvention::kTargetMinusCount;
};

// Training-loop settings drawn from a run configuration. Weights train
// quantization-aware only when quantize_when is "train".
TrainSettings build_train_settings(const RunConfig& cfg);

struct EpochLog {
  int epoch = 0;
  double lr = 0.0;
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double test_accuracy = 0.0;
  double mean_hidden_spikes = 0.0;  // per test sample, spiking layers before the readout
  double mean_output_spikes = 0.0;
};

struct TrainResult {
  NetworkSpec net;       // weights after the last epoch
  NetworkSpec best_net;  // weights at the best test accuracy
  double best_accuracy = 0.0;
  int best_epoch = -1;
  std::vector<EpochLog> log;
};

using EpochCallback = std::function<void(const EpochLog&)>;

// Mini-batch training loop. Batch gradients are averaged over the samples of
// the batch; per-sample work is spread over `workers` threads but reduced in
// a fixed chunk order, so results are byte-identical for any worker count.
TrainResult train(const NetworkSpec& start, const Dataset& train_set,
                  const Dataset& test_set, const TargetSpec& target,
                  const TrainSettings& settings,
                  const EpochCallback& on_epoch = nullptr);

// Average loss and gradient over one mini-batch of sample indices, run with
// the deterministic chunked reduction. Jitter, when enabled, draws each
// sample's noise from jitter_seed(seed, epoch, sample_index) with the
// sample's position in the dataset, so noise is independent of shuffling.
struct BatchResult {
  double mean_loss = 0.0;
  GradientSet grads;
};

BatchResult batch_gradients(const NetworkSpec& net, const Dataset& data,
                            std::span<const int> indices,
                            const TargetSpec& target,
                            const TrainSettings& settings, int epoch);

}  // namespace evspike
