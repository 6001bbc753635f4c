#include "evspike/trainer.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include "evspike/forward.hpp"
#include "evspike/metrics.hpp"
#include "evspike/parallel.hpp"

namespace evspike {

TrainSettings build_train_settings(const RunConfig& cfg) {
  TrainSettings s;
  s.epochs = cfg.epochs;
  s.batch_size = cfg.batch_size;
  s.workers = cfg.workers;
  s.optimizer = build_optimizer(cfg);
  s.lr = cfg.lr;
  s.lr_decay = cfg.lr_decay;
  s.lr_decay_every = cfg.lr_decay_every;
  s.lr_min = cfg.lr_min;
  s.w_clip = cfg.w_clip;
  s.grad_clip_norm = cfg.grad_clip_norm;
  s.quantize_bits = cfg.quantize_bits;
  s.quantize_in_train = cfg.quantize_bits > 0 && cfg.quantize_when == "train";
  s.jitter_sigma = cfg.jitter_sigma;
  s.seed = cfg.seed;
  s.t_sim = cfg.t_sim;
  s.convention = build_convention(cfg);
  return s;
}

BatchResult batch_gradients(const NetworkSpec& net, const Dataset& data,
                            std::span<const int> indices,
                            const TargetSpec& target,
                            const TrainSettings& settings, int epoch) {
  const int n = static_cast<int>(indices.size());
  BatchResult result;
  result.grads = GradientSet::zeros_like(net);
  if (n == 0) return result;

  const BackwardOptions options{settings.convention};
  const int chunks = num_chunks(n, kSampleChunk);
  std::vector<GradientSet> part_grads(chunks);
  std::vector<double> part_loss(chunks, 0.0);
  parallel_chunks(n, kSampleChunk, settings.workers, [&](int c, int lo, int hi) {
    part_grads[c] = GradientSet::zeros_like(net);
    for (int i = lo; i < hi; ++i) {
      const int idx = indices[i];
      EventBatch sample = data.samples[idx];
      if (settings.jitter_sigma > 0.0) {
        sample = jitter_events(sample, settings.jitter_sigma,
                               jitter_seed(settings.seed, epoch, idx),
                               data.input_shape.size());
      }
      const ForwardTrace trace = forward(net, sample, settings.t_sim);
      BackwardResult b = backward(net, trace, data.labels[idx], target, options);
      part_grads[c].accumulate(b.grads);
      part_loss[c] += b.loss;
    }
  });
  for (int c = 0; c < chunks; ++c) {
    result.grads.accumulate(part_grads[c]);
    result.mean_loss += part_loss[c];
  }
  result.grads.scale(1.0 / n);
  result.mean_loss /= n;
  return result;
}

TrainResult train(const NetworkSpec& start, const Dataset& train_set,
                  const Dataset& test_set, const TargetSpec& target,
                  const TrainSettings& settings, const EpochCallback& on_epoch) {
  if (settings.batch_size < 1) {
    throw std::invalid_argument("train: batch_size must be >= 1");
  }
  if (settings.epochs < 0) throw std::invalid_argument("train: epochs must be >= 0");
  train_set.validate();
  test_set.validate();
  if (train_set.size() == 0) throw std::invalid_argument("train: empty training set");
  start.validate();

  const bool qat = settings.quantize_in_train && settings.quantize_bits > 0;
  NetworkSpec master = start;  // full-precision weights the optimizer touches
  AdamState adam = AdamState::for_network(master);

  // The network actually simulated: the quantized view under
  // quantization-aware training, otherwise the master weights themselves.
  auto deployed = [&]() {
    NetworkSpec net = master;
    if (qat) quantize_network(net, settings.quantize_bits);
    return net;
  };

  EvalOptions eval_opts;
  eval_opts.t_sim = settings.t_sim;
  eval_opts.workers = settings.workers;

  TrainResult result;
  result.best_net = start;
  result.best_accuracy = -1.0;

  std::vector<int> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 0; epoch < settings.epochs; ++epoch) {
    const double lr = lr_schedule(settings.lr, settings.lr_decay,
                                  settings.lr_decay_every, settings.lr_min, epoch);
    {
      // Fixed-seed shuffle: depends on the seed and epoch only.
      std::mt19937_64 rng(
          jitter_seed(settings.seed, epoch, std::numeric_limits<int>::max()));
      std::shuffle(order.begin(), order.end(), rng);
    }
    double loss_sum = 0.0;
    int batches = 0;
    for (int begin = 0; begin < train_set.size(); begin += settings.batch_size) {
      const int end = std::min<int>(train_set.size(), begin + settings.batch_size);
      const std::span<const int> batch(order.data() + begin,
                                       static_cast<std::size_t>(end - begin));
      const NetworkSpec net = deployed();
      BatchResult r = batch_gradients(net, train_set, batch, target, settings, epoch);
      clip_gradient_norm(r.grads, settings.grad_clip_norm);
      if (settings.optimizer == Optimizer::kAdam) {
        adam_update(master, r.grads, adam, lr);
      } else {
        sgd_update(master, r.grads, lr);
      }
      clip_network(master, settings.w_clip);
      loss_sum += r.mean_loss;
      ++batches;
    }

    const NetworkSpec net = deployed();
    EpochLog log;
    log.epoch = epoch + 1;
    log.lr = lr;
    log.train_loss = batches > 0 ? loss_sum / batches : 0.0;
    log.train_accuracy = evaluate(net, train_set, target, eval_opts).accuracy;
    if (test_set.size() > 0) {
      const EvalResult test = evaluate(net, test_set, target, eval_opts);
      log.test_accuracy = test.accuracy;
      log.mean_hidden_spikes = test.mean_hidden_spikes;
      log.mean_output_spikes = test.mean_output_spikes;
    }
    result.log.push_back(log);
    if (log.test_accuracy > result.best_accuracy) {
      result.best_accuracy = log.test_accuracy;
      result.best_epoch = log.epoch;
      result.best_net = net;
    }
    if (on_epoch) on_epoch(log);
  }

  result.net = deployed();
  if (result.best_epoch < 0) {
    result.best_net = result.net;
    result.best_accuracy = 0.0;
  }
  return result;
}

}  // namespace evspike
