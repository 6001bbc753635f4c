#include "evspike/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "evspike/forward.hpp"
#include "evspike/optim.hpp"
#include "evspike/parallel.hpp"

namespace evspike {

namespace {

int eval_count(const Dataset& data, const EvalOptions& options) {
  int n = data.size();
  if (options.limit > 0) n = std::min(n, options.limit);
  return n;
}

EventBatch sample_input(const Dataset& data, int i, const EvalOptions& options) {
  if (options.jitter_sigma <= 0.0) return data.samples[i];
  return jitter_events(data.samples[i], options.jitter_sigma,
                       jitter_seed(options.jitter_seed, options.jitter_epoch, i),
                       data.input_shape.size());
}

}  // namespace

EvalResult evaluate(const NetworkSpec& net, const Dataset& data,
                    const TargetSpec& target, const EvalOptions& options) {
  data.validate();
  NetworkSpec model = net;
  quantize_network(model, options.quantize_bits);
  const int n = eval_count(data, options);
  const int depth = model.num_layers();
  const int readout = depth - 1;

  struct Acc {
    long long correct = 0;
    double loss = 0.0;
    std::vector<double> layer_spikes;
    std::vector<long long> active_units;
    double first_time = 0.0;
  };
  const int chunks = num_chunks(n, kSampleChunk);
  std::vector<Acc> parts(chunks);
  parallel_chunks(n, kSampleChunk, options.workers, [&](int c, int lo, int hi) {
    Acc& acc = parts[c];
    acc.layer_spikes.assign(depth, 0.0);
    acc.active_units.assign(depth, 0);
    for (int i = lo; i < hi; ++i) {
      const ForwardTrace trace = forward(model, sample_input(data, i, options),
                                         options.t_sim);
      if (predict(trace, target.mode) == data.labels[i]) ++acc.correct;
      acc.loss += sample_loss(trace, data.labels[i], target);
      for (int l = 0; l < depth; ++l) {
        acc.layer_spikes[l] += static_cast<double>(trace.layers[l].total_spikes());
        for (const SpikeTrain& t : trace.layers[l].trains) {
          if (!t.empty()) ++acc.active_units[l];
        }
      }
      double first = options.t_sim;
      for (const SpikeTrain& t : trace.output().trains) {
        first = std::min(first, t.first_or(options.t_sim));
      }
      acc.first_time += first;
    }
  });

  EvalResult r;
  r.samples = n;
  r.mean_layer_spikes.assign(depth, 0.0);
  r.mean_active_fraction.assign(depth, 0.0);
  long long correct = 0;
  for (const Acc& acc : parts) {
    correct += acc.correct;
    r.mean_loss += acc.loss;
    r.mean_first_output_time += acc.first_time;
    for (int l = 0; l < depth; ++l) {
      r.mean_layer_spikes[l] += acc.layer_spikes[l];
      r.mean_active_fraction[l] += static_cast<double>(acc.active_units[l]);
    }
  }
  if (n > 0) {
    r.accuracy = static_cast<double>(correct) / n;
    r.mean_loss /= n;
    r.mean_first_output_time /= n;
    for (int l = 0; l < depth; ++l) {
      r.mean_layer_spikes[l] /= n;
      r.mean_active_fraction[l] /=
          static_cast<double>(n) * model.layers[l].out_shape.size();
    }
  }
  for (int l = 0; l < depth; ++l) {
    if (l == readout) {
      r.mean_output_spikes = r.mean_layer_spikes[l];
    } else if (model.layers[l].spiking()) {
      r.mean_hidden_spikes += r.mean_layer_spikes[l];
    }
  }
  return r;
}

int predict_prefix(const ForwardTrace& trace, LossMode mode, double t_cutoff) {
  const LayerTrace& out = trace.output();
  const int n = static_cast<int>(out.trains.size());
  int best = 0;
  if (mode == LossMode::kSpikeCount) {
    long long best_count = -1;
    for (int j = 0; j < n; ++j) {
      const auto& times = out.trains[j].times;
      const long long count =
          std::upper_bound(times.begin(), times.end(), t_cutoff) - times.begin();
      if (count > best_count) {
        best_count = count;
        best = j;
      }
    }
  } else {
    double best_time = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
      const double t =
          out.trains[j].first_or(std::numeric_limits<double>::infinity());
      if (t <= t_cutoff && t < best_time) {
        best_time = t;
        best = j;
      }
    }
  }
  return best;
}

std::vector<LatencyPoint> latency_curve(const NetworkSpec& net,
                                        const Dataset& data,
                                        const TargetSpec& target,
                                        std::span<const double> time_grid,
                                        const EvalOptions& options) {
  data.validate();
  NetworkSpec model = net;
  quantize_network(model, options.quantize_bits);
  const int n = eval_count(data, options);
  const int g = static_cast<int>(time_grid.size());

  struct Acc {
    std::vector<long long> agree;
    std::vector<long long> correct;
    std::vector<double> spikes;
  };
  const int chunks = num_chunks(n, kSampleChunk);
  std::vector<Acc> parts(chunks);
  parallel_chunks(n, kSampleChunk, options.workers, [&](int c, int lo, int hi) {
    Acc& acc = parts[c];
    acc.agree.assign(g, 0);
    acc.correct.assign(g, 0);
    acc.spikes.assign(g, 0.0);
    for (int i = lo; i < hi; ++i) {
      const ForwardTrace trace = forward(model, sample_input(data, i, options),
                                         options.t_sim);
      const int final_pred = predict(trace, target.mode);
      for (int k = 0; k < g; ++k) {
        const double t = time_grid[k];
        const int pred = predict_prefix(trace, target.mode, t);
        if (pred == final_pred) ++acc.agree[k];
        if (pred == data.labels[i]) ++acc.correct[k];
        long long seen = 0;
        for (const LayerTrace& layer : trace.layers) {
          for (const SpikeTrain& train : layer.trains) {
            seen += std::upper_bound(train.times.begin(), train.times.end(), t) -
                    train.times.begin();
          }
        }
        acc.spikes[k] += static_cast<double>(seen);
      }
    }
  });

  std::vector<LatencyPoint> curve(g);
  for (int k = 0; k < g; ++k) {
    long long agree = 0;
    long long correct = 0;
    double spikes = 0.0;
    for (const Acc& acc : parts) {
      if (!acc.correct.empty()) {
        agree += acc.agree[k];
        correct += acc.correct[k];
        spikes += acc.spikes[k];
      }
    }
    curve[k].time = time_grid[k];
    if (n > 0) {
      curve[k].confidence = static_cast<double>(agree) / n;
      curve[k].accuracy = static_cast<double>(correct) / n;
      curve[k].mean_spikes_seen = spikes / n;
    }
  }
  return curve;
}

std::vector<ThresholdPoint> threshold_sweep(const NetworkSpec& net,
                                            const Dataset& data,
                                            const TargetSpec& target,
                                            int layer_index,
                                            std::span<const double> thetas,
                                            const EvalOptions& options) {
  if (layer_index < 0 || layer_index >= net.num_layers() ||
      !net.layers[layer_index].spiking()) {
    throw std::invalid_argument("threshold_sweep: layer " +
                                std::to_string(layer_index) +
                                " is not a spiking layer");
  }
  std::vector<ThresholdPoint> points;
  points.reserve(thetas.size());
  for (double theta : thetas) {
    NetworkSpec swept = net;
    swept.layers[layer_index].neuron =
        swept.layers[layer_index].neuron->with_theta(theta);
    const EvalResult r = evaluate(swept, data, target, options);
    ThresholdPoint p;
    p.theta = theta;
    p.accuracy = r.accuracy;
    p.mean_layer_spikes = r.mean_layer_spikes[layer_index];
    p.mean_hidden_spikes = r.mean_hidden_spikes;
    p.mean_output_spikes = r.mean_output_spikes;
    points.push_back(p);
  }
  return points;
}

std::vector<ClipPoint> clip_sweep(const NetworkSpec& net, const Dataset& data,
                                  const TargetSpec& target,
                                  std::span<const double> clips,
                                  const EvalOptions& options) {
  std::vector<ClipPoint> points;
  points.reserve(clips.size());
  for (double w_clip : clips) {
    NetworkSpec clipped = net;
    clip_network(clipped, w_clip);
    points.push_back({w_clip, evaluate(clipped, data, target, options).accuracy});
  }
  return points;
}

std::vector<RobustnessPoint> robustness_sweep(const NetworkSpec& net,
                                              const Dataset& data,
                                              const TargetSpec& target,
                                              std::span<const double> sigmas,
                                              const EvalOptions& options) {
  std::vector<RobustnessPoint> points;
  points.reserve(sigmas.size());
  for (double sigma : sigmas) {
    EvalOptions opt = options;
    opt.jitter_sigma = sigma;
    points.push_back({sigma, evaluate(net, data, target, opt).accuracy});
  }
  return points;
}

std::vector<QuantizationPoint> quantization_sweep(const NetworkSpec& net,
                                                  const Dataset& data,
                                                  const TargetSpec& target,
                                                  std::span<const int> bits_list,
                                                  const EvalOptions& options) {
  std::vector<QuantizationPoint> points;
  points.reserve(bits_list.size());
  for (int bits : bits_list) {
    EvalOptions opt = options;
    opt.quantize_bits = bits;
    points.push_back({bits, evaluate(net, data, target, opt).accuracy});
  }
  return points;
}

std::vector<SimTimePoint> sim_time_sweep(const NetworkSpec& net,
                                         const Dataset& data,
                                         const TargetSpec& target,
                                         std::span<const double> times,
                                         const EvalOptions& options) {
  std::vector<SimTimePoint> points;
  points.reserve(times.size());
  for (double t_sim : times) {
    EvalOptions opt = options;
    opt.t_sim = t_sim;
    const EvalResult r = evaluate(net, data, target, opt);
    points.push_back({t_sim, r.accuracy, r.mean_hidden_spikes,
                      r.mean_output_spikes});
  }
  return points;
}

}  // namespace evspike
