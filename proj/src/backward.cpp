#include "evspike/backward.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace evspike {

namespace {

SpikeErrors zeros_like_trace(const LayerTrace& trace) {
  SpikeErrors e(trace.trains.size());
  for (std::size_t j = 0; j < trace.trains.size(); ++j) {
    e[j].assign(trace.trains[j].times.size(), 0.0);
  }
  return e;
}

SpikeErrors zeros_like_trains(const std::vector<SpikeTrain>& trains) {
  SpikeErrors e(trains.size());
  for (std::size_t j = 0; j < trains.size(); ++j) {
    e[j].assign(trains[j].times.size(), 0.0);
  }
  return e;
}

// Sensitivities of one solved spike time to its quadratic coefficients:
// dt/da = f, dt/db = -h.
struct SpikeSensitivity {
  double f;
  double h;
};

SpikeSensitivity sensitivity(const SpikeTrain& train, int k,
                             const NeuronParams& p) {
  const double a = train.a_coeff[k];
  const double x = train.x_root[k];
  const double exp_slow = std::exp(train.times[k] / p.tau);
  const double c = p.threshold_over_tau();
  return {p.tau / a * (1.0 + c / x * exp_slow), p.tau / x};
}

// Per-neuron suffix sums used by every downstream-to-upstream propagation:
// over the neuron's spikes z (ascending times), sf[i] = sum_{z>=i} delta_z *
// f_z / tau_s and sh[i] = sum_{z>=i} delta_z * h_z / tau. An upstream spike
// at time t picks the entry of the first downstream spike strictly later
// than t.
struct SuffixSums {
  const std::vector<double>* times = nullptr;
  std::vector<double> sf;
  std::vector<double> sh;

  void build(const SpikeTrain& train, std::span<const double> deltas,
             const NeuronParams& p) {
    times = &train.times;
    const int n = train.count();
    sf.assign(n + 1, 0.0);
    sh.assign(n + 1, 0.0);
    for (int k = n - 1; k >= 0; --k) {
      const SpikeSensitivity s = sensitivity(train, k, p);
      sf[k] = sf[k + 1] + deltas[k] * s.f / p.tau_s;
      sh[k] = sh[k + 1] + deltas[k] * s.h / p.tau;
    }
  }

  int first_after(double t) const {
    return static_cast<int>(
        std::upper_bound(times->begin(), times->end(), t) - times->begin());
  }
};

}  // namespace

GradientSet GradientSet::zeros_like(const NetworkSpec& net) {
  GradientSet g;
  g.layers.resize(net.layers.size());
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    g.layers[l].assign(net.layers[l].weight_count(), 0.0);
  }
  return g;
}

void GradientSet::accumulate(const GradientSet& other) {
  for (std::size_t l = 0; l < layers.size(); ++l) {
    for (std::size_t i = 0; i < layers[l].size(); ++i) {
      layers[l][i] += other.layers[l][i];
    }
  }
}

void GradientSet::scale(double s) {
  for (auto& layer : layers) {
    for (double& g : layer) g *= s;
  }
}

double GradientSet::squared_norm() const {
  double n = 0.0;
  for (const auto& layer : layers) {
    for (double g : layer) n += g * g;
  }
  return n;
}

SpikeErrors output_count_errors(const LayerTrace& out,
                                std::span<const int> targets,
                                ErrorConvention convention) {
  if (targets.size() != out.trains.size()) {
    throw std::invalid_argument("output_count_errors: target size mismatch");
  }
  SpikeErrors phi = zeros_like_trace(out);
  for (std::size_t j = 0; j < out.trains.size(); ++j) {
    double e = static_cast<double>(targets[j]) - out.trains[j].count();
    if (convention == ErrorConvention::kCountMinusTarget) e = -e;
    std::fill(phi[j].begin(), phi[j].end(), e);
  }
  return phi;
}

SpikeErrors output_ttfs_errors(const LayerTrace& out,
                               std::span<const double> time_errors) {
  if (time_errors.size() != out.trains.size()) {
    throw std::invalid_argument("output_ttfs_errors: error size mismatch");
  }
  SpikeErrors phi = zeros_like_trace(out);
  for (std::size_t j = 0; j < out.trains.size(); ++j) {
    if (!phi[j].empty()) phi[j][0] = time_errors[j];
  }
  return phi;
}

std::vector<double> intra_neuron_errors(const SpikeTrain& train,
                                        std::span<const double> deltas,
                                        const NeuronParams& p) {
  const int n = train.count();
  if (static_cast<int>(deltas.size()) != n) {
    throw std::invalid_argument("intra_neuron_errors: delta size mismatch");
  }
  std::vector<double> mu(n, 0.0);
  double beta = 0.0;  // sum over later spikes of delta_z / x_z
  for (int k = n - 1; k >= 0; --k) {
    mu[k] = p.threshold_over_tau() * std::exp(train.times[k] / p.tau) * beta;
    beta += deltas[k] / train.x_root[k];
  }
  return mu;
}

SpikeErrors finalize_deltas(const LayerTrace& trace, const SpikeErrors& phi,
                            const NeuronParams& p) {
  SpikeErrors delta(trace.trains.size());
  for (std::size_t j = 0; j < trace.trains.size(); ++j) {
    const SpikeTrain& train = trace.trains[j];
    const int n = train.count();
    delta[j].assign(n, 0.0);
    double beta = 0.0;
    for (int k = n - 1; k >= 0; --k) {
      const double mu =
          p.threshold_over_tau() * std::exp(train.times[k] / p.tau) * beta;
      delta[j][k] = phi[j][k] + mu;
      beta += delta[j][k] / train.x_root[k];
    }
  }
  return delta;
}

namespace {

SpikeErrors inter_dense(const LayerSpec& down,
                        const std::vector<SpikeTrain>& upstream,
                        const LayerTrace& down_trace,
                        const SpikeErrors& down_deltas) {
  const NeuronParams& p = *down.neuron;
  const int n_out = down.out_shape.size();
  std::vector<SuffixSums> sums(n_out);
  for (int m = 0; m < n_out; ++m) {
    sums[m].build(down_trace.trains[m], down_deltas[m], p);
  }
  SpikeErrors phi = zeros_like_trains(upstream);
  for (std::size_t j = 0; j < upstream.size(); ++j) {
    const SpikeTrain& train = upstream[j];
    for (int k = 0; k < train.count(); ++k) {
      const double t = train.times[k];
      const double exp_fast = std::exp(t / p.tau_s);
      const double exp_slow = std::exp(t / p.tau);
      double acc = 0.0;
      for (int m = 0; m < n_out; ++m) {
        const int idx = sums[m].first_after(t);
        acc += down.w_dense(static_cast<int>(j), m) *
               (exp_fast * sums[m].sf[idx] - exp_slow * sums[m].sh[idx]);
      }
      phi[j][k] = acc;
    }
  }
  return phi;
}

SpikeErrors inter_conv2d(const LayerSpec& down,
                         const std::vector<SpikeTrain>& upstream,
                         const LayerTrace& down_trace,
                         const SpikeErrors& down_deltas) {
  const NeuronParams& p = *down.neuron;
  const Shape& in = down.in_shape;
  const Shape& out = down.out_shape;
  std::vector<SuffixSums> sums(out.size());
  for (int m = 0; m < out.size(); ++m) {
    sums[m].build(down_trace.trains[m], down_deltas[m], p);
  }
  SpikeErrors phi = zeros_like_trains(upstream);
  for (int iy = 0; iy < in.height; ++iy) {
    for (int ix = 0; ix < in.width; ++ix) {
      for (int c = 0; c < in.channels; ++c) {
        const int u = (iy * in.width + ix) * in.channels + c;
        const SpikeTrain& train = upstream[u];
        if (train.empty()) continue;
        const int oy_lo = std::max(0, iy - down.kernel_h + 1);
        const int oy_hi = std::min(out.height - 1, iy);
        const int ox_lo = std::max(0, ix - down.kernel_w + 1);
        const int ox_hi = std::min(out.width - 1, ix);
        for (int k = 0; k < train.count(); ++k) {
          const double t = train.times[k];
          const double exp_fast = std::exp(t / p.tau_s);
          const double exp_slow = std::exp(t / p.tau);
          double acc = 0.0;
          for (int oy = oy_lo; oy <= oy_hi; ++oy) {
            for (int ox = ox_lo; ox <= ox_hi; ++ox) {
              for (int f = 0; f < down.filters; ++f) {
                const int m = (oy * out.width + ox) * out.channels + f;
                const int idx = sums[m].first_after(t);
                acc += down.w_conv(f, iy - oy, ix - ox, c) *
                       (exp_fast * sums[m].sf[idx] - exp_slow * sums[m].sh[idx]);
              }
            }
          }
          phi[u][k] = acc;
        }
      }
    }
  }
  return phi;
}

}  // namespace

SpikeErrors inter_neuron_errors(const LayerSpec& down,
                                const std::vector<SpikeTrain>& upstream,
                                const LayerTrace& down_trace,
                                const SpikeErrors& down_deltas) {
  switch (down.kind) {
    case LayerKind::kDense:
      return inter_dense(down, upstream, down_trace, down_deltas);
    case LayerKind::kConv2d:
      return inter_conv2d(down, upstream, down_trace, down_deltas);
    case LayerKind::kPool2d:
      throw std::invalid_argument(
          "inter_neuron_errors: pooling layers route errors by origin instead");
  }
  throw std::logic_error("inter_neuron_errors: unknown layer kind");
}

namespace {

// Exponential factors of every upstream spike, flattened in time order, used
// by the dense gradient accumulation.
struct UpstreamFlat {
  std::vector<double> time;
  std::vector<double> exp_fast;
  std::vector<double> exp_slow;
  std::vector<int> pre;
};

UpstreamFlat flatten_upstream(const std::vector<SpikeTrain>& upstream,
                              const NeuronParams& p) {
  struct Item {
    double t;
    int pre;
    int spike;
  };
  std::vector<Item> items;
  for (std::size_t j = 0; j < upstream.size(); ++j) {
    for (int k = 0; k < upstream[j].count(); ++k) {
      items.push_back({upstream[j].times[k], static_cast<int>(j), k});
    }
  }
  std::sort(items.begin(), items.end(), [](const Item& l, const Item& r) {
    if (l.t != r.t) return l.t < r.t;
    if (l.pre != r.pre) return l.pre < r.pre;
    return l.spike < r.spike;
  });
  UpstreamFlat flat;
  flat.time.reserve(items.size());
  for (const Item& it : items) {
    flat.time.push_back(it.t);
    flat.exp_fast.push_back(std::exp(it.t / p.tau_s));
    flat.exp_slow.push_back(std::exp(it.t / p.tau));
    flat.pre.push_back(it.pre);
  }
  return flat;
}

std::vector<double> grads_dense(const LayerSpec& layer,
                                const std::vector<SpikeTrain>& upstream,
                                const LayerTrace& trace,
                                const SpikeErrors& deltas) {
  const NeuronParams& p = *layer.neuron;
  const int n_out = layer.out_shape.size();
  std::vector<double> grads(layer.weight_count(), 0.0);
  const UpstreamFlat flat = flatten_upstream(upstream, p);
  std::vector<double> suf_f, suf_h;
  for (int m = 0; m < n_out; ++m) {
    const SpikeTrain& train = trace.trains[m];
    const int n = train.count();
    if (n == 0) continue;
    suf_f.assign(n + 1, 0.0);
    suf_h.assign(n + 1, 0.0);
    for (int k = n - 1; k >= 0; --k) {
      const SpikeSensitivity s = sensitivity(train, k, p);
      suf_f[k] = suf_f[k + 1] + deltas[m][k] * s.f;
      suf_h[k] = suf_h[k + 1] + deltas[m][k] * s.h;
    }
    // Walk upstream spikes in time order; `ptr` tracks the first post spike
    // strictly later than the current upstream spike.
    int ptr = 0;
    for (std::size_t z = 0; z < flat.time.size(); ++z) {
      while (ptr < n && train.times[ptr] <= flat.time[z]) ++ptr;
      if (ptr == n) break;  // no later post spike; nothing more to add
      grads[static_cast<std::size_t>(flat.pre[z]) * n_out + m] +=
          flat.exp_fast[z] * suf_f[ptr] - flat.exp_slow[z] * suf_h[ptr];
    }
  }
  return grads;
}

std::vector<double> grads_conv2d(const LayerSpec& layer,
                                 const std::vector<SpikeTrain>& upstream,
                                 const LayerTrace& trace,
                                 const SpikeErrors& deltas) {
  const NeuronParams& p = *layer.neuron;
  const Shape& in = layer.in_shape;
  const Shape& out = layer.out_shape;
  std::vector<double> grads(layer.weight_count(), 0.0);

  std::vector<std::vector<std::pair<double, double>>> exps(upstream.size());
  for (std::size_t u = 0; u < upstream.size(); ++u) {
    exps[u].reserve(upstream[u].count());
    for (double t : upstream[u].times) {
      exps[u].push_back({std::exp(t / p.tau_s), std::exp(t / p.tau)});
    }
  }

  std::vector<double> suf_f, suf_h;
  for (int oy = 0; oy < out.height; ++oy) {
    for (int ox = 0; ox < out.width; ++ox) {
      for (int f = 0; f < out.channels; ++f) {
        const int m = (oy * out.width + ox) * out.channels + f;
        const SpikeTrain& train = trace.trains[m];
        const int n = train.count();
        if (n == 0) continue;
        suf_f.assign(n + 1, 0.0);
        suf_h.assign(n + 1, 0.0);
        for (int k = n - 1; k >= 0; --k) {
          const SpikeSensitivity s = sensitivity(train, k, p);
          suf_f[k] = suf_f[k + 1] + deltas[m][k] * s.f;
          suf_h[k] = suf_h[k + 1] + deltas[m][k] * s.h;
        }
        for (int ky = 0; ky < layer.kernel_h; ++ky) {
          for (int kx = 0; kx < layer.kernel_w; ++kx) {
            for (int c = 0; c < in.channels; ++c) {
              const int u = ((oy + ky) * in.width + (ox + kx)) * in.channels + c;
              const SpikeTrain& up = upstream[u];
              if (up.empty()) continue;
              double acc = 0.0;
              int ptr = 0;
              for (int z = 0; z < up.count(); ++z) {
                while (ptr < n && train.times[ptr] <= up.times[z]) ++ptr;
                if (ptr == n) break;
                acc += exps[u][z].first * suf_f[ptr] -
                       exps[u][z].second * suf_h[ptr];
              }
              grads[((static_cast<std::size_t>(f) * layer.kernel_h + ky) *
                         layer.kernel_w +
                     kx) *
                        in.channels +
                    c] += acc;
            }
          }
        }
      }
    }
  }
  return grads;
}

}  // namespace

std::vector<double> weight_gradients(const LayerSpec& layer,
                                     const std::vector<SpikeTrain>& upstream,
                                     const LayerTrace& trace,
                                     const SpikeErrors& deltas) {
  switch (layer.kind) {
    case LayerKind::kDense:
      return grads_dense(layer, upstream, trace, deltas);
    case LayerKind::kConv2d:
      return grads_conv2d(layer, upstream, trace, deltas);
    case LayerKind::kPool2d:
      return {};
  }
  throw std::logic_error("weight_gradients: unknown layer kind");
}

BackwardResult backward(const NetworkSpec& net, const ForwardTrace& trace,
                        int label, const TargetSpec& spec,
                        const BackwardOptions& options) {
  if (trace.layers.size() != net.layers.size()) {
    throw std::invalid_argument("backward: trace does not match network depth");
  }
  const int n_out = net.output_size();
  if (label < 0 || label >= n_out) {
    throw std::invalid_argument("backward: label " + std::to_string(label) +
                                " outside [0, " + std::to_string(n_out) + ")");
  }
  spec.validate();

  BackwardResult result;
  const LayerTrace& out = trace.output();

  // Injected output errors and the sample loss.
  SpikeErrors out_phi;
  if (spec.mode == LossMode::kSpikeCount) {
    const std::vector<int> targets = target_counts(label, n_out, spec);
    const std::vector<int> counts = output_counts(trace);
    result.loss = spike_count_loss(counts, targets);
    out_phi = output_count_errors(out, targets, options.convention);
  } else {
    const auto first = output_first_times(trace);
    const TtfsLossResult r = ttfs_softmax_loss(first, label, spec);
    result.loss = r.loss;
    out_phi = output_ttfs_errors(out, r.time_errors);
  }

  // Walk the layers top-down. errors[l] accumulates the injected terms for
  // layer l before it is processed.
  const int depth = net.num_layers();
  std::vector<SpikeErrors> errors(depth);
  for (int l = 0; l < depth; ++l) errors[l] = zeros_like_trace(trace.layers[l]);
  errors[depth - 1] = std::move(out_phi);

  result.grads = GradientSet::zeros_like(net);
  for (int l = depth - 1; l >= 0; --l) {
    const LayerSpec& layer = net.layers[l];
    const std::vector<SpikeTrain>& upstream =
        l == 0 ? trace.input_trains : trace.layers[l - 1].trains;
    if (layer.kind == LayerKind::kPool2d) {
      if (l == 0) continue;
      // Pooled spikes are pass-throughs: route each error to its origin.
      const LayerTrace& pool = trace.layers[l];
      for (std::size_t g = 0; g < pool.trains.size(); ++g) {
        for (std::size_t i = 0; i < pool.origins[g].size(); ++i) {
          const PoolOrigin& o = pool.origins[g][i];
          errors[l - 1][o.source][o.spike] += errors[l][g][i];
        }
      }
      continue;
    }
    const SpikeErrors delta =
        finalize_deltas(trace.layers[l], errors[l], *layer.neuron);
    result.grads.layers[l] =
        weight_gradients(layer, upstream, trace.layers[l], delta);
    if (l > 0) {
      const SpikeErrors up_phi =
          inter_neuron_errors(layer, upstream, trace.layers[l], delta);
      for (std::size_t j = 0; j < up_phi.size(); ++j) {
        for (std::size_t k = 0; k < up_phi[j].size(); ++k) {
          errors[l - 1][j][k] += up_phi[j][k];
        }
      }
    }
  }
  return result;
}

}  // namespace evspike
