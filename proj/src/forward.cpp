#include "evspike/forward.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace evspike {

namespace {

// Discriminant at or below this is treated as a graze, not a crossing.
constexpr double kDiscEps = 1e-12;

// Longest window, in synaptic time constants, for which the exp-weighted
// drive sums stay comfortably inside double range.
constexpr double kMaxWindowTau = 500.0;

}  // namespace

void NeuronAccumulator::ingest(double t, double w, const NeuronParams& p) {
  a_syn += w * std::exp(t / p.tau_s);
  b_syn += w * std::exp(t / p.tau);
}

void NeuronAccumulator::ingest_scaled(double w, double exp_fast, double exp_slow) {
  a_syn += w * exp_fast;
  b_syn += w * exp_slow;
}

void NeuronAccumulator::on_spike(double t, const NeuronParams& p) {
  b_reset += p.threshold_over_tau() * std::exp(t / p.tau);
}

std::optional<SpikeSolution> solve_next_spike(double a, double b, double t_lo,
                                              double t_hi,
                                              const NeuronParams& p) {
  if (!(t_hi > t_lo)) return std::nullopt;
  // With s = exp(-t/tau) the membrane is tau * (b*s - a*s^2); it can only
  // cross the threshold upward when both coefficients are positive.
  if (a <= 0.0 || b <= 0.0) return std::nullopt;
  const double c = p.threshold_over_tau();
  const double disc = b * b - 4.0 * a * c;
  if (disc <= kDiscEps) return std::nullopt;
  const double x = std::sqrt(disc);
  // Larger root in s = earlier crossing in t, and the one passed upward.
  const double t_star = p.tau * std::log(2.0 * a / (b + x));
  if (!(t_star > t_lo) || !(t_star <= t_hi)) return std::nullopt;
  return SpikeSolution{t_star, a, b, x};
}

namespace {

// One pre-synaptic spike prepared for the window loop: absolute time, its two
// exponential weights, and where it came from.
struct ScheduledSpike {
  double time;
  double exp_fast;  // exp(time / tau_s)
  double exp_slow;  // exp(time / tau)
  int pre;
  int spike;
};

bool scheduled_less(const ScheduledSpike& l, const ScheduledSpike& r) {
  if (l.time != r.time) return l.time < r.time;
  if (l.pre != r.pre) return l.pre < r.pre;
  return l.spike < r.spike;
}

// Event-driven simulation of one neuron over [0, t_end]. `schedule` must be
// sorted by scheduled_less; entries at or after t_end are ignored. WeightFn
// maps a schedule entry's `pre` to its synapse weight.
template <class WeightFn>
SpikeTrain run_neuron(std::span<const ScheduledSpike> schedule,
                      WeightFn&& weight_of, const NeuronParams& p, double t_end,
                      std::int64_t* exact_ties) {
  SpikeTrain out;
  NeuronAccumulator acc;
  double cursor = 0.0;
  std::size_t i = 0;
  while (true) {
    const bool pending =
        i < schedule.size() && schedule[i].time < t_end;
    const double window_end = pending ? schedule[i].time : t_end;
    while (out.count() < p.max_spikes) {
      auto sol = solve_next_spike(acc.a(), acc.b(), cursor, window_end, p);
      if (!sol) break;
      out.add(sol->time, sol->a, sol->b, sol->x);
      acc.on_spike(sol->time, p);
      cursor = sol->time;
      if (exact_ties && pending && sol->time == schedule[i].time) ++*exact_ties;
    }
    if (out.count() >= p.max_spikes) break;  // hard stop at the spike cap
    if (!pending) break;
    const double t_in = schedule[i].time;
    while (i < schedule.size() && schedule[i].time == t_in) {
      const ScheduledSpike& s = schedule[i];
      acc.ingest_scaled(weight_of(s.pre), s.exp_fast, s.exp_slow);
      ++i;
    }
    cursor = t_in;
  }
  return out;
}

void check_window(const NeuronParams& p, double t_end) {
  if (!(t_end > 0.0)) {
    throw std::invalid_argument("simulation window must be positive");
  }
  if (t_end / p.tau_s > kMaxWindowTau) {
    throw std::domain_error(
        "simulation window of " + std::to_string(t_end / p.tau_s) +
        " synaptic time constants exceeds the stable limit of 500");
  }
}

}  // namespace

SpikeTrain infer_neuron(std::span<const WeightedEvent> events,
                        const NeuronParams& p, double t_end,
                        std::int64_t* exact_ties) {
  check_window(p, t_end);
  std::vector<ScheduledSpike> schedule;
  schedule.reserve(events.size());
  for (std::size_t i = 0; i < events.size(); ++i) {
    const WeightedEvent& e = events[i];
    if (i > 0 && e.time < events[i - 1].time) {
      throw std::invalid_argument("infer_neuron: input events out of order");
    }
    if (e.time >= t_end) continue;
    schedule.push_back({e.time, std::exp(e.time / p.tau_s),
                        std::exp(e.time / p.tau), static_cast<int>(i), 0});
  }
  const auto weight_of = [&](int idx) { return events[idx].weight; };
  return run_neuron(std::span<const ScheduledSpike>(schedule), weight_of, p,
                    t_end, exact_ties);
}

std::int64_t LayerTrace::total_spikes() const {
  std::int64_t n = 0;
  for (const SpikeTrain& t : trains) n += t.count();
  return n;
}

namespace {

// Schedule of every upstream spike before t_end, exponentials precomputed.
std::vector<ScheduledSpike> layer_schedule(const std::vector<SpikeTrain>& upstream,
                                           const NeuronParams& p, double t_end) {
  std::vector<ScheduledSpike> schedule;
  for (std::size_t pre = 0; pre < upstream.size(); ++pre) {
    const SpikeTrain& train = upstream[pre];
    for (int k = 0; k < train.count(); ++k) {
      const double t = train.times[k];
      if (t >= t_end) continue;
      schedule.push_back({t, std::exp(t / p.tau_s), std::exp(t / p.tau),
                          static_cast<int>(pre), k});
    }
  }
  std::sort(schedule.begin(), schedule.end(), scheduled_less);
  return schedule;
}

LayerTrace infer_dense(const LayerSpec& layer,
                       const std::vector<SpikeTrain>& upstream, double t_end,
                       std::int64_t* exact_ties) {
  const NeuronParams& p = *layer.neuron;
  const int n_out = layer.out_shape.size();
  const auto schedule = layer_schedule(upstream, p, t_end);
  LayerTrace trace;
  trace.trains.resize(n_out);
  for (int m = 0; m < n_out; ++m) {
    const auto weight_of = [&](int pre) { return layer.w_dense(pre, m); };
    trace.trains[m] = run_neuron(std::span<const ScheduledSpike>(schedule),
                                 weight_of, p, t_end, exact_ties);
  }
  return trace;
}

LayerTrace infer_conv2d(const LayerSpec& layer,
                        const std::vector<SpikeTrain>& upstream, double t_end,
                        std::int64_t* exact_ties) {
  const NeuronParams& p = *layer.neuron;
  const Shape& in = layer.in_shape;
  const Shape& out = layer.out_shape;
  LayerTrace trace;
  trace.trains.resize(out.size());

  // Exponentials per upstream spike, shared by all receptive fields.
  std::vector<std::vector<std::pair<double, double>>> exps(upstream.size());
  for (std::size_t u = 0; u < upstream.size(); ++u) {
    const SpikeTrain& train = upstream[u];
    exps[u].reserve(train.count());
    for (double t : train.times) {
      exps[u].push_back({std::exp(t / p.tau_s), std::exp(t / p.tau)});
    }
  }

  std::vector<ScheduledSpike> field;
  std::vector<int> field_tap;  // indexed by a field entry's pre-sort position
  for (int oy = 0; oy < out.height; ++oy) {
    for (int ox = 0; ox < out.width; ++ox) {
      // Gather the receptive field once; reuse it for every filter.
      field.clear();
      field_tap.clear();
      for (int ky = 0; ky < layer.kernel_h; ++ky) {
        for (int kx = 0; kx < layer.kernel_w; ++kx) {
          for (int c = 0; c < in.channels; ++c) {
            const int u = ((oy + ky) * in.width + (ox + kx)) * in.channels + c;
            const int tap = (ky * layer.kernel_w + kx) * in.channels + c;
            const SpikeTrain& train = upstream[u];
            for (int k = 0; k < train.count(); ++k) {
              const double t = train.times[k];
              if (t >= t_end) continue;
              field.push_back({t, exps[u][k].first, exps[u][k].second,
                               static_cast<int>(field.size()), k});
              field_tap.push_back(tap);
            }
          }
        }
      }
      std::sort(field.begin(), field.end(), scheduled_less);
      for (int f = 0; f < layer.filters; ++f) {
        const double* w_filter =
            layer.weights.data() +
            static_cast<std::size_t>(f) * layer.kernel_h * layer.kernel_w *
                in.channels;
        const auto weight_of = [&](int idx) { return w_filter[field_tap[idx]]; };
        const int out_idx = (oy * out.width + ox) * out.channels + f;
        trace.trains[out_idx] =
            run_neuron(std::span<const ScheduledSpike>(field), weight_of, p,
                       t_end, exact_ties);
      }
    }
  }
  return trace;
}

LayerTrace infer_pool2d(const LayerSpec& layer,
                        const std::vector<SpikeTrain>& upstream) {
  const Shape& in = layer.in_shape;
  const Shape& out = layer.out_shape;
  LayerTrace trace;
  trace.trains.resize(out.size());
  trace.origins.resize(out.size());

  struct Merged {
    double time;
    int source;
    int spike;
  };
  std::vector<Merged> merged;
  for (int oy = 0; oy < out.height; ++oy) {
    for (int ox = 0; ox < out.width; ++ox) {
      for (int c = 0; c < out.channels; ++c) {
        merged.clear();
        for (int wy = 0; wy < layer.pool; ++wy) {
          for (int wx = 0; wx < layer.pool; ++wx) {
            const int u = ((oy * layer.pool + wy) * in.width +
                           (ox * layer.pool + wx)) *
                              in.channels +
                          c;
            const SpikeTrain& train = upstream[u];
            for (int k = 0; k < train.count(); ++k) {
              merged.push_back({train.times[k], u, k});
            }
          }
        }
        std::sort(merged.begin(), merged.end(), [](const Merged& l, const Merged& r) {
          if (l.time != r.time) return l.time < r.time;
          if (l.source != r.source) return l.source < r.source;
          return l.spike < r.spike;
        });
        const int out_idx = (oy * out.width + ox) * out.channels + c;
        SpikeTrain& train = trace.trains[out_idx];
        auto& origins = trace.origins[out_idx];
        for (const Merged& m : merged) {
          train.times.push_back(m.time);
          origins.push_back({m.source, m.spike});
        }
      }
    }
  }
  return trace;
}

}  // namespace

LayerTrace infer_layer(const LayerSpec& layer,
                       const std::vector<SpikeTrain>& upstream, double t_end,
                       std::int64_t* exact_ties) {
  if (static_cast<int>(upstream.size()) != layer.in_shape.size()) {
    throw std::invalid_argument("infer_layer: got " + std::to_string(upstream.size()) +
                                " upstream trains for input shape " +
                                layer.in_shape.str());
  }
  switch (layer.kind) {
    case LayerKind::kDense:
      check_window(*layer.neuron, t_end);
      return infer_dense(layer, upstream, t_end, exact_ties);
    case LayerKind::kConv2d:
      check_window(*layer.neuron, t_end);
      return infer_conv2d(layer, upstream, t_end, exact_ties);
    case LayerKind::kPool2d:
      return infer_pool2d(layer, upstream);
  }
  throw std::logic_error("infer_layer: unknown layer kind");
}

ForwardTrace forward(const NetworkSpec& net, const EventBatch& batch,
                     double t_end) {
  net.validate();
  if (!batch.is_normalized(net.input_size())) {
    throw std::invalid_argument(
        "forward: input events must be normalized for input size " +
        std::to_string(net.input_size()));
  }
  ForwardTrace trace;
  trace.t_end = t_end;
  trace.input_trains.resize(net.input_size());
  for (const Event& e : batch.events) {
    trace.input_trains[e.neuron].times.push_back(e.time);
  }
  const std::vector<SpikeTrain>* upstream = &trace.input_trains;
  trace.layers.reserve(net.layers.size());
  for (const LayerSpec& layer : net.layers) {
    trace.layers.push_back(
        infer_layer(layer, *upstream, t_end, &trace.exact_tie_count));
    upstream = &trace.layers.back().trains;
  }
  return trace;
}

}  // namespace evspike
