#include "evspike/loss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace evspike {

TargetSpec TargetSpec::resolved(double output_tau, double t_sim) const {
  TargetSpec r = *this;
  if (r.softmax_tau == 0.0) r.softmax_tau = output_tau;
  if (r.no_spike_time == 0.0) r.no_spike_time = 2.0 * t_sim;
  r.validate();
  return r;
}

void TargetSpec::validate() const {
  if (mode == LossMode::kSpikeCount) {
    if (count_false < 0 || count_true <= count_false) {
      throw std::invalid_argument(
          "TargetSpec: need count_true > count_false >= 0, got " +
          std::to_string(count_true) + "/" + std::to_string(count_false));
    }
  } else {
    if (!(softmax_tau > 0.0)) {
      throw std::invalid_argument("TargetSpec: softmax_tau must be > 0");
    }
    if (!(no_spike_time > 0.0)) {
      throw std::invalid_argument("TargetSpec: no_spike_time must be > 0");
    }
  }
}

std::vector<int> target_counts(int label, int n_out, const TargetSpec& spec) {
  if (label < 0 || label >= n_out) {
    throw std::invalid_argument("target_counts: label outside output range");
  }
  std::vector<int> y(n_out, spec.count_false);
  y[label] = spec.count_true;
  return y;
}

double spike_count_loss(std::span<const int> counts,
                        std::span<const int> targets) {
  if (counts.size() != targets.size()) {
    throw std::invalid_argument("spike_count_loss: size mismatch");
  }
  double loss = 0.0;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    const double d = static_cast<double>(counts[j]) - targets[j];
    loss += 0.5 * d * d;
  }
  return loss;
}

TtfsLossResult ttfs_softmax_loss(
    std::span<const std::optional<double>> first_times, int label,
    const TargetSpec& spec) {
  const int n = static_cast<int>(first_times.size());
  if (label < 0 || label >= n) {
    throw std::invalid_argument("ttfs_softmax_loss: label outside output range");
  }
  spec.validate();
  std::vector<double> t(n);
  for (int j = 0; j < n; ++j) {
    t[j] = first_times[j].value_or(spec.no_spike_time);
  }
  // Softmax over negated times, shifted for stability.
  double best = std::numeric_limits<double>::infinity();
  for (double v : t) best = std::min(best, v);
  double z = 0.0;
  TtfsLossResult r;
  r.probabilities.resize(n);
  for (int j = 0; j < n; ++j) {
    r.probabilities[j] = std::exp((best - t[j]) / spec.softmax_tau);
    z += r.probabilities[j];
  }
  for (double& p : r.probabilities) p /= z;
  r.loss = -std::log(r.probabilities[label]);
  r.time_errors.assign(n, 0.0);
  for (int j = 0; j < n; ++j) {
    if (!first_times[j].has_value()) continue;  // no spike to carry the error
    const double indicator = j == label ? 1.0 : 0.0;
    r.time_errors[j] = (indicator - r.probabilities[j]) / spec.softmax_tau;
  }
  return r;
}

std::vector<int> output_counts(const ForwardTrace& trace) {
  const LayerTrace& out = trace.output();
  std::vector<int> counts(out.trains.size());
  for (std::size_t j = 0; j < out.trains.size(); ++j) {
    counts[j] = out.trains[j].count();
  }
  return counts;
}

std::vector<std::optional<double>> output_first_times(const ForwardTrace& trace) {
  const LayerTrace& out = trace.output();
  std::vector<std::optional<double>> first(out.trains.size());
  for (std::size_t j = 0; j < out.trains.size(); ++j) {
    if (!out.trains[j].empty()) first[j] = out.trains[j].times.front();
  }
  return first;
}

int predict(const ForwardTrace& trace, LossMode mode) {
  const LayerTrace& out = trace.output();
  const int n = static_cast<int>(out.trains.size());
  int best = 0;
  if (mode == LossMode::kSpikeCount) {
    int best_count = -1;
    for (int j = 0; j < n; ++j) {
      if (out.trains[j].count() > best_count) {
        best_count = out.trains[j].count();
        best = j;
      }
    }
  } else {
    double best_time = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
      const double t =
          out.trains[j].first_or(std::numeric_limits<double>::infinity());
      if (t < best_time) {
        best_time = t;
        best = j;
      }
    }
  }
  return best;
}

double sample_loss(const ForwardTrace& trace, int label, const TargetSpec& spec) {
  if (spec.mode == LossMode::kSpikeCount) {
    const auto counts = output_counts(trace);
    const auto targets =
        target_counts(label, static_cast<int>(counts.size()), spec);
    return spike_count_loss(counts, targets);
  }
  const auto first = output_first_times(trace);
  return ttfs_softmax_loss(first, label, spec).loss;
}

}  // namespace evspike
