#pragma once

#include <cstddef>
#include <vector>

namespace evspike {

// One input spike: which unit fired and when.
struct Event {
  int neuron = 0;
  double time = 0.0;
};

// Input spikes of a single sample. The canonical order is ascending time with
// ties broken by neuron index; normalize() establishes it and checks bounds.
struct EventBatch {
  std::vector<Event> events;

  std::size_t size() const { return events.size(); }
  bool empty() const { return events.empty(); }
  void add(int neuron, double time) { events.push_back({neuron, time}); }

  // Sorts into canonical order and validates every event: time must be finite
  // and non-negative, the unit index must lie in [0, input_size).
  void normalize(int input_size);
  bool is_normalized(int input_size) const;
};

// Output of one neuron over a simulation window: spike times plus the solver
// state (quadratic coefficients and discriminant root) captured at each spike,
// kept because the backward pass reuses them.
struct SpikeTrain {
  std::vector<double> times;
  std::vector<double> a_coeff;
  std::vector<double> b_coeff;
  std::vector<double> x_root;

  int count() const { return static_cast<int>(times.size()); }
  bool empty() const { return times.empty(); }

  void add(double t, double a, double b, double x) {
    times.push_back(t);
    a_coeff.push_back(a);
    b_coeff.push_back(b);
    x_root.push_back(x);
  }

  // First spike time, or `fallback` for a silent neuron.
  double first_or(double fallback) const { return times.empty() ? fallback : times.front(); }
};

}  // namespace evspike
