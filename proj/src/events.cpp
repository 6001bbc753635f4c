#include "evspike/events.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace evspike {

namespace {

bool event_less(const Event& l, const Event& r) {
  if (l.time != r.time) return l.time < r.time;
  return l.neuron < r.neuron;
}

}  // namespace

void EventBatch::normalize(int input_size) {
  for (const Event& e : events) {
    if (!std::isfinite(e.time) || e.time < 0.0) {
      throw std::invalid_argument("EventBatch: spike time must be finite and >= 0, got " +
                                  std::to_string(e.time));
    }
    if (e.neuron < 0 || e.neuron >= input_size) {
      throw std::invalid_argument("EventBatch: unit index " + std::to_string(e.neuron) +
                                  " outside [0, " + std::to_string(input_size) + ")");
    }
  }
  std::sort(events.begin(), events.end(), event_less);
}

bool EventBatch::is_normalized(int input_size) const {
  for (std::size_t i = 0; i < events.size(); ++i) {
    const Event& e = events[i];
    if (!std::isfinite(e.time) || e.time < 0.0) return false;
    if (e.neuron < 0 || e.neuron >= input_size) return false;
    if (i > 0 && event_less(e, events[i - 1])) return false;
  }
  return true;
}

}  // namespace evspike
