#pragma once

#include <string>

#include "evspike/network.hpp"

namespace evspike {

// Binary model container, little-endian, magic "EVSM", format version 1.
// Holds the input shape, one record per layer (kind, shapes, neuron
// constants, geometry) and the f64 weight tensors. docs/FORMATS.md has the
// byte layout.
void save_model(const std::string& path, const NetworkSpec& net);
NetworkSpec load_model(const std::string& path);

}  // namespace evspike
