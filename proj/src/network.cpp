#include "evspike/network.hpp"

#include <random>
#include <stdexcept>
#include <string>

namespace evspike {

std::string Shape::str() const {
  return std::to_string(height) + "x" + std::to_string(width) + "x" +
         std::to_string(channels);
}

std::size_t LayerSpec::weight_count() const {
  switch (kind) {
    case LayerKind::kDense:
      return static_cast<std::size_t>(in_shape.size()) * out_shape.size();
    case LayerKind::kConv2d:
      return static_cast<std::size_t>(filters) * kernel_h * kernel_w *
             in_shape.channels;
    case LayerKind::kPool2d:
      return 0;
  }
  return 0;
}

double& LayerSpec::w_dense(int pre, int post) {
  return weights[static_cast<std::size_t>(pre) * out_shape.size() + post];
}

double LayerSpec::w_dense(int pre, int post) const {
  return weights[static_cast<std::size_t>(pre) * out_shape.size() + post];
}

double& LayerSpec::w_conv(int f, int ky, int kx, int c) {
  return weights[((static_cast<std::size_t>(f) * kernel_h + ky) * kernel_w + kx) *
                     in_shape.channels +
                 c];
}

double LayerSpec::w_conv(int f, int ky, int kx, int c) const {
  return weights[((static_cast<std::size_t>(f) * kernel_h + ky) * kernel_w + kx) *
                     in_shape.channels +
                 c];
}

LayerSpec make_dense(int n_in, int n_out, const NeuronParams& p, UniformInit init) {
  if (n_in < 1 || n_out < 1) {
    throw std::invalid_argument("make_dense: layer sizes must be >= 1");
  }
  LayerSpec l;
  l.kind = LayerKind::kDense;
  l.in_shape = {1, 1, n_in};
  l.out_shape = {1, 1, n_out};
  l.neuron = p;
  l.init = init;
  l.weights.assign(l.weight_count(), 0.0);
  return l;
}

LayerSpec make_conv2d(const Shape& in, int filters, int kernel_h, int kernel_w,
                      const NeuronParams& p, UniformInit init) {
  if (filters < 1 || kernel_h < 1 || kernel_w < 1) {
    throw std::invalid_argument("make_conv2d: filters and kernel must be >= 1");
  }
  if (in.height < kernel_h || in.width < kernel_w) {
    throw std::invalid_argument("make_conv2d: kernel " + std::to_string(kernel_h) +
                                "x" + std::to_string(kernel_w) +
                                " does not fit input " + in.str());
  }
  LayerSpec l;
  l.kind = LayerKind::kConv2d;
  l.in_shape = in;
  l.out_shape = {in.height - kernel_h + 1, in.width - kernel_w + 1, filters};
  l.neuron = p;
  l.init = init;
  l.filters = filters;
  l.kernel_h = kernel_h;
  l.kernel_w = kernel_w;
  l.weights.assign(l.weight_count(), 0.0);
  return l;
}

LayerSpec make_pool2d(const Shape& in, int window) {
  if (window < 1) throw std::invalid_argument("make_pool2d: window must be >= 1");
  if (in.height % window != 0 || in.width % window != 0) {
    throw std::invalid_argument("make_pool2d: window " + std::to_string(window) +
                                " does not tile input " + in.str());
  }
  LayerSpec l;
  l.kind = LayerKind::kPool2d;
  l.in_shape = in;
  l.out_shape = {in.height / window, in.width / window, in.channels};
  l.pool = window;
  return l;
}

int NetworkSpec::output_size() const {
  return layers.empty() ? 0 : layers.back().out_shape.size();
}

int NetworkSpec::output_layer() const {
  for (int i = num_layers() - 1; i >= 0; --i) {
    if (layers[i].weighted()) return i;
  }
  return -1;
}

void NetworkSpec::validate() const {
  if (layers.empty()) throw std::invalid_argument("NetworkSpec: no layers");
  Shape cur = input_shape;
  if (cur.size() < 1) throw std::invalid_argument("NetworkSpec: empty input shape");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const LayerSpec& l = layers[i];
    const std::string tag = "layer " + std::to_string(i);
    // Dense layers flatten whatever geometry precedes them.
    const bool shapes_connect = l.kind == LayerKind::kDense
                                    ? l.in_shape.size() == cur.size()
                                    : l.in_shape == cur;
    if (!shapes_connect) {
      throw std::invalid_argument("NetworkSpec: " + tag + " expects input " +
                                  l.in_shape.str() + " but receives " + cur.str());
    }
    if (l.spiking() && !l.neuron.has_value()) {
      throw std::invalid_argument("NetworkSpec: " + tag + " lacks neuron parameters");
    }
    if (l.weights.size() != l.weight_count()) {
      throw std::invalid_argument("NetworkSpec: " + tag + " weight buffer has " +
                                  std::to_string(l.weights.size()) + " values, expected " +
                                  std::to_string(l.weight_count()));
    }
    cur = l.out_shape;
  }
  if (!layers.back().spiking()) {
    throw std::invalid_argument("NetworkSpec: readout layer cannot be a pooling layer");
  }
}

void init_weights(LayerSpec& layer, std::uint64_t seed) {
  if (!layer.weighted()) return;
  if (!(layer.init.lo < layer.init.hi)) {
    throw std::invalid_argument("init_weights: empty init range");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(layer.init.lo, layer.init.hi);
  layer.weights.resize(layer.weight_count());
  for (double& w : layer.weights) w = dist(rng);
}

void init_network(NetworkSpec& net, std::uint64_t seed) {
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    // Distinct stream per layer; a golden-ratio stride keeps them far apart.
    init_weights(net.layers[i], seed + 0x9e3779b97f4a7c15ULL * (i + 1));
  }
}

}  // namespace evspike
