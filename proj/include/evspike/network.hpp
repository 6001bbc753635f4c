#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "evspike/params.hpp"

namespace evspike {

enum class LayerKind { kDense, kConv2d, kPool2d };

// Spatial extent of a layer's unit grid. Dense layers use height=1, width=1,
// channels=N. Unit index order is row-major: (y, x, c) -> (y*W + x)*C + c.
struct Shape {
  int height = 1;
  int width = 1;
  int channels = 1;

  int size() const { return height * width * channels; }
  bool operator==(const Shape&) const = default;
  std::string str() const;
};

// Uniform weight-initialization range [lo, hi).
struct UniformInit {
  double lo = -1.0;
  double hi = 1.0;
};

// One layer of the network. Pooling layers carry no weights and no neuron
// parameters; they merge the spike trains of each window.
struct LayerSpec {
  LayerKind kind = LayerKind::kDense;
  Shape in_shape;
  Shape out_shape;
  std::optional<NeuronParams> neuron;  // absent for pooling layers
  UniformInit init;
  std::vector<double> weights;

  // Convolution geometry (valid only for kConv2d).
  int filters = 0;
  int kernel_h = 0;
  int kernel_w = 0;

  // Pooling window edge (valid only for kPool2d); stride equals the window.
  int pool = 0;

  bool spiking() const { return kind != LayerKind::kPool2d; }
  bool weighted() const { return kind != LayerKind::kPool2d; }
  std::size_t weight_count() const;

  // Dense weight layout: weights[pre * n_out + post].
  double& w_dense(int pre, int post);
  double w_dense(int pre, int post) const;

  // Conv weight layout: weights[((f * kernel_h + ky) * kernel_w + kx) * in_c + c].
  double& w_conv(int f, int ky, int kx, int c);
  double w_conv(int f, int ky, int kx, int c) const;
};

LayerSpec make_dense(int n_in, int n_out, const NeuronParams& p,
                     UniformInit init = {});
LayerSpec make_conv2d(const Shape& in, int filters, int kernel_h, int kernel_w,
                      const NeuronParams& p, UniformInit init = {});
LayerSpec make_pool2d(const Shape& in, int window);

// Whole feed-forward network: input geometry plus an ordered layer chain.
struct NetworkSpec {
  Shape input_shape;
  std::vector<LayerSpec> layers;

  int input_size() const { return input_shape.size(); }
  int output_size() const;
  int num_layers() const { return static_cast<int>(layers.size()); }

  // Index of the last weighted layer (the readout).
  int output_layer() const;

  // Throws if the layer chain is empty, shapes do not connect, the last layer
  // is not spiking, or a weight buffer has the wrong length.
  void validate() const;
};

// Fills one layer's weight tensor from its uniform init range. Deterministic
// in `seed`; rejects an empty or inverted range.
void init_weights(LayerSpec& layer, std::uint64_t seed);

// Seeds every weighted layer with a distinct stream derived from `seed`.
void init_network(NetworkSpec& net, std::uint64_t seed);

}  // namespace evspike
