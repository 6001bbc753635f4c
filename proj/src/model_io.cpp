#include "evspike/model_io.hpp"

#include <cstring>
#include <fstream>
#include <vector>

#include "evspike/data.hpp"

namespace evspike {

namespace {

constexpr char kMagic[4] = {'E', 'V', 'S', 'M'};
constexpr std::uint32_t kVersion = 1;

// Little-endian serialization helpers, independent of host byte order.
void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void put_u64(std::vector<unsigned char>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void put_f64(std::vector<unsigned char>& out, double d) {
  std::uint64_t bits;
  std::memcpy(&bits, &d, sizeof bits);
  put_u64(out, bits);
}

void put_shape(std::vector<unsigned char>& out, const Shape& s) {
  put_u32(out, static_cast<std::uint32_t>(s.height));
  put_u32(out, static_cast<std::uint32_t>(s.width));
  put_u32(out, static_cast<std::uint32_t>(s.channels));
}

class Reader {
 public:
  Reader(std::vector<unsigned char> bytes, std::string path)
      : bytes_(std::move(bytes)), path_(std::move(path)) {}

  std::uint8_t u8() { return take(1)[0]; }

  std::uint32_t u32() {
    const unsigned char* p = take(4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
    return v;
  }

  std::uint64_t u64() {
    const unsigned char* p = take(8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
  }

  double f64() {
    const std::uint64_t bits = u64();
    double d;
    std::memcpy(&d, &bits, sizeof d);
    return d;
  }

  Shape shape() {
    Shape s;
    s.height = static_cast<int>(u32());
    s.width = static_cast<int>(u32());
    s.channels = static_cast<int>(u32());
    return s;
  }

  const unsigned char* take(std::size_t n) {
    if (pos_ + n > bytes_.size()) {
      throw DataError(DataError::Code::kTruncated,
                      path_ + ": model file ends early at byte " +
                          std::to_string(pos_));
    }
    const unsigned char* p = bytes_.data() + pos_;
    pos_ += n;
    return p;
  }

 private:
  std::vector<unsigned char> bytes_;
  std::string path_;
  std::size_t pos_ = 0;
};

std::uint8_t kind_code(LayerKind k) {
  switch (k) {
    case LayerKind::kDense: return 0;
    case LayerKind::kConv2d: return 1;
    case LayerKind::kPool2d: return 2;
  }
  return 255;
}

}  // namespace

void save_model(const std::string& path, const NetworkSpec& net) {
  net.validate();
  std::vector<unsigned char> out;
  out.insert(out.end(), kMagic, kMagic + 4);
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(net.layers.size()));
  put_shape(out, net.input_shape);
  for (const LayerSpec& l : net.layers) {
    out.push_back(kind_code(l.kind));
    put_shape(out, l.in_shape);
    put_shape(out, l.out_shape);
    if (l.spiking()) {
      put_f64(out, l.neuron->tau_s);
      put_f64(out, l.neuron->theta);
      put_u32(out, static_cast<std::uint32_t>(l.neuron->max_spikes));
      put_f64(out, l.init.lo);
      put_f64(out, l.init.hi);
    }
    if (l.kind == LayerKind::kConv2d) {
      put_u32(out, static_cast<std::uint32_t>(l.filters));
      put_u32(out, static_cast<std::uint32_t>(l.kernel_h));
      put_u32(out, static_cast<std::uint32_t>(l.kernel_w));
    }
    if (l.kind == LayerKind::kPool2d) {
      put_u32(out, static_cast<std::uint32_t>(l.pool));
    }
    if (l.weighted()) {
      put_u64(out, l.weights.size());
      for (double w : l.weights) put_f64(out, w);
    }
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw DataError(DataError::Code::kIo, "cannot open " + path);
  f.write(reinterpret_cast<const char*>(out.data()),
          static_cast<std::streamsize>(out.size()));
  if (!f) throw DataError(DataError::Code::kIo, "write failed for " + path);
}

NetworkSpec load_model(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw DataError(DataError::Code::kIo, "cannot open " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)),
                                   std::istreambuf_iterator<char>());
  Reader r(std::move(bytes), path);
  const unsigned char* magic = r.take(4);
  if (std::memcmp(magic, kMagic, 4) != 0) {
    throw DataError(DataError::Code::kBadMagic,
                    path + ": not a model file (magic mismatch)");
  }
  const std::uint32_t version = r.u32();
  if (version != kVersion) {
    throw DataError(DataError::Code::kMalformed,
                    path + ": unsupported model version " +
                        std::to_string(version));
  }
  NetworkSpec net;
  const std::uint32_t depth = r.u32();
  net.input_shape = r.shape();
  for (std::uint32_t i = 0; i < depth; ++i) {
    const std::uint8_t kind = r.u8();
    LayerSpec l;
    switch (kind) {
      case 0: l.kind = LayerKind::kDense; break;
      case 1: l.kind = LayerKind::kConv2d; break;
      case 2: l.kind = LayerKind::kPool2d; break;
      default:
        throw DataError(DataError::Code::kMalformed,
                        path + ": unknown layer kind " + std::to_string(kind));
    }
    l.in_shape = r.shape();
    l.out_shape = r.shape();
    if (l.kind != LayerKind::kPool2d) {
      const double tau_s = r.f64();
      const double theta = r.f64();
      const int cap = static_cast<int>(r.u32());
      try {
        l.neuron = NeuronParams(tau_s, theta, cap);
      } catch (const std::invalid_argument& e) {
        throw DataError(DataError::Code::kMalformed, path + ": " + e.what());
      }
      l.init.lo = r.f64();
      l.init.hi = r.f64();
    }
    if (l.kind == LayerKind::kConv2d) {
      l.filters = static_cast<int>(r.u32());
      l.kernel_h = static_cast<int>(r.u32());
      l.kernel_w = static_cast<int>(r.u32());
    }
    if (l.kind == LayerKind::kPool2d) {
      l.pool = static_cast<int>(r.u32());
    }
    if (l.kind != LayerKind::kPool2d) {
      const std::uint64_t n = r.u64();
      l.weights.resize(n);
      for (std::uint64_t k = 0; k < n; ++k) l.weights[k] = r.f64();
    }
    net.layers.push_back(std::move(l));
  }
  try {
    net.validate();
  } catch (const std::invalid_argument& e) {
    throw DataError(DataError::Code::kMalformed, path + ": " + e.what());
  }
  return net;
}

}  // namespace evspike
