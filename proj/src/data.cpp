#include "evspike/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

namespace evspike {

namespace {

std::uint32_t be32(const unsigned char* p) {
  return (static_cast<std::uint32_t>(p[0]) << 24) |
         (static_cast<std::uint32_t>(p[1]) << 16) |
         (static_cast<std::uint32_t>(p[2]) << 8) | static_cast<std::uint32_t>(p[3]);
}

std::vector<unsigned char> read_all(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(DataError::Code::kIo, "cannot open " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  return bytes;
}

constexpr std::uint32_t kImagesMagic = 0x00000803;
constexpr std::uint32_t kLabelsMagic = 0x00000801;

}  // namespace

std::span<const std::uint8_t> RawImages::image(int i) const {
  const std::size_t n = static_cast<std::size_t>(rows) * cols;
  return {pixels.data() + n * i, n};
}

RawImages load_idx_images(const std::string& path) {
  const auto bytes = read_all(path);
  if (bytes.size() < 16) {
    throw DataError(DataError::Code::kTruncated,
                    path + ": header needs 16 bytes, file has " +
                        std::to_string(bytes.size()));
  }
  const std::uint32_t magic = be32(bytes.data());
  if (magic != kImagesMagic) {
    std::ostringstream msg;
    msg << path << ": image magic mismatch, got 0x" << std::hex << magic;
    throw DataError(DataError::Code::kBadMagic, msg.str());
  }
  RawImages img;
  img.count = static_cast<int>(be32(bytes.data() + 4));
  img.rows = static_cast<int>(be32(bytes.data() + 8));
  img.cols = static_cast<int>(be32(bytes.data() + 12));
  const std::size_t need =
      16 + static_cast<std::size_t>(img.count) * img.rows * img.cols;
  if (bytes.size() < need) {
    throw DataError(DataError::Code::kTruncated,
                    path + ": expected " + std::to_string(need) +
                        " bytes, file has " + std::to_string(bytes.size()));
  }
  img.pixels.assign(bytes.begin() + 16, bytes.begin() + need);
  return img;
}

std::vector<std::uint8_t> load_idx_labels(const std::string& path) {
  const auto bytes = read_all(path);
  if (bytes.size() < 8) {
    throw DataError(DataError::Code::kTruncated,
                    path + ": header needs 8 bytes, file has " +
                        std::to_string(bytes.size()));
  }
  const std::uint32_t magic = be32(bytes.data());
  if (magic != kLabelsMagic) {
    std::ostringstream msg;
    msg << path << ": label magic mismatch, got 0x" << std::hex << magic;
    throw DataError(DataError::Code::kBadMagic, msg.str());
  }
  const std::size_t count = be32(bytes.data() + 4);
  if (bytes.size() < 8 + count) {
    throw DataError(DataError::Code::kTruncated,
                    path + ": expected " + std::to_string(8 + count) +
                        " bytes, file has " + std::to_string(bytes.size()));
  }
  return std::vector<std::uint8_t>(bytes.begin() + 8, bytes.begin() + 8 + count);
}

EventBatch encode_ttfs(std::span<const std::uint8_t> pixels, double t_enc,
                       int x_max) {
  if (!(t_enc > 0.0)) {
    throw std::invalid_argument("encode_ttfs: t_enc must be > 0");
  }
  if (x_max < 1) throw std::invalid_argument("encode_ttfs: x_max must be >= 1");
  EventBatch batch;
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    const int x = pixels[i];
    if (x == 0) continue;  // dark pixels never fire
    batch.add(static_cast<int>(i), t_enc / x_max * (x_max - x));
  }
  batch.normalize(static_cast<int>(pixels.size()));
  return batch;
}

void Dataset::truncate(int limit) {
  if (limit <= 0 || limit >= size()) return;
  samples.resize(limit);
  labels.resize(limit);
}

void Dataset::validate() const {
  if (samples.size() != labels.size()) {
    throw DataError(DataError::Code::kCountMismatch,
                    "dataset holds " + std::to_string(samples.size()) +
                        " samples but " + std::to_string(labels.size()) +
                        " labels");
  }
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= num_classes) {
      throw DataError(DataError::Code::kIndexRange,
                      "sample " + std::to_string(i) + " has label " +
                          std::to_string(labels[i]) + ", classes=" +
                          std::to_string(num_classes));
    }
    if (!samples[i].is_normalized(input_shape.size())) {
      throw DataError(DataError::Code::kMalformed,
                      "sample " + std::to_string(i) + " is not normalized");
    }
  }
}

Dataset load_idx_dataset(const std::string& images_path,
                         const std::string& labels_path, double t_enc,
                         int num_classes) {
  const RawImages images = load_idx_images(images_path);
  const auto labels = load_idx_labels(labels_path);
  if (static_cast<std::size_t>(images.count) != labels.size()) {
    throw DataError(DataError::Code::kCountMismatch,
                    images_path + " has " + std::to_string(images.count) +
                        " images but " + labels_path + " has " +
                        std::to_string(labels.size()) + " labels");
  }
  Dataset data;
  data.input_shape = {images.rows, images.cols, 1};
  data.num_classes = num_classes;
  data.samples.reserve(images.count);
  data.labels.reserve(images.count);
  for (int i = 0; i < images.count; ++i) {
    data.samples.push_back(encode_ttfs(images.image(i), t_enc));
    data.labels.push_back(labels[i]);
  }
  data.validate();
  return data;
}

Dataset load_event_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(DataError::Code::kIo, "cannot open " + path);
  std::string line;
  int line_no = 0;
  auto malformed = [&](const std::string& why) {
    return DataError(DataError::Code::kMalformed,
                     path + ":" + std::to_string(line_no) + ": " + why);
  };
  if (!std::getline(in, line)) throw malformed("empty file");
  ++line_no;
  int input_size = 0, classes = 0;
  {
    std::istringstream hdr(line);
    std::string tag, version, kv;
    hdr >> tag >> version;
    if (tag != "#events" || version != "v1") {
      throw malformed("header must start with '#events v1'");
    }
    while (hdr >> kv) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw malformed("bad header token " + kv);
      const std::string key = kv.substr(0, eq);
      const std::string val = kv.substr(eq + 1);
      try {
        if (key == "input_size") {
          input_size = std::stoi(val);
        } else if (key == "classes") {
          classes = std::stoi(val);
        } else {
          throw malformed("unknown header key " + key);
        }
      } catch (const DataError&) {
        throw;
      } catch (const std::exception&) {
        throw malformed("bad header value " + kv);
      }
    }
    if (input_size < 1 || classes < 1) {
      throw malformed("header must set input_size and classes");
    }
  }

  Dataset data;
  data.input_shape = {1, 1, input_size};
  data.num_classes = classes;
  bool in_sample = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) {
      in_sample = false;
      continue;
    }
    std::istringstream ls(line);
    std::string first;
    ls >> first;
    if (first == "sample") {
      int label;
      if (!(ls >> label)) throw malformed("sample line needs a label");
      if (label < 0 || label >= classes) {
        throw DataError(DataError::Code::kIndexRange,
                        path + ":" + std::to_string(line_no) + ": label " +
                            std::to_string(label) + " outside [0, " +
                            std::to_string(classes) + ")");
      }
      data.samples.emplace_back();
      data.labels.push_back(label);
      in_sample = true;
      continue;
    }
    if (!in_sample) throw malformed("event line before any 'sample' line");
    int unit;
    double t;
    std::istringstream ev(line);
    if (!(ev >> unit >> t)) throw malformed("event line must be '<unit> <time>'");
    if (unit < 0 || unit >= input_size) {
      throw DataError(DataError::Code::kIndexRange,
                      path + ":" + std::to_string(line_no) + ": unit " +
                          std::to_string(unit) + " outside [0, " +
                          std::to_string(input_size) + ")");
    }
    if (!(t >= 0.0) || !std::isfinite(t)) throw malformed("negative or bad time");
    data.samples.back().add(unit, t);
  }
  for (EventBatch& b : data.samples) b.normalize(input_size);
  data.validate();
  return data;
}

void write_event_file(const std::string& path, const Dataset& data) {
  data.validate();
  std::ofstream out(path);
  if (!out) throw DataError(DataError::Code::kIo, "cannot open " + path);
  out << "#events v1 input_size=" << data.input_shape.size()
      << " classes=" << data.num_classes << "\n";
  char buf[64];
  for (int i = 0; i < data.size(); ++i) {
    out << "sample " << data.labels[i] << "\n";
    for (const Event& e : data.samples[i].events) {
      // %.17g keeps the exact double through a write/read round trip.
      std::snprintf(buf, sizeof buf, "%.17g", e.time);
      out << e.neuron << " " << buf << "\n";
    }
    out << "\n";
  }
  if (!out) throw DataError(DataError::Code::kIo, "write failed for " + path);
}

EventBatch jitter_events(const EventBatch& batch, double sigma,
                         std::uint64_t seed, int input_size) {
  if (sigma < 0.0) throw std::invalid_argument("jitter_events: sigma must be >= 0");
  if (sigma == 0.0) return batch;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  EventBatch out;
  out.events.reserve(batch.size());
  for (const Event& e : batch.events) {
    out.add(e.neuron, std::max(0.0, e.time + noise(rng)));
  }
  out.normalize(input_size);
  return out;
}

std::uint64_t jitter_seed(std::uint64_t base_seed, int epoch, int sample_index) {
  // splitmix64 finalizer over the three inputs; stable across platforms.
  auto mix = [](std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  };
  std::uint64_t h = mix(base_seed);
  h = mix(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(epoch)));
  h = mix(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(sample_index)));
  return h;
}

}  // namespace evspike
