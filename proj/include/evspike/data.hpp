#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "evspike/events.hpp"
#include "evspike/network.hpp"

namespace evspike {

// Dataset/file problems, each with a distinct code so callers and tests can
// tell a wrong magic from a short read from a mismatched pair.
class DataError : public std::runtime_error {
 public:
  enum class Code {
    kBadMagic,
    kTruncated,
    kCountMismatch,
    kMalformed,
    kIndexRange,
    kIo,
  };

  DataError(Code code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

// Raw image tensor from a big-endian IDX file (magic 0x00000803).
struct RawImages {
  int count = 0;
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> pixels;  // count * rows * cols, row-major

  std::span<const std::uint8_t> image(int i) const;
};

RawImages load_idx_images(const std::string& path);

// Label vector from a big-endian IDX file (magic 0x00000801).
std::vector<std::uint8_t> load_idx_labels(const std::string& path);

// Intensity-to-latency encoding: a pixel of value x fires once at
// t = (t_enc / x_max) * (x_max - x); zero-valued pixels stay silent.
EventBatch encode_ttfs(std::span<const std::uint8_t> pixels, double t_enc,
                       int x_max = 255);

// A labelled event-coded dataset ready for training or evaluation.
struct Dataset {
  Shape input_shape;
  int num_classes = 0;
  std::vector<EventBatch> samples;
  std::vector<int> labels;

  int size() const { return static_cast<int>(samples.size()); }
  void truncate(int limit);
  void validate() const;
};

// Loads an IDX image/label pair and latency-encodes every image. Throws
// DataError::kCountMismatch when the two files disagree on the sample count.
Dataset load_idx_dataset(const std::string& images_path,
                         const std::string& labels_path, double t_enc,
                         int num_classes = 10);

// Text event-file format:
//   #events v1 input_size=<N> classes=<C>
//   sample <label>
//   <unit_index> <time_seconds>   (one per line, any order)
//   <blank line ends the sample>
Dataset load_event_file(const std::string& path);
void write_event_file(const std::string& path, const Dataset& data);

// Adds zero-mean Gaussian noise of deviation `sigma` to every spike time,
// clamps at zero, and restores canonical order. Deterministic in `seed`.
EventBatch jitter_events(const EventBatch& batch, double sigma,
                         std::uint64_t seed, int input_size);

// Stable per-sample noise stream so results do not depend on worker count or
// sample visit order.
std::uint64_t jitter_seed(std::uint64_t base_seed, int epoch, int sample_index);

}  // namespace evspike
