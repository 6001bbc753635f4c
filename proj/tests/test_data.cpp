#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>

#include "evspike/data.hpp"

using namespace evspike;

namespace {

std::filesystem::path test_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "evspike_data_test";
  std::filesystem::create_directories(dir);
  return dir;
}

void put_be32(std::ofstream& out, std::uint32_t v) {
  const unsigned char bytes[4] = {
      static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
      static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
  out.write(reinterpret_cast<const char*>(bytes), 4);
}

std::string write_images(const std::string& name, int count, int rows, int cols,
                         const std::vector<std::uint8_t>& pixels,
                         std::uint32_t magic = 0x803) {
  const auto path = test_dir() / name;
  std::ofstream out(path, std::ios::binary);
  put_be32(out, magic);
  put_be32(out, count);
  put_be32(out, rows);
  put_be32(out, cols);
  out.write(reinterpret_cast<const char*>(pixels.data()),
            static_cast<std::streamsize>(pixels.size()));
  return path.string();
}

std::string write_labels(const std::string& name,
                         const std::vector<std::uint8_t>& labels,
                         std::uint32_t magic = 0x801) {
  const auto path = test_dir() / name;
  std::ofstream out(path, std::ios::binary);
  put_be32(out, magic);
  put_be32(out, static_cast<std::uint32_t>(labels.size()));
  out.write(reinterpret_cast<const char*>(labels.data()),
            static_cast<std::streamsize>(labels.size()));
  return path.string();
}

std::string write_text(const std::string& name, const std::string& body) {
  const auto path = test_dir() / name;
  std::ofstream out(path);
  out << body;
  return path.string();
}

DataError::Code code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const DataError& e) {
    return e.code();
  }
  FAIL("expected a DataError");
  return DataError::Code::kIo;
}

}  // namespace

TEST_CASE("idx image loading") {
  std::vector<std::uint8_t> pixels(12);
  for (int i = 0; i < 12; ++i) pixels[i] = static_cast<std::uint8_t>(i);
  const auto path = write_images("imgs.idx", 2, 2, 3, pixels);
  const RawImages img = load_idx_images(path);
  CHECK(img.count == 2);
  CHECK(img.rows == 2);
  CHECK(img.cols == 3);
  REQUIRE(img.pixels.size() == 12);
  const auto second = img.image(1);
  REQUIRE(second.size() == 6);
  CHECK(second[0] == 6);
  CHECK(second[5] == 11);
}

TEST_CASE("idx label loading") {
  const auto path = write_labels("labels.idx", {7, 1, 9});
  const auto labels = load_idx_labels(path);
  CHECK(labels == std::vector<std::uint8_t>{7, 1, 9});
}

TEST_CASE("idx error codes") {
  const auto bad_magic =
      write_images("bad_magic.idx", 1, 1, 1, {5}, 0x804);
  CHECK(code_of([&] { load_idx_images(bad_magic); }) ==
        DataError::Code::kBadMagic);

  const auto swapped =
      write_labels("swapped.idx", {1}, 0x803);  // image magic on a label file
  CHECK(code_of([&] { load_idx_labels(swapped); }) ==
        DataError::Code::kBadMagic);

  const auto short_pixels = write_images("short.idx", 4, 2, 2, {1, 2, 3});
  CHECK(code_of([&] { load_idx_images(short_pixels); }) ==
        DataError::Code::kTruncated);

  const auto stub = write_text("stub.idx", "xy");
  CHECK(code_of([&] { load_idx_images(stub); }) == DataError::Code::kTruncated);

  CHECK(code_of([&] { load_idx_images((test_dir() / "absent.idx").string()); }) ==
        DataError::Code::kIo);
}

TEST_CASE("latency encoding maps bright pixels to early spikes") {
  const std::vector<std::uint8_t> pixels{0, 255, 128, 64};
  const EventBatch batch = encode_ttfs(pixels, 0.1);
  REQUIRE(batch.size() == 3);  // the dark pixel stays silent
  CHECK(batch.events[0].neuron == 1);
  CHECK(batch.events[0].time == 0.0);
  CHECK(batch.events[1].neuron == 2);
  CHECK(batch.events[1].time == 0.1 / 255 * 127);
  CHECK(batch.events[2].neuron == 3);
  CHECK(batch.events[2].time == 0.1 / 255 * 191);
  CHECK(batch.is_normalized(4));
  CHECK_THROWS_AS(encode_ttfs(pixels, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(encode_ttfs(pixels, 0.1, 0), std::invalid_argument);
}

TEST_CASE("idx dataset assembly") {
  const std::vector<std::uint8_t> pixels{
      10, 0, 0, 200,    //
      0,  0, 0, 0,      // an all-dark image: zero events
      255, 255, 1, 128  //
  };
  const auto imgs = write_images("ds_imgs.idx", 3, 2, 2, pixels);
  const auto labels = write_labels("ds_labels.idx", {2, 0, 9});
  const Dataset data = load_idx_dataset(imgs, labels, 0.1);
  CHECK(data.input_shape == Shape{2, 2, 1});
  CHECK(data.num_classes == 10);
  REQUIRE(data.size() == 3);
  CHECK(data.labels == std::vector<int>{2, 0, 9});
  CHECK(data.samples[0].size() == 2);
  CHECK(data.samples[1].size() == 0);
  CHECK(data.samples[2].size() == 4);

  const auto two_labels = write_labels("ds_two.idx", {1, 2});
  CHECK(code_of([&] { load_idx_dataset(imgs, two_labels, 0.1); }) ==
        DataError::Code::kCountMismatch);
}

TEST_CASE("dataset truncation") {
  Dataset data;
  data.input_shape = {1, 1, 2};
  data.num_classes = 2;
  for (int i = 0; i < 5; ++i) {
    data.samples.emplace_back();
    data.labels.push_back(i % 2);
  }
  data.truncate(0);  // zero means keep everything
  CHECK(data.size() == 5);
  data.truncate(100);
  CHECK(data.size() == 5);
  data.truncate(2);
  CHECK(data.size() == 2);
  CHECK(data.labels == std::vector<int>{0, 1});
}

TEST_CASE("dataset validation") {
  Dataset data;
  data.input_shape = {1, 1, 3};
  data.num_classes = 2;
  data.samples.emplace_back();
  data.samples.back().add(0, 0.01);
  data.samples.back().normalize(3);
  data.labels.push_back(5);  // out of range
  CHECK(code_of([&] { data.validate(); }) == DataError::Code::kIndexRange);
  data.labels[0] = 1;
  data.validate();
  data.labels.push_back(0);  // more labels than samples
  CHECK(code_of([&] { data.validate(); }) == DataError::Code::kCountMismatch);
}

TEST_CASE("event file round trip preserves exact times") {
  Dataset data;
  data.input_shape = {1, 1, 4};
  data.num_classes = 3;
  data.samples.emplace_back();
  data.samples.back().add(0, 0.1);
  data.samples.back().add(2, 1.0 / 3.0);
  data.samples.back().add(3, 0.12345678901234567);
  data.samples.back().normalize(4);
  data.labels.push_back(2);
  data.samples.emplace_back();  // an empty sample round-trips too
  data.labels.push_back(0);
  data.samples.emplace_back();
  data.samples.back().add(1, 1e-17);
  data.samples.back().normalize(4);
  data.labels.push_back(1);

  const auto path = (test_dir() / "round.events").string();
  write_event_file(path, data);
  const Dataset back = load_event_file(path);
  CHECK(back.input_shape.size() == 4);
  CHECK(back.num_classes == 3);
  REQUIRE(back.size() == 3);
  CHECK(back.labels == data.labels);
  for (int i = 0; i < 3; ++i) {
    REQUIRE(back.samples[i].size() == data.samples[i].size());
    for (std::size_t e = 0; e < data.samples[i].events.size(); ++e) {
      CHECK(back.samples[i].events[e].neuron == data.samples[i].events[e].neuron);
      CHECK(back.samples[i].events[e].time == data.samples[i].events[e].time);
    }
  }
}

TEST_CASE("event file error reporting") {
  const auto no_header = write_text("eh1.events", "sample 0\n0 0.1\n");
  CHECK(code_of([&] { load_event_file(no_header); }) ==
        DataError::Code::kMalformed);

  const auto bad_version =
      write_text("eh2.events", "#events v2 input_size=3 classes=2\n");
  CHECK(code_of([&] { load_event_file(bad_version); }) ==
        DataError::Code::kMalformed);

  const auto stray_event = write_text(
      "eh3.events", "#events v1 input_size=3 classes=2\n0 0.1\n");
  CHECK(code_of([&] { load_event_file(stray_event); }) ==
        DataError::Code::kMalformed);

  const auto bad_label = write_text(
      "eh4.events", "#events v1 input_size=3 classes=2\nsample 2\n");
  CHECK(code_of([&] { load_event_file(bad_label); }) ==
        DataError::Code::kIndexRange);

  const auto bad_unit = write_text(
      "eh5.events", "#events v1 input_size=3 classes=2\nsample 0\n3 0.1\n");
  CHECK(code_of([&] { load_event_file(bad_unit); }) ==
        DataError::Code::kIndexRange);

  const auto negative_time = write_text(
      "eh6.events", "#events v1 input_size=3 classes=2\nsample 0\n1 -0.5\n");
  CHECK(code_of([&] { load_event_file(negative_time); }) ==
        DataError::Code::kMalformed);

  // Errors carry the line number.
  try {
    load_event_file(negative_time);
    FAIL("expected a DataError");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find(":3:") != std::string::npos);
  }

  CHECK(code_of([&] {
          load_event_file((test_dir() / "absent.events").string());
        }) == DataError::Code::kIo);
}

TEST_CASE("spike-time jitter") {
  EventBatch batch;
  batch.add(0, 0.001);
  batch.add(1, 0.05);
  batch.add(2, 0.1);
  batch.normalize(3);

  const EventBatch same = jitter_events(batch, 0.0, 99, 3);
  REQUIRE(same.size() == batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    CHECK(same.events[i].time == batch.events[i].time);
  }

  const EventBatch a = jitter_events(batch, 0.01, 7, 3);
  const EventBatch b = jitter_events(batch, 0.01, 7, 3);
  const EventBatch c = jitter_events(batch, 0.01, 8, 3);
  CHECK(a.is_normalized(3));
  REQUIRE(a.size() == 3);
  bool all_equal_ab = true, all_equal_ac = true;
  for (std::size_t i = 0; i < 3; ++i) {
    all_equal_ab &= a.events[i].time == b.events[i].time;
    all_equal_ac &= a.events[i].time == c.events[i].time;
  }
  CHECK(all_equal_ab);        // same seed, same noise
  CHECK_FALSE(all_equal_ac);  // different seed, different noise

  // Large noise keeps every time at or above zero.
  const EventBatch wide = jitter_events(batch, 5.0, 3, 3);
  for (const Event& e : wide.events) CHECK(e.time >= 0.0);

  CHECK_THROWS_AS(jitter_events(batch, -0.1, 0, 3), std::invalid_argument);
}

TEST_CASE("per-sample noise streams are distinct and stable") {
  CHECK(jitter_seed(1, 0, 0) == jitter_seed(1, 0, 0));
  std::set<std::uint64_t> seen;
  for (int base = 0; base < 4; ++base) {
    for (int epoch = 0; epoch < 4; ++epoch) {
      for (int idx = 0; idx < 4; ++idx) {
        seen.insert(jitter_seed(base, epoch, idx));
      }
    }
  }
  CHECK(seen.size() == 64);
}
