#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "evspike/backward.hpp"
#include "evspike/loss.hpp"
#include "evspike/network.hpp"

namespace evspike {

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

enum class Optimizer { kAdam, kSgd };

// Every tunable of a run, in declaration-friendly form. Values arrive from a
// preset, a JSON config file, and key=value command-line overrides, in that
// order; unknown keys are rejected by name. docs/FORMATS.md lists the keys.
struct RunConfig {
  // Model.
  std::string preset;
  std::string arch = "800-10";
  std::string input_shape = "784";
  double tau_s = 0.13;
  std::vector<double> thresholds = {1.0};  // per spiking layer, or one value broadcast
  std::vector<int> max_spikes = {30};      // same broadcast rule
  double t_sim = 0.2;
  double t_enc = 0.1;

  // Objective.
  std::string loss = "spike_count";  // or "ttfs_softmax"
  int count_true = 15;
  int count_false = 3;
  double softmax_tau = 0.0;    // 0 -> output layer tau
  double no_spike_time = 0.0;  // 0 -> 2 * t_sim
  std::string count_error_convention = "target_minus_count";

  // Initialization and optimization.
  std::string init = "uniform(-1,1)";
  std::uint64_t seed = 42;
  std::string optimizer = "adam";
  double lr = 0.003;
  double lr_decay = 1.0;
  int lr_decay_every = 1;
  double lr_min = 0.0;
  int batch_size = 50;
  int epochs = 10;
  double w_clip = 0.0;          // 0 disables
  double grad_clip_norm = 0.0;  // 0 disables
  int quantize_bits = 0;        // 0 disables
  std::string quantize_when = "eval";  // or "train"
  double jitter_sigma = 0.0;
  int workers = 1;

  // Data.
  std::string dataset = "idx";  // or "events"
  std::string train_images, train_labels, test_images, test_labels;
  std::string train_events, test_events;
  int train_limit = 0;  // 0 = no cap
  int test_limit = 0;
};

std::vector<std::string> preset_names();
RunConfig preset_config(const std::string& name);

// Sets one field by key from its string form; throws ConfigError naming the
// key when it is unknown or the value does not parse.
void apply_override(RunConfig& cfg, const std::string& key,
                    const std::string& value);
void apply_override(RunConfig& cfg, const std::string& key_equals_value);

// Reads a flat JSON object of config keys. A "preset" entry is applied first,
// then the remaining keys in sorted order.
RunConfig load_config_json(const std::string& path);

// Canonical "key=value" dump (sorted keys, full double precision) and the
// FNV-1a 64-bit hash over it. The hash labels every CSV this run writes; it
// skips the `workers` key because results never depend on the worker count.
std::string config_dump(const RunConfig& cfg);
std::uint64_t config_hash(const RunConfig& cfg);
std::string config_hash_hex(const RunConfig& cfg);

// Typed pieces assembled from a RunConfig.
NetworkSpec build_network(const RunConfig& cfg);  // weights initialized from cfg.seed
TargetSpec build_target_spec(const RunConfig& cfg);
ErrorConvention build_convention(const RunConfig& cfg);
Optimizer build_optimizer(const RunConfig& cfg);
UniformInit parse_init(const std::string& text);

}  // namespace evspike
