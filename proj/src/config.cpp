#include "evspike/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <map>

#include "json.hpp"

namespace evspike {

namespace {

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': bad number '" + v + "'");
  }
}

int parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const int i = std::stoi(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': bad integer '" + v + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const std::uint64_t i = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': bad integer '" + v + "'");
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

std::vector<double> parse_double_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const std::string& part : split(v, ',')) out.push_back(parse_double(key, part));
  if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
  return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  for (const std::string& part : split(v, ',')) out.push_back(parse_int(key, part));
  if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
  return out;
}

std::string fmt_double(double d) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", d);
  return buf;
}

std::string fmt_double_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += fmt_double(v[i]);
  }
  return s;
}

std::string fmt_int_list(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s;
}

struct KeyDef {
  void (*set)(RunConfig&, const std::string&, const std::string&);
  std::string (*get)(const RunConfig&);
};

const std::map<std::string, KeyDef>& key_table() {
  static const std::map<std::string, KeyDef> table = {
      {"preset",
       {[](RunConfig& c, const std::string&, const std::string& v) {
          c = preset_config(v);
        },
        [](const RunConfig& c) { return c.preset; }}},
      {"arch",
       {[](RunConfig& c, const std::string&, const std::string& v) { c.arch = v; },
        [](const RunConfig& c) { return c.arch; }}},
      {"input_shape",
       {[](RunConfig& c, const std::string&, const std::string& v) { c.input_shape = v; },
        [](const RunConfig& c) { return c.input_shape; }}},
      {"tau_s",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.tau_s = parse_double(k, v);
        },
        [](const RunConfig& c) { return fmt_double(c.tau_s); }}},
      {"thresholds",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.thresholds = parse_double_list(k, v);
        },
        [](const RunConfig& c) { return fmt_double_list(c.thresholds); }}},
      {"max_spikes",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.max_spikes = parse_int_list(k, v);
        },
        [](const RunConfig& c) { return fmt_int_list(c.max_spikes); }}},
      {"t_sim",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.t_sim = parse_double(k, v);
        },
        [](const RunConfig& c) { return fmt_double(c.t_sim); }}},
      {"t_enc",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.t_enc = parse_double(k, v);
        },
        [](const RunConfig& c) { return fmt_double(c.t_enc); }}},
      {"loss",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          if (v != "spike_count" && v != "ttfs_softmax") {
            throw ConfigError("config key '" + k + "': unknown loss '" + v + "'");
          }
          c.loss = v;
        },
        [](const RunConfig& c) { return c.loss; }}},
      {"count_true",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.count_true = parse_int(k, v);
        },
        [](const RunConfig& c) { return std::to_string(c.count_true); }}},
      {"count_false",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.count_false = parse_int(k, v);
        },
        [](const RunConfig& c) { return std::to_string(c.count_false); }}},
      {"softmax_tau",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.softmax_tau = parse_double(k, v);
        },
        [](const RunConfig& c) { return fmt_double(c.softmax_tau); }}},
      {"no_spike_time",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.no_spike_time = parse_double(k, v);
        },
        [](const RunConfig& c) { return fmt_double(c.no_spike_time); }}},
      {"count_error_convention",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          if (v != "target_minus_count" && v != "count_minus_target") {
            throw ConfigError("config key '" + k + "': unknown convention '" + v + "'");
          }
          c.count_error_convention = v;
        },
        [](const RunConfig& c) { return c.count_error_convention; }}},
      {"init",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          parse_init(v);  // validates
          c.init = v;
          (void)k;
        },
        [](const RunConfig& c) { return c.init; }}},
      {"seed",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.seed = parse_u64(k, v);
        },
        [](const RunConfig& c) { return std::to_string(c.seed); }}},
      {"optimizer",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          if (v != "adam" && v != "sgd") {
            throw ConfigError("config key '" + k + "': unknown optimizer '" + v + "'");
          }
          c.optimizer = v;
        },
        [](const RunConfig& c) { return c.optimizer; }}},
      {"lr",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.lr = parse_double(k, v);
        },
        [](const RunConfig& c) { return fmt_double(c.lr); }}},
      {"lr_decay",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.lr_decay = parse_double(k, v);
        },
        [](const RunConfig& c) { return fmt_double(c.lr_decay); }}},
      {"lr_decay_every",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.lr_decay_every = parse_int(k, v);
        },
        [](const RunConfig& c) { return std::to_string(c.lr_decay_every); }}},
      {"lr_min",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.lr_min = parse_double(k, v);
        },
        [](const RunConfig& c) { return fmt_double(c.lr_min); }}},
      {"batch_size",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.batch_size = parse_int(k, v);
        },
        [](const RunConfig& c) { return std::to_string(c.batch_size); }}},
      {"epochs",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.epochs = parse_int(k, v);
        },
        [](const RunConfig& c) { return std::to_string(c.epochs); }}},
      {"w_clip",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.w_clip = parse_double(k, v);
        },
        [](const RunConfig& c) { return fmt_double(c.w_clip); }}},
      {"grad_clip_norm",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.grad_clip_norm = parse_double(k, v);
        },
        [](const RunConfig& c) { return fmt_double(c.grad_clip_norm); }}},
      {"quantize_bits",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.quantize_bits = parse_int(k, v);
        },
        [](const RunConfig& c) { return std::to_string(c.quantize_bits); }}},
      {"quantize_when",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          if (v != "eval" && v != "train") {
            throw ConfigError("config key '" + k + "': expected 'eval' or 'train', got '" + v + "'");
          }
          c.quantize_when = v;
        },
        [](const RunConfig& c) { return c.quantize_when; }}},
      {"jitter_sigma",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.jitter_sigma = parse_double(k, v);
        },
        [](const RunConfig& c) { return fmt_double(c.jitter_sigma); }}},
      {"workers",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.workers = parse_int(k, v);
        },
        [](const RunConfig& c) { return std::to_string(c.workers); }}},
      {"dataset",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          if (v != "idx" && v != "events") {
            throw ConfigError("config key '" + k + "': expected 'idx' or 'events', got '" + v + "'");
          }
          c.dataset = v;
        },
        [](const RunConfig& c) { return c.dataset; }}},
      {"train_images",
       {[](RunConfig& c, const std::string&, const std::string& v) { c.train_images = v; },
        [](const RunConfig& c) { return c.train_images; }}},
      {"train_labels",
       {[](RunConfig& c, const std::string&, const std::string& v) { c.train_labels = v; },
        [](const RunConfig& c) { return c.train_labels; }}},
      {"test_images",
       {[](RunConfig& c, const std::string&, const std::string& v) { c.test_images = v; },
        [](const RunConfig& c) { return c.test_images; }}},
      {"test_labels",
       {[](RunConfig& c, const std::string&, const std::string& v) { c.test_labels = v; },
        [](const RunConfig& c) { return c.test_labels; }}},
      {"train_events",
       {[](RunConfig& c, const std::string&, const std::string& v) { c.train_events = v; },
        [](const RunConfig& c) { return c.train_events; }}},
      {"test_events",
       {[](RunConfig& c, const std::string&, const std::string& v) { c.test_events = v; },
        [](const RunConfig& c) { return c.test_events; }}},
      {"train_limit",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.train_limit = parse_int(k, v);
        },
        [](const RunConfig& c) { return std::to_string(c.train_limit); }}},
      {"test_limit",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.test_limit = parse_int(k, v);
        },
        [](const RunConfig& c) { return std::to_string(c.test_limit); }}},
  };
  return table;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"mnist-800-10-unconstrained", "mnist-800-10-ttfs", "mnist-conv-net3",
          "shd-128-20"};
}

RunConfig preset_config(const std::string& name) {
  RunConfig c;
  c.preset = name;
  if (name == "mnist-800-10-unconstrained") {
    c.arch = "800-10";
    c.input_shape = "784";
    c.tau_s = 0.13;
    c.thresholds = {0.3, 0.3};
    c.max_spikes = {30, 30};
    c.t_sim = 0.2;
    c.t_enc = 0.1;
    c.loss = "spike_count";
    c.count_true = 15;
    c.count_false = 3;
    c.init = "uniform(-1,1)";
    c.optimizer = "adam";
    c.lr = 0.003;
    c.batch_size = 50;
    c.epochs = 10;
  } else if (name == "mnist-800-10-ttfs") {
    c.arch = "800-10";
    c.input_shape = "784";
    c.tau_s = 0.13;
    c.thresholds = {2.0, 1.0};
    c.max_spikes = {1, 1};
    c.t_sim = 0.2;
    c.t_enc = 0.1;
    c.loss = "ttfs_softmax";
    c.softmax_tau = 0.005;
    c.init = "uniform(0,1)";
    c.optimizer = "adam";
    c.lr = 0.003;
    c.batch_size = 50;
    c.epochs = 10;
  } else if (name == "mnist-conv-net3") {
    c.arch = "15C5-P2-40C5-P2-300-10";
    c.input_shape = "28x28x1";
    c.tau_s = 0.13;
    c.thresholds = {0.3, 0.3, 0.3, 0.2};
    c.max_spikes = {1, 3, 10, 30};
    c.t_sim = 0.2;
    c.t_enc = 0.1;
    c.loss = "spike_count";
    c.count_true = 30;
    c.count_false = 3;
    c.init = "uniform(-1,1)";
    c.optimizer = "adam";
    c.lr = 0.003;
    c.lr_decay = 0.5;
    c.lr_decay_every = 10;
    c.lr_min = 1e-4;
    c.batch_size = 20;
    c.epochs = 10;
  } else if (name == "shd-128-20") {
    c.arch = "128-20";
    c.input_shape = "700";
    c.tau_s = 0.10;
    c.thresholds = {1.0, 1.0};
    c.max_spikes = {30, 30};
    c.t_sim = 1.0;
    c.t_enc = 0.1;
    c.loss = "spike_count";
    c.count_true = 15;
    c.count_false = 3;
    c.init = "uniform(-1,1)";
    c.optimizer = "adam";
    c.lr = 0.001;
    c.batch_size = 50;
    c.epochs = 10;
    c.dataset = "events";
  } else {
    std::string known;
    for (const std::string& n : preset_names()) known += " " + n;
    throw ConfigError("unknown preset '" + name + "'; known presets:" + known);
  }
  return c;
}

void apply_override(RunConfig& cfg, const std::string& key,
                    const std::string& value) {
  const auto it = key_table().find(key);
  if (it == key_table().end()) {
    throw ConfigError("unknown config key '" + key + "'");
  }
  it->second.set(cfg, key, value);
}

void apply_override(RunConfig& cfg, const std::string& key_equals_value) {
  const auto eq = key_equals_value.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("override must be key=value, got '" + key_equals_value + "'");
  }
  apply_override(cfg, key_equals_value.substr(0, eq),
                 key_equals_value.substr(eq + 1));
}

RunConfig load_config_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("config file " + path + ": " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config file " + path + " must hold a JSON object");

  auto to_string_value = [&](const nlohmann::json& v) -> std::string {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number() || v.is_boolean()) return v.dump();
    if (v.is_array()) {
      std::string s;
      for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ',';
        s += v[i].is_string() ? v[i].get<std::string>() : v[i].dump();
      }
      return s;
    }
    throw ConfigError("config file " + path + ": unsupported value type");
  };

  RunConfig cfg;
  if (j.contains("preset")) {
    cfg = preset_config(to_string_value(j.at("preset")));
  }
  std::vector<std::string> keys;
  for (auto it = j.begin(); it != j.end(); ++it) keys.push_back(it.key());
  std::sort(keys.begin(), keys.end());
  for (const std::string& k : keys) {
    if (k == "preset") continue;
    apply_override(cfg, k, to_string_value(j.at(k)));
  }
  return cfg;
}

std::string config_dump(const RunConfig& cfg) {
  std::string out;
  for (const auto& [name, def] : key_table()) {
    out += name;
    out += '=';
    out += def.get(cfg);
    out += '\n';
  }
  return out;
}

std::uint64_t config_hash(const RunConfig& cfg) {
  // The worker count is skipped: results are independent of it by design, so
  // runs that differ only in parallelism carry the same label.
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a 64
  for (const auto& [name, def] : key_table()) {
    if (name == "workers") continue;
    const std::string line = name + "=" + def.get(cfg) + "\n";
    for (unsigned char ch : line) {
      h ^= ch;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

std::string config_hash_hex(const RunConfig& cfg) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(config_hash(cfg)));
  return buf;
}

UniformInit parse_init(const std::string& text) {
  // Accepted form: uniform(a,b) with a < b.
  const std::string prefix = "uniform(";
  if (text.rfind(prefix, 0) != 0 || text.back() != ')') {
    throw ConfigError("init must look like uniform(a,b), got '" + text + "'");
  }
  const std::string inner = text.substr(prefix.size(), text.size() - prefix.size() - 1);
  const auto parts = split(inner, ',');
  if (parts.size() != 2) {
    throw ConfigError("init must look like uniform(a,b), got '" + text + "'");
  }
  UniformInit init;
  init.lo = parse_double("init", parts[0]);
  init.hi = parse_double("init", parts[1]);
  if (!(init.lo < init.hi)) {
    throw ConfigError("init range must satisfy a < b, got '" + text + "'");
  }
  return init;
}

namespace {

Shape parse_input_shape(const std::string& text) {
  const auto parts = split(text, 'x');
  try {
    if (parts.size() == 1) {
      return {1, 1, parse_int("input_shape", parts[0])};
    }
    if (parts.size() == 3) {
      return {parse_int("input_shape", parts[0]), parse_int("input_shape", parts[1]),
              parse_int("input_shape", parts[2])};
    }
  } catch (const ConfigError&) {
    throw;
  }
  throw ConfigError("input_shape must be N or HxWxC, got '" + text + "'");
}

struct ArchToken {
  enum class Kind { kDense, kConv, kPool } kind;
  int a = 0;  // dense size / conv filters / pool window
  int b = 0;  // conv kernel
};

std::vector<ArchToken> parse_arch(const std::string& text) {
  std::vector<ArchToken> tokens;
  for (const std::string& tok : split(text, '-')) {
    if (tok.empty()) throw ConfigError("arch has an empty token: '" + text + "'");
    if (tok[0] == 'P') {
      tokens.push_back({ArchToken::Kind::kPool, parse_int("arch", tok.substr(1)), 0});
      continue;
    }
    const auto cpos = tok.find('C');
    if (cpos != std::string::npos) {
      tokens.push_back({ArchToken::Kind::kConv, parse_int("arch", tok.substr(0, cpos)),
                        parse_int("arch", tok.substr(cpos + 1))});
      continue;
    }
    tokens.push_back({ArchToken::Kind::kDense, parse_int("arch", tok), 0});
  }
  if (tokens.empty()) throw ConfigError("arch is empty");
  return tokens;
}

template <typename T>
T broadcast_get(const std::vector<T>& v, std::size_t i, std::size_t total,
                const char* key) {
  if (v.size() == 1) return v[0];
  if (v.size() != total) {
    throw ConfigError(std::string("config key '") + key + "' needs 1 or " +
                      std::to_string(total) + " values, got " +
                      std::to_string(v.size()));
  }
  return v[i];
}

}  // namespace

NetworkSpec build_network(const RunConfig& cfg) {
  if (!(cfg.tau_s > 0.0)) throw ConfigError("tau_s must be > 0");
  const std::vector<ArchToken> tokens = parse_arch(cfg.arch);
  std::size_t spiking_total = 0;
  for (const ArchToken& t : tokens) {
    if (t.kind != ArchToken::Kind::kPool) ++spiking_total;
  }
  if (spiking_total == 0) throw ConfigError("arch needs at least one weighted layer");

  const UniformInit init = parse_init(cfg.init);
  NetworkSpec net;
  net.input_shape = parse_input_shape(cfg.input_shape);
  Shape cur = net.input_shape;
  std::size_t spiking_idx = 0;
  try {
    for (const ArchToken& t : tokens) {
      switch (t.kind) {
        case ArchToken::Kind::kDense: {
          const NeuronParams p(
              cfg.tau_s,
              broadcast_get(cfg.thresholds, spiking_idx, spiking_total, "thresholds"),
              broadcast_get(cfg.max_spikes, spiking_idx, spiking_total, "max_spikes"));
          net.layers.push_back(make_dense(cur.size(), t.a, p, init));
          ++spiking_idx;
          break;
        }
        case ArchToken::Kind::kConv: {
          const NeuronParams p(
              cfg.tau_s,
              broadcast_get(cfg.thresholds, spiking_idx, spiking_total, "thresholds"),
              broadcast_get(cfg.max_spikes, spiking_idx, spiking_total, "max_spikes"));
          net.layers.push_back(make_conv2d(cur, t.a, t.b, t.b, p, init));
          ++spiking_idx;
          break;
        }
        case ArchToken::Kind::kPool:
          net.layers.push_back(make_pool2d(cur, t.a));
          break;
      }
      cur = net.layers.back().out_shape;
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("arch '") + cfg.arch + "': " + e.what());
  }
  init_network(net, cfg.seed);
  try {
    net.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("arch '") + cfg.arch + "': " + e.what());
  }
  return net;
}

TargetSpec build_target_spec(const RunConfig& cfg) {
  TargetSpec spec;
  spec.mode = cfg.loss == "ttfs_softmax" ? LossMode::kTtfsSoftmax : LossMode::kSpikeCount;
  spec.count_true = cfg.count_true;
  spec.count_false = cfg.count_false;
  spec.softmax_tau = cfg.softmax_tau;
  spec.no_spike_time = cfg.no_spike_time;
  try {
    return spec.resolved(2.0 * cfg.tau_s, cfg.t_sim);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

ErrorConvention build_convention(const RunConfig& cfg) {
  return cfg.count_error_convention == "count_minus_target"
             ? ErrorConvention::kCountMinusTarget
             : ErrorConvention::kTargetMinusCount;
}

Optimizer build_optimizer(const RunConfig& cfg) {
  return cfg.optimizer == "sgd" ? Optimizer::kSgd : Optimizer::kAdam;
}

}  // namespace evspike
