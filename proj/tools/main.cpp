// evspike command-line tool: train, eval, sweep, encode.
//
// Every command resolves its configuration from an optional preset or JSON
// file plus --set key=value overrides, prints the resolved config (with its
// hash and seed), and exits 0 on success, 1 on a config error, 2 on a data
// error. Metrics go to stdout and, with --out, to a CSV file.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "evspike/config.hpp"
#include "evspike/csv.hpp"
#include "evspike/data.hpp"
#include "evspike/metrics.hpp"
#include "evspike/model_io.hpp"
#include "evspike/network.hpp"
#include "evspike/optim.hpp"
#include "evspike/trainer.hpp"

namespace {

using namespace evspike;

std::string fmt(double v) { return CsvWriter::format_value(CsvValue{v}); }

// Full-precision text form for feeding a flag value through apply_override.
std::string fmt_cli(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void print_config(const RunConfig& cfg) {
  std::cout << "# config " << config_hash_hex(cfg) << "\n" << config_dump(cfg);
  std::cout.flush();
}

// Shared config plumbing: --preset or --config picks the base, --set edits it.
struct CommonOpts {
  std::string config_path;
  std::string preset;
  std::vector<std::string> sets;
  int workers = 0;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  CLI::Option* file = cmd->add_option("--config", o.config_path,
                                      "JSON config file (flat key/value object)")
                          ->check(CLI::ExistingFile);
  cmd->add_option("--preset", o.preset, "named base configuration")
      ->excludes(file);
  cmd->add_option("--set", o.sets, "config override, key=value (repeatable)");
  cmd->add_option("--workers", o.workers, "worker threads (overrides config)")
      ->check(CLI::PositiveNumber);
}

RunConfig resolve(const CommonOpts& o) {
  RunConfig cfg;
  if (!o.config_path.empty()) {
    cfg = load_config_json(o.config_path);
  } else if (!o.preset.empty()) {
    cfg = preset_config(o.preset);
  }
  for (const std::string& kv : o.sets) apply_override(cfg, kv);
  if (o.workers > 0) apply_override(cfg, "workers", std::to_string(o.workers));
  return cfg;
}

Dataset load_split(const RunConfig& cfg, bool train) {
  const char* side = train ? "train" : "test";
  Dataset data;
  if (cfg.dataset == "idx") {
    const std::string& images = train ? cfg.train_images : cfg.test_images;
    const std::string& labels = train ? cfg.train_labels : cfg.test_labels;
    if (images.empty() || labels.empty()) {
      throw ConfigError(std::string("config keys '") + side + "_images' and '" +
                        side + "_labels' are required for dataset=idx");
    }
    data = load_idx_dataset(images, labels, cfg.t_enc);
  } else {
    const std::string& path = train ? cfg.train_events : cfg.test_events;
    if (path.empty()) {
      throw ConfigError(std::string("config key '") + side +
                        "_events' is required for dataset=events");
    }
    data = load_event_file(path);
  }
  data.truncate(train ? cfg.train_limit : cfg.test_limit);
  return data;
}

void check_compat(const NetworkSpec& net, const Dataset& data,
                  const std::string& what) {
  if (net.input_size() != data.input_shape.size()) {
    throw DataError(DataError::Code::kCountMismatch,
                    what + ": model expects " + std::to_string(net.input_size()) +
                        " input units, dataset provides " +
                        std::to_string(data.input_shape.size()));
  }
  const bool both_spatial =
      (net.input_shape.height > 1 || net.input_shape.width > 1) &&
      (data.input_shape.height > 1 || data.input_shape.width > 1);
  if (both_spatial && !(net.input_shape == data.input_shape)) {
    throw DataError(DataError::Code::kCountMismatch,
                    what + ": model input geometry " + net.input_shape.str() +
                        " does not match dataset geometry " +
                        data.input_shape.str());
  }
  if (net.output_size() != data.num_classes) {
    throw DataError(DataError::Code::kCountMismatch,
                    what + ": model has " + std::to_string(net.output_size()) +
                        " outputs, dataset has " +
                        std::to_string(data.num_classes) + " classes");
  }
}


// --- train ------------------------------------------------------------------

struct TrainOpts {
  CommonOpts common;
  std::string out_dir = ".";
};

int cmd_train(const TrainOpts& opts) {
  const RunConfig cfg = resolve(opts.common);
  print_config(cfg);

  const Dataset train_set = load_split(cfg, true);
  const Dataset test_set = load_split(cfg, false);
  NetworkSpec net = build_network(cfg);
  check_compat(net, train_set, "train set");
  check_compat(net, test_set, "test set");
  const TargetSpec target = build_target_spec(cfg);
  const TrainSettings settings = build_train_settings(cfg);
  std::cout << "train: " << train_set.size() << " train / " << test_set.size()
            << " test samples, arch " << cfg.arch << "\n";

  const auto t0 = std::chrono::steady_clock::now();
  const TrainResult result =
      train(net, train_set, test_set, target, settings, [&](const EpochLog& e) {
        std::cout << "epoch " << e.epoch << "/" << settings.epochs
                  << " lr=" << fmt(e.lr) << " train_loss=" << fmt(e.train_loss)
                  << " train_acc=" << fmt(e.train_accuracy)
                  << " test_acc=" << fmt(e.test_accuracy)
                  << " hidden_spikes=" << fmt(e.mean_hidden_spikes)
                  << " output_spikes=" << fmt(e.mean_output_spikes) << "\n";
        std::cout.flush();
      });
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  std::filesystem::create_directories(opts.out_dir);
  const std::string final_path = opts.out_dir + "/model_final.bin";
  const std::string best_path = opts.out_dir + "/model_best.bin";
  const std::string log_path = opts.out_dir + "/train_log.csv";
  save_model(final_path, result.net);
  save_model(best_path, result.best_net);

  const std::vector<std::string> columns{
      "epoch",         "lr",           "train_loss",        "train_accuracy",
      "test_accuracy", "mean_hidden_spikes", "mean_output_spikes"};
  CsvWriter log(log_path, columns, config_hash_hex(cfg));
  for (const EpochLog& e : result.log) {
    log.row({static_cast<long long>(e.epoch), e.lr, e.train_loss,
             e.train_accuracy, e.test_accuracy, e.mean_hidden_spikes,
             e.mean_output_spikes});
  }

  std::cout << "trained " << settings.epochs << " epochs in " << fmt(seconds)
            << " s\n"
            << "best test_acc=" << fmt(result.best_accuracy) << " at epoch "
            << result.best_epoch << "\n"
            << "wrote " << final_path << ", " << best_path << ", " << log_path
            << "\n";
  return 0;
}

// --- eval -------------------------------------------------------------------

struct EvalOpts {
  CommonOpts common;
  std::string model_path;
  std::string split = "test";
  std::string latency_grid;
  std::string out_path;
  double jitter_sigma = -1.0;  // <0 = keep config value
  double sim_time = 0.0;       // 0 = keep config value
  int limit = -1;              // <0 = keep config value
};

std::vector<double> parse_grid(const std::string& text) {
  double start = 0.0, end = 0.0, step = 0.0;
  const auto c1 = text.find(':');
  const auto c2 = text.find(':', c1 == std::string::npos ? c1 : c1 + 1);
  try {
    if (c1 == std::string::npos || c2 == std::string::npos) throw std::invalid_argument(text);
    start = std::stod(text.substr(0, c1));
    end = std::stod(text.substr(c1 + 1, c2 - c1 - 1));
    step = std::stod(text.substr(c2 + 1));
  } catch (const std::exception&) {
    throw ConfigError("--latency-grid must be start:end:step, got '" + text + "'");
  }
  if (step <= 0.0 || end < start) {
    throw ConfigError("--latency-grid needs step > 0 and end >= start");
  }
  const int n = static_cast<int>(std::llround((end - start) / step));
  std::vector<double> grid;
  grid.reserve(n + 1);
  for (int i = 0; i <= n; ++i) grid.push_back(start + i * step);
  grid.back() = end;  // land exactly on the endpoint
  return grid;
}

int cmd_eval(const EvalOpts& opts) {
  RunConfig cfg = resolve(opts.common);
  if (opts.jitter_sigma >= 0.0) {
    apply_override(cfg, "jitter_sigma", fmt_cli(opts.jitter_sigma));
  }
  if (opts.sim_time > 0.0) apply_override(cfg, "t_sim", fmt_cli(opts.sim_time));
  if (opts.limit >= 0) {
    apply_override(cfg, opts.split == "train" ? "train_limit" : "test_limit",
                   std::to_string(opts.limit));
  }
  print_config(cfg);

  const NetworkSpec net = load_model(opts.model_path);
  const Dataset data = load_split(cfg, opts.split == "train");
  check_compat(net, data, opts.split + " set");
  const TargetSpec target = build_target_spec(cfg);

  EvalOptions eval_opts;
  eval_opts.t_sim = cfg.t_sim;
  eval_opts.workers = cfg.workers;
  eval_opts.jitter_sigma = cfg.jitter_sigma;
  eval_opts.jitter_seed = cfg.seed;
  eval_opts.quantize_bits = cfg.quantize_bits;

  const EvalResult r = evaluate(net, data, target, eval_opts);
  std::cout << "samples=" << r.samples << "\n"
            << "accuracy=" << fmt(r.accuracy) << "\n"
            << "mean_loss=" << fmt(r.mean_loss) << "\n"
            << "mean_hidden_spikes=" << fmt(r.mean_hidden_spikes) << "\n"
            << "mean_output_spikes=" << fmt(r.mean_output_spikes) << "\n"
            << "mean_first_output_time=" << fmt(r.mean_first_output_time)
            << "\n";
  std::cout << "mean_layer_spikes=";
  for (std::size_t l = 0; l < r.mean_layer_spikes.size(); ++l) {
    std::cout << (l ? "," : "") << fmt(r.mean_layer_spikes[l]);
  }
  std::cout << "\nmean_active_fraction=";
  for (std::size_t l = 0; l < r.mean_active_fraction.size(); ++l) {
    std::cout << (l ? "," : "") << fmt(r.mean_active_fraction[l]);
  }
  std::cout << "\n";

  if (!opts.latency_grid.empty()) {
    const std::vector<double> grid = parse_grid(opts.latency_grid);
    const auto curve = latency_curve(net, data, target, grid, eval_opts);
    std::cout << "time,confidence,accuracy,mean_spikes_seen\n";
    std::unique_ptr<CsvWriter> csv;
    if (!opts.out_path.empty()) {
      const std::vector<std::string> columns{"time", "confidence", "accuracy",
                                             "mean_spikes_seen"};
      csv = std::make_unique<CsvWriter>(opts.out_path, columns,
                                        config_hash_hex(cfg));
    }
    for (const LatencyPoint& p : curve) {
      std::cout << fmt(p.time) << "," << fmt(p.confidence) << ","
                << fmt(p.accuracy) << "," << fmt(p.mean_spikes_seen) << "\n";
      if (csv) csv->row({p.time, p.confidence, p.accuracy, p.mean_spikes_seen});
    }
    if (csv) std::cout << "wrote " << opts.out_path << "\n";
  } else if (!opts.out_path.empty()) {
    const std::vector<std::string> columns{
        "samples",
        "accuracy",
        "mean_loss",
        "mean_hidden_spikes",
        "mean_output_spikes",
        "mean_first_output_time"};
    CsvWriter csv(opts.out_path, columns, config_hash_hex(cfg));
    csv.row({static_cast<long long>(r.samples), r.accuracy, r.mean_loss,
             r.mean_hidden_spikes, r.mean_output_spikes,
             r.mean_first_output_time});
    std::cout << "wrote " << opts.out_path << "\n";
  }
  return 0;
}

// --- sweep ------------------------------------------------------------------

struct SweepOpts {
  CommonOpts common;
  std::string kind;
  std::string values;
  std::string protocol;  // empty = per-kind default
  std::string model_path;
  std::string out_path;
  int layer = -1;  // threshold sweeps; -1 = readout layer
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(',', start);
    if (pos == std::string::npos) {
      parts.push_back(s.substr(start));
      return parts;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

double sweep_double(const std::string& kind, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("sweep kind '" + kind + "': bad value '" + v + "'");
  }
}

int sweep_bits(const std::string& v) {
  if (v == "float") return 0;
  try {
    std::size_t used = 0;
    const int bits = std::stoi(v, &used);
    if (used != v.size() || bits < 1) throw std::invalid_argument(v);
    return bits;
  } catch (const std::exception&) {
    throw ConfigError("sweep kind 'quantize': value '" + v +
                      "' is neither a bit count nor 'float'");
  }
}

// Rewrites cfg.thresholds so the spiking layer at network index `layer` gets
// theta, broadcasting a single configured value across layers first.
void set_layer_threshold(RunConfig& cfg, const NetworkSpec& probe, int layer,
                         double theta) {
  int spiking = 0, ordinal = -1;
  for (int l = 0; l < probe.num_layers(); ++l) {
    if (!probe.layers[l].spiking()) continue;
    if (l == layer) ordinal = spiking;
    ++spiking;
  }
  if (ordinal < 0) {
    throw ConfigError("sweep --layer " + std::to_string(layer) +
                      " is not a spiking layer");
  }
  std::vector<double> th = cfg.thresholds;
  if (th.size() == 1) th.assign(spiking, th[0]);
  th[ordinal] = theta;
  cfg.thresholds = th;
}

int cmd_sweep(const SweepOpts& opts) {
  RunConfig cfg = resolve(opts.common);
  print_config(cfg);

  std::string protocol = opts.protocol;
  if (protocol.empty()) {
    if (opts.kind == "sim_time") {
      protocol = "eval";
    } else if (opts.kind == "quantize") {
      protocol = cfg.quantize_when == "train" ? "retrain" : "eval";
    } else {
      protocol = "retrain";
    }
  }
  if (opts.kind == "sim_time" && protocol == "retrain") {
    throw ConfigError(
        "sweep kind 'sim_time' truncates a trained model; use --protocol eval");
  }
  const std::vector<std::string> raw = split_list(opts.values);
  if (raw.empty() || (raw.size() == 1 && raw[0].empty())) {
    throw ConfigError("sweep needs a non-empty --values list");
  }

  const TargetSpec target = build_target_spec(cfg);
  const char* value_name = opts.kind == "threshold" ? "theta"
                           : opts.kind == "jitter"  ? "sigma"
                           : opts.kind == "clip"    ? "w_clip"
                           : opts.kind == "quantize" ? "bits"
                                                     : "t_sim";
  std::cout << "sweep kind=" << opts.kind << " protocol=" << protocol
            << " values=" << opts.values << "\n";

  struct Row {
    std::string value;
    EvalResult result;
  };
  std::vector<Row> rows;

  EvalOptions base;
  base.t_sim = cfg.t_sim;
  base.workers = cfg.workers;
  base.jitter_seed = cfg.seed;

  if (protocol == "eval") {
    if (opts.model_path.empty()) {
      throw ConfigError("sweep --protocol eval requires --model");
    }
    const NetworkSpec net = load_model(opts.model_path);
    const Dataset test_set = load_split(cfg, false);
    check_compat(net, test_set, "test set");
    const int layer = opts.layer < 0 ? net.output_layer() : opts.layer;
    for (const std::string& v : raw) {
      NetworkSpec swept = net;
      EvalOptions opt = base;
      if (opts.kind == "threshold") {
        if (layer < 0 || layer >= net.num_layers() ||
            !net.layers[layer].spiking()) {
          throw ConfigError("sweep --layer " + std::to_string(layer) +
                            " is not a spiking layer");
        }
        swept.layers[layer].neuron =
            swept.layers[layer].neuron->with_theta(sweep_double(opts.kind, v));
      } else if (opts.kind == "jitter") {
        opt.jitter_sigma = sweep_double(opts.kind, v);
      } else if (opts.kind == "clip") {
        clip_network(swept, sweep_double(opts.kind, v));
      } else if (opts.kind == "quantize") {
        opt.quantize_bits = sweep_bits(v);
      } else {
        opt.t_sim = sweep_double(opts.kind, v);
      }
      rows.push_back({v, evaluate(swept, test_set, target, opt)});
      std::cout << value_name << "=" << v
                << " accuracy=" << fmt(rows.back().result.accuracy) << "\n";
      std::cout.flush();
    }
  } else {
    const Dataset train_set = load_split(cfg, true);
    const Dataset test_set = load_split(cfg, false);
    const NetworkSpec probe = build_network(cfg);
    check_compat(probe, train_set, "train set");
    check_compat(probe, test_set, "test set");
    const int layer = opts.layer < 0 ? probe.output_layer() : opts.layer;
    for (const std::string& v : raw) {
      RunConfig swept = cfg;  // same seed every row
      EvalOptions opt = base;
      if (opts.kind == "threshold") {
        set_layer_threshold(swept, probe, layer, sweep_double(opts.kind, v));
      } else if (opts.kind == "jitter") {
        // Noise is a property of the system: present while training and at
        // the final measurement, with an epoch tag past the training range.
        const double sigma = sweep_double(opts.kind, v);
        swept.jitter_sigma = sigma;
        opt.jitter_sigma = sigma;
        opt.jitter_epoch = cfg.epochs;
      } else if (opts.kind == "clip") {
        swept.w_clip = sweep_double(opts.kind, v);
      } else {
        swept.quantize_bits = sweep_bits(v);
        swept.quantize_when = "train";
      }
      const NetworkSpec net0 = build_network(swept);
      const TrainResult result =
          train(net0, train_set, test_set, target, build_train_settings(swept));
      rows.push_back({v, evaluate(result.net, test_set, target, opt)});
      std::cout << value_name << "=" << v
                << " accuracy=" << fmt(rows.back().result.accuracy) << "\n";
      std::cout.flush();
    }
  }

  double max_accuracy = 0.0;
  for (const Row& row : rows) {
    max_accuracy = std::max(max_accuracy, row.result.accuracy);
  }
  const std::vector<std::string> columns{value_name,
                                         "accuracy",
                                         "normalized_accuracy",
                                         "mean_hidden_spikes",
                                         "mean_output_spikes"};
  std::unique_ptr<CsvWriter> csv;
  if (!opts.out_path.empty()) {
    csv = std::make_unique<CsvWriter>(opts.out_path, columns,
                                      config_hash_hex(cfg));
  }
  std::cout << columns[0] << ",accuracy,normalized_accuracy,"
            << "mean_hidden_spikes,mean_output_spikes\n";
  for (const Row& row : rows) {
    const double normalized =
        max_accuracy > 0.0 ? row.result.accuracy / max_accuracy : 0.0;
    std::cout << row.value << "," << fmt(row.result.accuracy) << ","
              << fmt(normalized) << "," << fmt(row.result.mean_hidden_spikes)
              << "," << fmt(row.result.mean_output_spikes) << "\n";
    if (csv) {
      csv->row({row.value, row.result.accuracy, normalized,
                row.result.mean_hidden_spikes, row.result.mean_output_spikes});
    }
  }
  if (csv) std::cout << "wrote " << opts.out_path << "\n";
  return 0;
}

// --- encode -----------------------------------------------------------------

struct EncodeOpts {
  CommonOpts common;
  std::string images;
  std::string labels;
  std::string out;
  double t_enc = 0.0;  // 0 = keep config value
  int classes = 10;
  int limit = 0;
};

int cmd_encode(const EncodeOpts& opts) {
  RunConfig cfg = resolve(opts.common);
  apply_override(cfg, "train_images", opts.images);
  apply_override(cfg, "train_labels", opts.labels);
  if (opts.t_enc > 0.0) apply_override(cfg, "t_enc", fmt_cli(opts.t_enc));
  print_config(cfg);

  Dataset data = load_idx_dataset(opts.images, opts.labels, cfg.t_enc,
                                  opts.classes);
  data.truncate(opts.limit);
  write_event_file(opts.out, data);
  long long events = 0;
  for (const EventBatch& s : data.samples) events += s.events.size();
  std::cout << "encoded " << data.size() << " samples ("
            << data.input_shape.size() << " inputs, " << data.num_classes
            << " classes, " << events << " events) to " << opts.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"event-driven spiking network training and evaluation"};
  app.require_subcommand(1);

  TrainOpts train_opts;
  CLI::App* train_cmd =
      app.add_subcommand("train", "train a network and save model + log");
  add_common(train_cmd, train_opts.common);
  train_cmd->add_option("--out-dir", train_opts.out_dir,
                        "directory for model_final.bin, model_best.bin, "
                        "train_log.csv");

  EvalOpts eval_opts;
  CLI::App* eval_cmd =
      app.add_subcommand("eval", "evaluate a saved model on a dataset");
  add_common(eval_cmd, eval_opts.common);
  eval_cmd->add_option("--model", eval_opts.model_path, "model file")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--split", eval_opts.split, "dataset split")
      ->check(CLI::IsMember({"train", "test"}));
  eval_cmd->add_option("--latency-grid", eval_opts.latency_grid,
                       "decision-time curve grid, start:end:step");
  eval_cmd->add_option("--jitter-sigma", eval_opts.jitter_sigma,
                       "input jitter deviation (overrides config)");
  eval_cmd->add_option("--sim-time", eval_opts.sim_time,
                       "simulation window (overrides config)");
  eval_cmd->add_option("--limit", eval_opts.limit,
                       "cap on evaluated samples (overrides config)");
  eval_cmd->add_option("--out", eval_opts.out_path, "write results to CSV");

  SweepOpts sweep_opts;
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "metric sweep over a parameter grid");
  add_common(sweep_cmd, sweep_opts.common);
  sweep_cmd->add_option("--kind", sweep_opts.kind, "swept parameter")
      ->required()
      ->check(CLI::IsMember({"threshold", "jitter", "clip", "quantize",
                             "sim_time"}));
  sweep_cmd->add_option("--values", sweep_opts.values,
                        "comma-separated grid (quantize accepts 'float')")
      ->required();
  sweep_cmd
      ->add_option("--protocol", sweep_opts.protocol,
                   "retrain per value or evaluate a trained --model")
      ->check(CLI::IsMember({"retrain", "eval"}));
  sweep_cmd->add_option("--model", sweep_opts.model_path,
                        "trained model (eval protocol)")
      ->check(CLI::ExistingFile);
  sweep_cmd->add_option("--layer", sweep_opts.layer,
                        "layer index for threshold sweeps (default readout)");
  sweep_cmd->add_option("--out", sweep_opts.out_path, "write rows to CSV");

  EncodeOpts encode_opts;
  CLI::App* encode_cmd = app.add_subcommand(
      "encode", "latency-encode an IDX image/label pair into an event file");
  add_common(encode_cmd, encode_opts.common);
  encode_cmd->add_option("images", encode_opts.images, "IDX image file")
      ->required()
      ->check(CLI::ExistingFile);
  encode_cmd->add_option("labels", encode_opts.labels, "IDX label file")
      ->required()
      ->check(CLI::ExistingFile);
  encode_cmd->add_option("out", encode_opts.out, "output event file")
      ->required();
  encode_cmd->add_option("--t-enc", encode_opts.t_enc,
                         "encoding window in seconds (overrides config)");
  encode_cmd->add_option("--classes", encode_opts.classes, "label class count")
      ->check(CLI::PositiveNumber);
  encode_cmd->add_option("--limit", encode_opts.limit,
                         "encode only the first N samples");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand(train_cmd)) return cmd_train(train_opts);
    if (app.got_subcommand(eval_cmd)) return cmd_eval(eval_opts);
    if (app.got_subcommand(sweep_cmd)) return cmd_sweep(sweep_opts);
    return cmd_encode(encode_opts);
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
