// Python bindings for the event-driven engine: run configuration, dataset
// loading, forward simulation, per-sample gradients, training, evaluation,
// and model files.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "evspike/backward.hpp"
#include "evspike/config.hpp"
#include "evspike/data.hpp"
#include "evspike/forward.hpp"
#include "evspike/loss.hpp"
#include "evspike/metrics.hpp"
#include "evspike/model_io.hpp"
#include "evspike/network.hpp"
#include "evspike/trainer.hpp"

namespace py = pybind11;
using namespace evspike;

namespace {

EventBatch batch_from(const std::vector<std::pair<int, double>>& events,
                      int input_size) {
  EventBatch b;
  for (const auto& [neuron, time] : events) b.add(neuron, time);
  b.normalize(input_size);
  return b;
}

py::dict eval_dict(const EvalResult& r) {
  py::dict d;
  d["samples"] = r.samples;
  d["accuracy"] = r.accuracy;
  d["mean_loss"] = r.mean_loss;
  d["mean_layer_spikes"] = r.mean_layer_spikes;
  d["mean_active_fraction"] = r.mean_active_fraction;
  d["mean_hidden_spikes"] = r.mean_hidden_spikes;
  d["mean_output_spikes"] = r.mean_output_spikes;
  d["mean_first_output_time"] = r.mean_first_output_time;
  return d;
}

py::dict log_dict(const EpochLog& log) {
  py::dict d;
  d["epoch"] = log.epoch;
  d["lr"] = log.lr;
  d["train_loss"] = log.train_loss;
  d["train_accuracy"] = log.train_accuracy;
  d["test_accuracy"] = log.test_accuracy;
  d["mean_hidden_spikes"] = log.mean_hidden_spikes;
  d["mean_output_spikes"] = log.mean_output_spikes;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Event-driven spiking-network training engine";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_RuntimeError);

  py::class_<RunConfig>(m, "Config")
      .def(py::init([](const std::string& preset) {
             return preset.empty() ? RunConfig{} : preset_config(preset);
           }),
           py::arg("preset") = "")
      .def("set",
           [](RunConfig& cfg, const std::string& key, const std::string& value) {
             apply_override(cfg, key, value);
           },
           py::arg("key"), py::arg("value"),
           "Override one configuration key from its string form.")
      .def("dump", &config_dump, "All keys as sorted key=value lines.")
      .def("hash", &config_hash_hex,
           "Hash of every result-determining key (worker count excluded).")
      .def("__repr__", [](const RunConfig& cfg) {
        return "<evspike.Config " + config_hash_hex(cfg) + ">";
      });

  m.def("presets", &preset_names, "Names of the built-in configurations.");
  m.def("load_config", &load_config_json, py::arg("path"),
        "Configuration from a JSON file (a preset key applies first).");

  py::class_<NetworkSpec>(m, "Network")
      .def_property_readonly("input_size", &NetworkSpec::input_size)
      .def_property_readonly("output_size", &NetworkSpec::output_size)
      .def_property_readonly("num_layers", &NetworkSpec::num_layers)
      .def("weights",
           [](const NetworkSpec& net, int layer) {
             return net.layers.at(layer).weights;
           },
           py::arg("layer"), "Flat weight vector of one layer.")
      .def("set_weights",
           [](NetworkSpec& net, int layer, std::vector<double> weights) {
             LayerSpec& l = net.layers.at(layer);
             if (weights.size() != l.weights.size()) {
               throw std::invalid_argument(
                   "set_weights: expected " + std::to_string(l.weights.size()) +
                   " weights, got " + std::to_string(weights.size()));
             }
             l.weights = std::move(weights);
           },
           py::arg("layer"), py::arg("weights"))
      .def("save",
           [](const NetworkSpec& net, const std::string& path) {
             save_model(path, net);
           },
           py::arg("path"));

  m.def("build_network", &build_network, py::arg("config"),
        "Network with freshly initialized weights, per the configuration.");
  m.def("load_network", &load_model, py::arg("path"));

  py::class_<Dataset>(m, "Dataset")
      .def_property_readonly("size", &Dataset::size)
      .def_readonly("num_classes", &Dataset::num_classes)
      .def_readonly("labels", &Dataset::labels)
      .def("truncate", &Dataset::truncate, py::arg("limit"))
      .def("events",
           [](const Dataset& d, int i) {
             std::vector<std::pair<int, double>> out;
             for (const Event& e : d.samples.at(i).events) {
               out.emplace_back(e.neuron, e.time);
             }
             return out;
           },
           py::arg("index"), "One sample as (input unit, spike time) pairs.");

  m.def("load_idx", &load_idx_dataset, py::arg("images"), py::arg("labels"),
        py::arg("t_enc"), py::arg("num_classes") = 10,
        "IDX image/label pair encoded to first-spike times.");
  m.def("load_events", &load_event_file, py::arg("path"));

  m.def("forward_times",
        [](const NetworkSpec& net,
           const std::vector<std::pair<int, double>>& events, double t_sim) {
          const ForwardTrace trace =
              forward(net, batch_from(events, net.input_size()), t_sim);
          std::vector<std::vector<std::vector<double>>> out;
          for (const LayerTrace& layer : trace.layers) {
            std::vector<std::vector<double>> trains;
            for (const SpikeTrain& t : layer.trains) trains.push_back(t.times);
            out.push_back(std::move(trains));
          }
          return out;
        },
        py::arg("network"), py::arg("events"), py::arg("t_sim"),
        "Spike times of every unit, per layer, for one input batch.");

  m.def("predict",
        [](const NetworkSpec& net,
           const std::vector<std::pair<int, double>>& events,
           const RunConfig& cfg) {
          const ForwardTrace trace =
              forward(net, batch_from(events, net.input_size()), cfg.t_sim);
          return predict(trace, build_target_spec(cfg).mode);
        },
        py::arg("network"), py::arg("events"), py::arg("config"));

  m.def("sample_gradients",
        [](const NetworkSpec& net,
           const std::vector<std::pair<int, double>>& events, int label,
           const RunConfig& cfg) {
          const ForwardTrace trace =
              forward(net, batch_from(events, net.input_size()), cfg.t_sim);
          BackwardOptions options;
          options.convention = build_convention(cfg);
          const BackwardResult r =
              backward(net, trace, label, build_target_spec(cfg), options);
          py::dict d;
          d["loss"] = r.loss;
          d["gradients"] = r.grads.layers;
          return d;
        },
        py::arg("network"), py::arg("events"), py::arg("label"),
        py::arg("config"),
        "Sample loss and exact per-layer weight gradients.");

  m.def("evaluate",
        [](const NetworkSpec& net, const Dataset& data, const RunConfig& cfg) {
          EvalOptions opt;
          opt.t_sim = cfg.t_sim;
          opt.workers = cfg.workers;
          return eval_dict(evaluate(net, data, build_target_spec(cfg), opt));
        },
        py::arg("network"), py::arg("data"), py::arg("config"));

  m.def("train",
        [](const RunConfig& cfg, const Dataset& train_set,
           const Dataset& test_set, const py::object& on_epoch) {
          const NetworkSpec start = build_network(cfg);
          const EpochCallback callback =
              on_epoch.is_none()
                  ? EpochCallback()
                  : EpochCallback([&on_epoch](const EpochLog& log) {
                      on_epoch(log_dict(log));
                    });
          const TrainResult r =
              train(start, train_set, test_set, build_target_spec(cfg),
                    build_train_settings(cfg), callback);
          py::dict d;
          d["network"] = r.net;
          d["best_network"] = r.best_net;
          d["best_accuracy"] = r.best_accuracy;
          d["best_epoch"] = r.best_epoch;
          py::list log;
          for (const EpochLog& entry : r.log) log.append(log_dict(entry));
          d["log"] = log;
          return d;
        },
        py::arg("config"), py::arg("train_set"), py::arg("test_set"),
        py::arg("on_epoch") = py::none(),
        "Full training run; returns the trained network and the epoch log.");

  m.attr("__version__") = "0.1.0";
}
