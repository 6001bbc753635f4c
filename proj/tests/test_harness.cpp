#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "evspike/metrics.hpp"
#include "evspike/trainer.hpp"

using namespace evspike;

namespace {

// Tiny separable problem: class 0 drives units {0,1} early and {2,3} late,
// class 1 the other way around.
Dataset make_synth(int n, std::uint64_t seed) {
  Dataset d;
  d.input_shape = {1, 1, 4};
  d.num_classes = 2;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> early(0.0, 0.03);
  std::uniform_real_distribution<double> late(0.1, 0.15);
  for (int i = 0; i < n; ++i) {
    const int label = i % 2;
    EventBatch b;
    for (int u = 0; u < 4; ++u) {
      const bool fast = (u < 2) == (label == 0);
      b.add(u, fast ? early(rng) : late(rng));
    }
    b.normalize(4);
    d.samples.push_back(std::move(b));
    d.labels.push_back(label);
  }
  d.validate();
  return d;
}

NetworkSpec make_net(std::uint64_t seed) {
  const NeuronParams hid(0.1, 0.08, 6);
  const NeuronParams out(0.1, 0.08, 8);
  NetworkSpec net;
  net.input_shape = {1, 1, 4};
  net.layers.push_back(make_dense(4, 6, hid, {-0.5, 1.5}));
  net.layers.push_back(make_dense(6, 2, out, {-0.5, 1.5}));
  init_network(net, seed);
  return net;
}

TargetSpec count_target() {
  TargetSpec spec;
  spec.count_true = 6;
  spec.count_false = 1;
  return spec.resolved(0.2, 0.2);
}

bool same_eval(const EvalResult& a, const EvalResult& b) {
  return a.samples == b.samples && a.accuracy == b.accuracy &&
         a.mean_loss == b.mean_loss &&
         a.mean_layer_spikes == b.mean_layer_spikes &&
         a.mean_active_fraction == b.mean_active_fraction &&
         a.mean_hidden_spikes == b.mean_hidden_spikes &&
         a.mean_output_spikes == b.mean_output_spikes &&
         a.mean_first_output_time == b.mean_first_output_time;
}

ForwardTrace make_trace(std::vector<std::vector<double>> unit_times) {
  ForwardTrace trace;
  trace.layers.resize(1);
  for (auto& times : unit_times) {
    SpikeTrain train;
    train.times = std::move(times);
    trace.layers[0].trains.push_back(std::move(train));
  }
  return trace;
}

}  // namespace

TEST_CASE("evaluation reports accuracy and activity") {
  const Dataset data = make_synth(20, 2);
  const NetworkSpec net = make_net(11);
  EvalOptions opts;
  const EvalResult r = evaluate(net, data, count_target(), opts);
  CHECK(r.samples == 20);
  CHECK(r.accuracy >= 0.0);
  CHECK(r.accuracy <= 1.0);
  CHECK(r.mean_loss > 0.0);
  REQUIRE(r.mean_layer_spikes.size() == 2);
  REQUIRE(r.mean_active_fraction.size() == 2);
  for (const double f : r.mean_active_fraction) {
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
  }
  CHECK(r.mean_hidden_spikes == doctest::Approx(r.mean_layer_spikes[0]));
  CHECK(r.mean_output_spikes == doctest::Approx(r.mean_layer_spikes[1]));
  CHECK(r.mean_first_output_time > 0.0);
  CHECK(r.mean_first_output_time <= 0.2);

  EvalOptions limited = opts;
  limited.limit = 5;
  CHECK(evaluate(net, data, count_target(), limited).samples == 5);
}

TEST_CASE("evaluation is identical across worker counts") {
  const Dataset data = make_synth(30, 3);
  const NetworkSpec net = make_net(11);
  EvalOptions one;
  EvalOptions four;
  four.workers = 4;
  const EvalResult a = evaluate(net, data, count_target(), one);
  const EvalResult b = evaluate(net, data, count_target(), four);
  CHECK(same_eval(a, b));

  // Same determinism under input jitter.
  one.jitter_sigma = four.jitter_sigma = 0.005;
  one.jitter_seed = four.jitter_seed = 77;
  const EvalResult ja = evaluate(net, data, count_target(), one);
  const EvalResult jb = evaluate(net, data, count_target(), four);
  CHECK(same_eval(ja, jb));
}

TEST_CASE("quantized evaluation equals evaluating quantized weights") {
  const Dataset data = make_synth(16, 4);
  const NetworkSpec net = make_net(11);
  EvalOptions quant;
  quant.quantize_bits = 4;
  const EvalResult a = evaluate(net, data, count_target(), quant);
  NetworkSpec rounded = net;
  quantize_network(rounded, 4);
  const EvalResult b = evaluate(rounded, data, count_target(), EvalOptions{});
  CHECK(same_eval(a, b));
}

TEST_CASE("prefix prediction reads only early spikes") {
  const ForwardTrace trace =
      make_trace({{0.01, 0.04, 0.05}, {0.02, 0.03}, {0.06}});
  // Full-window winner is unit 0; before t=0.035 unit 1 leads on counts.
  CHECK(predict_prefix(trace, LossMode::kSpikeCount, 0.2) == 0);
  CHECK(predict_prefix(trace, LossMode::kSpikeCount, 0.035) == 1);
  CHECK(predict_prefix(trace, LossMode::kSpikeCount, 0.005) == 0);  // nothing yet
  // Temporal rule: earliest first spike within the prefix.
  CHECK(predict_prefix(trace, LossMode::kTtfsSoftmax, 0.2) == 0);
  CHECK(predict_prefix(trace, LossMode::kTtfsSoftmax, 0.015) == 0);
  CHECK(predict_prefix(trace, LossMode::kTtfsSoftmax, 0.005) == 0);
}

TEST_CASE("latency curve matches truncated re-simulation") {
  const Dataset data = make_synth(12, 5);
  const NetworkSpec net = make_net(11);
  const TargetSpec target = count_target();
  const std::vector<double> grid{0.05, 0.1, 0.15, 0.2};
  const auto curve = latency_curve(net, data, target, grid, EvalOptions{});
  REQUIRE(curve.size() == grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    CHECK(curve[g].time == grid[g]);
    // Recompute the point the slow way: truncate the inputs at t and run a
    // fresh forward pass; prefix decisions must agree exactly.
    int agree = 0;
    int correct = 0;
    double spikes = 0.0;
    for (int i = 0; i < data.size(); ++i) {
      EventBatch cut;
      for (const Event& e : data.samples[i].events) {
        if (e.time <= grid[g]) cut.add(e.neuron, e.time);
      }
      cut.normalize(4);
      const ForwardTrace part = forward(net, cut, grid[g]);
      const ForwardTrace full = forward(net, data.samples[i], 0.2);
      const int pred = predict(part, LossMode::kSpikeCount);
      agree += pred == predict(full, LossMode::kSpikeCount);
      correct += pred == data.labels[i];
      for (const auto& layer : part.layers) spikes += layer.total_spikes();
    }
    CHECK(curve[g].confidence == doctest::Approx(double(agree) / data.size()));
    CHECK(curve[g].accuracy == doctest::Approx(double(correct) / data.size()));
    CHECK(curve[g].mean_spikes_seen == doctest::Approx(spikes / data.size()));
  }
  // At the end of the window the prefix decision is the final decision.
  CHECK(curve.back().confidence == 1.0);
  // More time never hurts the spike tally.
  for (std::size_t g = 1; g < curve.size(); ++g) {
    CHECK(curve[g].mean_spikes_seen >= curve[g - 1].mean_spikes_seen);
  }
}

TEST_CASE("simulation-time sweep reproduces plain evaluation at full length") {
  const Dataset data = make_synth(12, 9);
  const NetworkSpec net = make_net(11);
  const TargetSpec target = count_target();
  const std::vector<double> times{0.05, 0.1, 0.2};
  const auto points = sim_time_sweep(net, data, target, times, EvalOptions{});
  REQUIRE(points.size() == times.size());
  const EvalResult plain = evaluate(net, data, target, EvalOptions{});
  CHECK(points.back().t_sim == 0.2);
  CHECK(points.back().accuracy == plain.accuracy);
  CHECK(points.back().mean_hidden_spikes == plain.mean_hidden_spikes);
  CHECK(points.back().mean_output_spikes == plain.mean_output_spikes);
  // Each truncated run matches an evaluation restricted to that window.
  for (std::size_t i = 0; i < times.size(); ++i) {
    EvalOptions opt;
    opt.t_sim = times[i];
    const EvalResult r = evaluate(net, data, target, opt);
    CHECK(points[i].accuracy == r.accuracy);
    CHECK(points[i].mean_hidden_spikes == r.mean_hidden_spikes);
    CHECK(points[i].mean_output_spikes == r.mean_output_spikes);
  }
}

TEST_CASE("threshold sweep lowers the bar and spike counts rise") {
  const Dataset data = make_synth(16, 6);
  const NetworkSpec net = make_net(11);
  const std::vector<double> thetas{0.16, 0.12, 0.08, 0.05, 0.03};
  const auto points =
      threshold_sweep(net, data, count_target(), 1, thetas, EvalOptions{});
  REQUIRE(points.size() == thetas.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    CHECK(points[i].theta == thetas[i]);
    if (i > 0) {
      CHECK(points[i].mean_layer_spikes >= points[i - 1].mean_layer_spikes);
    }
  }
  // Sweeping the readout leaves the hidden layer untouched.
  for (const auto& pt : points) {
    CHECK(pt.mean_hidden_spikes == doctest::Approx(points[0].mean_hidden_spikes));
    CHECK(pt.mean_layer_spikes == doctest::Approx(pt.mean_output_spikes));
  }
  CHECK_THROWS_AS(
      threshold_sweep(net, data, count_target(), 5, thetas, EvalOptions{}),
      std::invalid_argument);
}

TEST_CASE("clip sweep is the identity above the weight range") {
  const Dataset data = make_synth(16, 7);
  const NetworkSpec net = make_net(11);
  double w_max = 0.0;
  for (const auto& layer : net.layers) {
    for (const double w : layer.weights) w_max = std::max(w_max, std::abs(w));
  }
  const EvalResult clean = evaluate(net, data, count_target(), EvalOptions{});
  const std::vector<double> clips{w_max + 0.5, 0.4, 0.1};
  const auto points = clip_sweep(net, data, count_target(), clips, EvalOptions{});
  REQUIRE(points.size() == 3);
  CHECK(points[0].w_clip == clips[0]);
  CHECK(points[0].accuracy == clean.accuracy);
}

TEST_CASE("robustness sweep starts from the clean accuracy") {
  const Dataset data = make_synth(16, 8);
  const NetworkSpec net = make_net(11);
  const EvalResult clean = evaluate(net, data, count_target(), EvalOptions{});
  const std::vector<double> sigmas{0.0, 0.002, 0.01};
  EvalOptions opts;
  opts.jitter_seed = 5;
  const auto a = robustness_sweep(net, data, count_target(), sigmas, opts);
  const auto b = robustness_sweep(net, data, count_target(), sigmas, opts);
  REQUIRE(a.size() == 3);
  CHECK(a[0].sigma == 0.0);
  CHECK(a[0].accuracy == clean.accuracy);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].accuracy == b[i].accuracy);  // fixed seed, fixed result
    CHECK(a[i].accuracy >= 0.0);
    CHECK(a[i].accuracy <= 1.0);
  }
}

TEST_CASE("quantization sweep includes the float entry") {
  const Dataset data = make_synth(16, 9);
  const NetworkSpec net = make_net(11);
  const EvalResult clean = evaluate(net, data, count_target(), EvalOptions{});
  const std::vector<int> bits{0, 8, 4, 2};
  const auto points =
      quantization_sweep(net, data, count_target(), bits, EvalOptions{});
  REQUIRE(points.size() == 4);
  CHECK(points[0].bits == 0);
  CHECK(points[0].accuracy == clean.accuracy);
  for (const auto& pt : points) {
    CHECK(pt.accuracy >= 0.0);
    CHECK(pt.accuracy <= 1.0);
  }
}

TEST_CASE("training learns the synthetic problem") {
  const Dataset train_set = make_synth(40, 1);
  const Dataset test_set = make_synth(20, 2);
  TrainSettings s;
  s.epochs = 14;
  s.batch_size = 8;
  s.lr = 0.03;
  s.seed = 5;
  s.t_sim = 0.2;
  const TrainResult r =
      train(make_net(11), train_set, test_set, count_target(), s);
  REQUIRE(r.log.size() == 14);
  CHECK(r.log.front().epoch == 1);
  CHECK(r.log.back().epoch == 14);
  CHECK(r.log.back().test_accuracy >= 0.9);
  CHECK(r.best_accuracy >= 0.9);
  CHECK(r.log.back().train_loss < r.log.front().train_loss);

  // The best network really scores its recorded accuracy.
  EvalOptions opts;
  opts.t_sim = 0.2;
  const EvalResult best_eval = evaluate(r.best_net, test_set, count_target(), opts);
  CHECK(best_eval.accuracy == r.best_accuracy);
  REQUIRE(r.best_epoch >= 1);
  CHECK(r.log[r.best_epoch - 1].test_accuracy == r.best_accuracy);
}

TEST_CASE("training is byte-identical across worker counts") {
  const Dataset train_set = make_synth(24, 1);
  const Dataset test_set = make_synth(12, 2);
  TrainSettings s;
  s.epochs = 2;
  s.batch_size = 8;
  s.lr = 0.03;
  s.seed = 5;
  s.t_sim = 0.2;
  s.jitter_sigma = 0.003;  // exercise the per-sample noise streams too
  TrainSettings s4 = s;
  s4.workers = 4;
  const TrainResult a =
      train(make_net(11), train_set, test_set, count_target(), s);
  const TrainResult b =
      train(make_net(11), train_set, test_set, count_target(), s4);
  REQUIRE(a.log.size() == b.log.size());
  for (std::size_t e = 0; e < a.log.size(); ++e) {
    CHECK(a.log[e].lr == b.log[e].lr);
    CHECK(a.log[e].train_loss == b.log[e].train_loss);
    CHECK(a.log[e].train_accuracy == b.log[e].train_accuracy);
    CHECK(a.log[e].test_accuracy == b.log[e].test_accuracy);
    CHECK(a.log[e].mean_hidden_spikes == b.log[e].mean_hidden_spikes);
  }
  for (std::size_t l = 0; l < a.net.layers.size(); ++l) {
    CHECK(a.net.layers[l].weights == b.net.layers[l].weights);
  }
}

TEST_CASE("batch gradients are chunk-order invariant") {
  const Dataset data = make_synth(20, 1);
  const NetworkSpec net = make_net(11);
  std::vector<int> indices(20);
  for (int i = 0; i < 20; ++i) indices[i] = i;
  TrainSettings s;
  s.t_sim = 0.2;
  TrainSettings s3 = s;
  s3.workers = 3;
  const BatchResult a = batch_gradients(net, data, indices, count_target(), s, 0);
  const BatchResult b = batch_gradients(net, data, indices, count_target(), s3, 0);
  CHECK(a.mean_loss == b.mean_loss);
  for (std::size_t l = 0; l < a.grads.layers.size(); ++l) {
    CHECK(a.grads.layers[l] == b.grads.layers[l]);
  }
}

TEST_CASE("quantization-aware training deploys on-grid weights") {
  const Dataset train_set = make_synth(24, 1);
  const Dataset test_set = make_synth(12, 2);
  TrainSettings s;
  s.epochs = 3;
  s.batch_size = 8;
  s.lr = 0.03;
  s.seed = 5;
  s.t_sim = 0.2;
  s.quantize_bits = 4;
  s.quantize_in_train = true;
  const TrainResult r =
      train(make_net(11), train_set, test_set, count_target(), s);
  const double step = 1.0 / 15.0;  // 4-bit spacing
  for (const auto& layer : r.net.layers) {
    for (const double w : layer.weights) {
      const double k = w / step;
      CHECK(std::abs(k - std::round(k)) < 1e-9);
      CHECK(std::abs(w) <= 1.0);
    }
  }
  for (const auto& e : r.log) CHECK(std::isfinite(e.train_loss));
}

TEST_CASE("epoch callback fires once per epoch") {
  const Dataset train_set = make_synth(16, 1);
  const Dataset test_set = make_synth(8, 2);
  TrainSettings s;
  s.epochs = 3;
  s.batch_size = 8;
  s.t_sim = 0.2;
  std::vector<int> seen;
  train(make_net(11), train_set, test_set, count_target(), s,
        [&](const EpochLog& log) { seen.push_back(log.epoch); });
  CHECK(seen == std::vector<int>{1, 2, 3});
}
