import math

import pytest

import evspike as ev


def test_version_and_presets():
    assert ev.__version__
    names = ev.presets()
    assert "mnist-800-10-unconstrained" in names
    assert "mnist-800-10-ttfs" in names


def test_config_dump_and_hash_are_stable():
    a = ev.Config()
    b = ev.Config()
    assert a.dump() == b.dump()
    assert a.hash() == b.hash()
    b.set("lr", "0.004")
    assert a.hash() != b.hash()
    # The worker count never labels a result.
    c = ev.Config()
    c.set("workers", "8")
    assert a.hash() == c.hash()
    assert a.dump() != c.dump()


def test_config_rejects_unknown_key():
    cfg = ev.Config()
    with pytest.raises(ValueError):
        cfg.set("no_such_key", "1")
    with pytest.raises(ValueError):
        ev.Config("no-such-preset")


def test_single_input_reference_spike():
    cfg = ev.Config()
    cfg.set("input_shape", "1")
    cfg.set("arch", "1")
    cfg.set("tau_s", "0.1")
    cfg.set("thresholds", "0.05")
    net = ev.build_network(cfg)
    net.set_weights(0, [2.0])
    layers = ev.forward_times(net, [(0, 0.0)], 0.3)
    assert len(layers) == 1 and len(layers[0]) == 1
    times = layers[0][0]
    assert len(times) == 2
    assert math.isclose(times[0], 0.031669436764074988, rel_tol=1e-12)


def test_network_round_trip(tmp_path):
    cfg = ev.Config()
    cfg.set("input_shape", "6")
    cfg.set("arch", "5-4")
    cfg.set("thresholds", "0.2,0.2")
    net = ev.build_network(cfg)
    path = str(tmp_path / "model.bin")
    net.save(path)
    back = ev.load_network(path)
    assert back.weights(0) == net.weights(0)
    assert back.weights(1) == net.weights(1)


def test_gradients_match_finite_differences():
    cfg = ev.Config()
    cfg.set("input_shape", "3")
    cfg.set("arch", "2")
    cfg.set("tau_s", "0.1")
    cfg.set("thresholds", "0.1")
    cfg.set("loss", "ttfs_softmax")
    cfg.set("softmax_tau", "0.05")
    cfg.set("t_sim", "0.3")
    net = ev.build_network(cfg)
    net.set_weights(0, [1.1, -0.2, 0.8, 0.9, 0.4, 1.3])
    events = [(0, 0.0), (1, 0.02), (2, 0.05)]

    base = ev.sample_gradients(net, events, 1, cfg)
    grads = base["gradients"][0]
    h = 1e-6
    for w_idx in range(6):
        shifted = list(net.weights(0))
        shifted[w_idx] += h
        hi = _loss_with(net, cfg, events, shifted)
        shifted[w_idx] -= 2 * h
        lo = _loss_with(net, cfg, events, shifted)
        fd = (hi - lo) / (2 * h)
        assert math.isclose(fd, grads[w_idx], rel_tol=1e-3, abs_tol=1e-6)


def _loss_with(net, cfg, events, weights):
    probe = ev.build_network(cfg)
    probe.set_weights(0, weights)
    return ev.sample_gradients(probe, events, 1, cfg)["loss"]


def test_dataset_and_training(mnist_dir):
    data = ev.load_idx(
        str(mnist_dir / "train-images-idx3-ubyte"),
        str(mnist_dir / "train-labels-idx1-ubyte"),
        0.1,
    )
    assert data.num_classes == 10
    assert data.size > 1000
    data.truncate(120)
    assert data.size == 120
    assert all(0 <= label < 10 for label in data.labels)
    assert all(t >= 0.0 for _, t in data.events(0))

    test = ev.load_idx(
        str(mnist_dir / "t10k-images-idx3-ubyte"),
        str(mnist_dir / "t10k-labels-idx1-ubyte"),
        0.1,
    )
    test.truncate(60)

    cfg = ev.Config()
    cfg.set("arch", "20-10")
    cfg.set("thresholds", "0.12,0.12")
    cfg.set("init", "uniform(-0.3,0.3)")
    cfg.set("epochs", "1")
    cfg.set("batch_size", "20")
    cfg.set("train_limit", "120")

    seen = []
    result = ev.train(cfg, data, test, on_epoch=seen.append)
    assert len(result["log"]) == 1
    assert seen[0]["epoch"] == 1
    assert 0.0 <= result["best_accuracy"] <= 1.0

    # Same configuration, same result, bit for bit.
    again = ev.train(cfg, data, test)
    assert again["best_accuracy"] == result["best_accuracy"]
    assert again["network"].weights(0) == result["network"].weights(0)

    # Evaluation agrees with per-sample prediction.
    net = result["network"]
    metrics = ev.evaluate(net, test, cfg)
    hits = sum(
        ev.predict(net, test.events(i), cfg) == test.labels[i]
        for i in range(test.size)
    )
    assert math.isclose(metrics["accuracy"], hits / test.size, rel_tol=1e-12)


def test_data_error_mapping(tmp_path):
    with pytest.raises(RuntimeError):
        ev.load_idx(str(tmp_path / "missing"), str(tmp_path / "missing2"), 0.1)
