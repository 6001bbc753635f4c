"""Event-driven training engine for spiking neural networks.

Thin Python surface over the C++ core: run configuration, dataset loading,
forward simulation, exact per-sample gradients, training, and evaluation.
"""

import os as _os
import sys as _sys

try:
    from . import _core as _core
except ImportError:  # build-tree layout: the module sits next to the binaries
    _dir = _os.environ.get("EVSPIKE_CORE_DIR")
    if _dir and _dir not in _sys.path:
        _sys.path.insert(0, _dir)
    import _core as _core

Config = _core.Config
Network = _core.Network
Dataset = _core.Dataset
ConfigError = _core.ConfigError
DataError = _core.DataError

presets = _core.presets
load_config = _core.load_config
build_network = _core.build_network
load_network = _core.load_network
load_idx = _core.load_idx
load_events = _core.load_events
forward_times = _core.forward_times
predict = _core.predict
sample_gradients = _core.sample_gradients
evaluate = _core.evaluate
train = _core.train

__version__ = _core.__version__

__all__ = [
    "Config",
    "Network",
    "Dataset",
    "ConfigError",
    "DataError",
    "presets",
    "load_config",
    "build_network",
    "load_network",
    "load_idx",
    "load_events",
    "forward_times",
    "predict",
    "sample_gradients",
    "evaluate",
    "train",
]
