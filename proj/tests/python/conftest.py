import os
import pathlib
import sys

import pytest

REPO_ROOT = pathlib.Path(__file__).resolve().parents[2]

# Build-tree runs ship the package location through the environment; an
# installed package wins if present.
_pkg_dir = os.environ.get("EVSPIKE_PKG_DIR", str(REPO_ROOT / "python"))
if _pkg_dir not in sys.path:
    sys.path.append(_pkg_dir)


@pytest.fixture(scope="session")
def mnist_dir():
    d = REPO_ROOT / "data" / "mnist"
    if not (d / "train-images-idx3-ubyte").exists():
        pytest.skip("MNIST files not present")
    return d
