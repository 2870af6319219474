import importlib
import subprocess
import sys

import numpy as np

from ybx import _kernels_py, kernels


def _points():
    rng = np.random.default_rng(3)
    return rng.uniform(-0.5, 0.5, 50) + 1j * rng.uniform(-0.3, 0.3, 50)


def test_backend_selected():
    assert kernels.BACKEND in ("cython", "python")


def test_backends_agree():
    z = _points()
    a = kernels.theta1_series(z, 1j, 30)
    b = _kernels_py.theta1_series(z, 1j, 30)
    assert np.abs(a - b).max() < 1e-14
    p, q = np.exp(-2 * np.pi), np.exp(4j * np.pi * (0.17 + 0.11j))
    ga, ma = kernels.egamma_product(z, p, q, 40)
    gb, mb = _kernels_py.egamma_product(z, p, q, 40)
    assert np.abs(np.asarray(ga) - np.asarray(gb)).max() < 1e-13 * np.abs(gb).max()
    assert abs(ma - mb) < 1e-14


def test_pure_python_switch():
    code = "from ybx.kernels import BACKEND; print(BACKEND)"
    out = subprocess.run(
        [sys.executable, "-c", code], capture_output=True, text=True, env={"YBX_PURE_PYTHON": "1", "PATH": ""}
    )
    assert out.stdout.strip() == "python"
