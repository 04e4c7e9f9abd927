import os
import subprocess
import sys

import numpy as np
import pytest

from recapture import _kernels
from recapture.engines.matrix import CLASSICAL, LP
from recapture.quotient import MatrixAlgebra, Universe
from recapture.syntax import CORE, Bounds, Signature, count_wffs

IMPLS = _kernels.implementations()
needs_numba = pytest.mark.skipif("numba" not in IMPLS, reason="numba unavailable or disabled")


@needs_numba
def test_compose_binary_parity():
    rng = np.random.default_rng(1)
    table = rng.integers(0, 3, size=(3, 3)).astype(np.uint8)
    left = rng.integers(0, 3, size=(37, 9)).astype(np.uint8)
    right = rng.integers(0, 3, size=(23, 9)).astype(np.uint8)
    a = IMPLS["numpy"]["compose_binary"](table, left, right)
    b = IMPLS["numba"]["compose_binary"](table, left, right)
    assert a.shape == (37, 23, 9)
    assert np.array_equal(a, b)


@needs_numba
def test_forcing_imp_parity():
    rng = np.random.default_rng(2)
    succ = np.array([[0, 1, 2], [1, 1, 2], [2, 2, 2]], dtype=np.int64)
    x = rng.random((11, 3)) < 0.5
    y = rng.random((7, 3)) < 0.5
    assert np.array_equal(IMPLS["numpy"]["forcing_imp"](x, y, succ), IMPLS["numba"]["forcing_imp"](x, y, succ))


@needs_numba
def test_mask_valid_parity():
    rng = np.random.default_rng(3)
    s = rng.integers(0, 1 << 62, size=(19, 2), dtype=np.uint64)
    d = rng.integers(0, 1 << 62, size=(13, 2), dtype=np.uint64)
    d[:5] |= s[:5]
    a = IMPLS["numpy"]["mask_valid"](s, d)
    assert a[np.arange(5), np.arange(5)].all()
    assert np.array_equal(a, IMPLS["numba"]["mask_valid"](s, d))


def _universe_summary(monkeypatch, impl: str, sig, bounds, matrix):
    for name, fn in IMPLS[impl].items():
        monkeypatch.setattr(_kernels, name, fn)
    limit = count_wffs(sig, Bounds(bounds.atoms, bounds.depth - 1))
    u = Universe(sig, bounds, MatrixAlgebra(matrix, bounds.atom_names), explicit_limit=limit)
    return u.total, [(str(e.first), e.count) for e in u.entries]


@needs_numba
@pytest.mark.parametrize("sig, bounds, matrix", [
    (CORE, Bounds(1, 3), CLASSICAL),
    (Signature.of("not", "and", "imp"), Bounds(2, 2), LP),
])
def test_layer_scan_parity(monkeypatch, sig, bounds, matrix):
    a = _universe_summary(monkeypatch, "numpy", sig, bounds, matrix)
    b = _universe_summary(monkeypatch, "numba", sig, bounds, matrix)
    assert a == b


def test_env_flag_selects_numpy():
    env = dict(os.environ, RECAPTURE_DISABLE_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c", "from recapture import _kernels as k; print(k.USING_NUMBA, sorted(k.implementations()))"],
        env=env, capture_output=True, text=True, check=True,
    )
    assert out.stdout.strip() == "False ['numpy']"
