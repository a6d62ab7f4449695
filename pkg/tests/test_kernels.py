"""The numba and numpy paths side by side."""

import numpy as np
import pytest

from intersective import _kernels as K
from intersective.dynamics import Observable


def both(monkeypatch, fn, *args):
    monkeypatch.setenv("INTERSECTIVE_DISABLE_NUMBA", "0")
    a = fn(*args)
    monkeypatch.setenv("INTERSECTIVE_DISABLE_NUMBA", "1")
    b = fn(*args)
    return a, b


def test_flag(monkeypatch):
    monkeypatch.setenv("INTERSECTIVE_DISABLE_NUMBA", "1")
    assert not K.numba_enabled()
    monkeypatch.setenv("INTERSECTIVE_DISABLE_NUMBA", "")
    assert K.numba_enabled() == K.HAVE_NUMBA


@pytest.mark.parametrize("t,n,hnf", [(0, -1, (5, 2, 1)), (0, -1, (10, 0, 10)),
                                     (1, 1, (11, 3, 1)), (0, 2, (6, 0, 3))])
def test_roots_grid_bit_exact(monkeypatch, t, n, hnf):
    rng = np.random.default_rng(sum(hnf))
    A, B, C = hnf
    for _ in range(20):
        ca = rng.integers(0, A, 5)
        cb = rng.integers(0, A, 5)
        a, b = both(monkeypatch, K.roots_grid, ca, cb, t, n, A, B, C)
        assert a.dtype == b.dtype and np.array_equal(a, b)


def test_hashes_bit_exact(monkeypatch):
    keys = np.random.default_rng(0).integers(-2**40, 2**40, (500, 3))
    for seed in (0, 1, 2**63 + 5, -7):
        a, b = both(monkeypatch, K.hash_rows, seed, keys)
        assert np.array_equal(a, b)
    useeds = K.hash_rows(3, np.arange(20))
    a, b = both(monkeypatch, K.uniform_block, useeds, 100, 3)
    assert np.array_equal(a, b) and a.min() >= 0 and a.max() < 1


def test_uniforms_look_uniform():
    u = K.uniform_rows(11, np.arange(200_000))
    assert abs(u.mean() - 0.5) < 0.005
    assert abs(np.histogram(u, 10, (0, 1))[0] / len(u) - 0.1).max() < 0.005


def test_kronecker_hits_agree(monkeypatch):
    rng = np.random.default_rng(1)
    useeds = K.hash_rows(5, np.arange(40))
    shifts = rng.random((40, 2, 2)) * 10
    a, b = both(monkeypatch, K.kronecker_hits, useeds, shifts, np.array([0.1, 0.2]),
                np.array([0.5, 0.6]), 3000)
    assert np.abs(a - b).max() <= 1


@pytest.mark.parametrize("obs", [Observable.cosine([1.0]),
                                 Observable.cosine([2.0, -1.0], 0.7, 0.3, 0.1),
                                 Observable.box([0.2, 0.0], [0.5, 0.7])])
def test_cube_kernel_agrees(monkeypatch, obs):
    rng = np.random.default_rng(2)
    D = obs.dim
    x = rng.random((300, D))
    offsets = rng.random((2, D))
    shifts = rng.random((25, D))
    a, b = both(monkeypatch, K.cube_last_level, x, offsets, shifts, obs.packed)
    assert np.allclose(a, b, atol=1e-12, rtol=0)
