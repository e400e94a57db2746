"""Numba and numpy kernel paths must agree; the env flag must select the path."""

from __future__ import annotations

import os
import subprocess
import sys

import numpy as np
import pytest

from viso._kernels import numba_impl, numpy_impl

from .conftest import random_alloc, random_instance, sinr_by_definition


def test_sinr_both_paths_match_definition(kernels, rng):
    for _ in range(100):
        inst = random_instance(rng)
        eta = random_alloc(rng, inst).eta
        ref = sinr_by_definition(inst.gains, eta, inst.sigma2)
        np.testing.assert_allclose(kernels.sinr(inst.gains, eta, inst.sigma2), ref, rtol=1e-12)


def test_paths_agree_on_solver_loops(rng):
    for _ in range(30):
        inst = random_instance(rng)
        g, p, s2 = inst.gains, inst.p_max, inst.sigma2
        a_eta, a_n = numpy_impl.fast_loop(g, p, s2, 20, 0.1)
        b_eta, b_n = numba_impl.fast_loop(g, p, s2, 20, 0.1)
        assert a_n == b_n
        np.testing.assert_allclose(a_eta, b_eta, rtol=1e-9, atol=1e-15)

        target = float(numpy_impl.sinr(g, a_eta, s2).min())
        a = numpy_impl.feasibility_inner(g, p, s2, target, 200, 1e-4, 1e-30)
        b = numba_impl.feasibility_inner(g, p, s2, target, 200, 1e-4, 1e-30)
        assert bool(a[1]) == bool(b[1])
        assert a[2] == b[2]
        np.testing.assert_allclose(a[0], b[0], rtol=1e-9, atol=1e-15)


@pytest.mark.parametrize("shape", [(1, 1), (2, 2), (1, 3), (3, 1), (2, 3)])
def test_grid_paths_agree(rng, shape):
    g = rng.lognormal(0, 1, size=shape)
    p = rng.uniform(0.5, 2.0, size=shape[0])
    a_eta, a_val = numpy_impl.grid_search(g, p, 0.7, 12)
    b_eta, b_val = numba_impl.grid_search(g, p, 0.7, 12)
    assert a_val == pytest.approx(b_val, rel=1e-12)
    np.testing.assert_allclose(a_eta, b_eta, rtol=1e-12)


def test_compositions_numpy_enumerates_simplex():
    from itertools import product

    comp = numpy_impl.compositions(3, 6)
    ref = sorted(t for t in product(range(7), repeat=3) if sum(t) == 6)
    assert [tuple(r) for r in comp.tolist()] == ref


def test_channel_proportional_zero_row(kernels):
    g = np.array([[0.0, 0.0], [1.0, 3.0]])
    eta = kernels.channel_proportional(g, np.array([1.0, 2.0]))
    np.testing.assert_allclose(eta, [[0.0, 0.0], [0.2, 1.8]])


@pytest.mark.parametrize("flag, expected", [("1", "numpy"), ("", "numba")])
def test_env_flag_selects_backend(flag, expected):
    env = dict(os.environ, VISO_DISABLE_NUMBA=flag)
    out = subprocess.run(
        [sys.executable, "-c", "import viso._kernels as k; print(k.BACKEND)"],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    assert out.stdout.strip() == expected
