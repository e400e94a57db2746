from __future__ import annotations

import numpy as np
import pytest

from viso._kernels import numba_impl, numpy_impl
from viso.model import Instance, PowerAllocation, Split


def make_instance(gains, p_max=None, sigma2=1.0, gamma=0.0, iid="t", split=Split.TEST):
    gains = np.asarray(gains, dtype=float)
    if p_max is None:
        p_max = np.ones(gains.shape[0])
    return Instance(iid, split, gains, np.asarray(p_max, dtype=float), sigma2, gamma)


def sinr_by_definition(g, eta, sigma2):
    """Independent scalar evaluation of the SINR definition, no numpy reductions."""
    n_ap, n_ue = len(g), len(g[0])
    out = []
    for k in range(n_ue):
        coh = 0.0
        for l in range(n_ap):
            coh += float(eta[l][k]) ** 0.5 * float(g[l][k])
        interf = 0.0
        for kp in range(n_ue):
            if kp == k:
                continue
            for l in range(n_ap):
                interf += float(eta[l][kp]) * float(g[l][k]) ** 2
        out.append(coh * coh / (sigma2 + interf))
    return out


def random_instance(rng, max_ap=5, max_ue=5, gamma=0.0):
    n_ap = int(rng.integers(1, max_ap + 1))
    n_ue = int(rng.integers(1, max_ue + 1))
    g = rng.lognormal(0.0, 1.0, size=(n_ap, n_ue))
    p = rng.uniform(0.2, 2.0, size=n_ap)
    return make_instance(g, p, float(rng.uniform(0.05, 2.0)), gamma)


def random_alloc(rng, inst, overshoot=1.5):
    """Random nonnegative allocation whose AP loads straddle the budgets."""
    raw = rng.uniform(0.0, 1.0, size=inst.gains.shape)
    raw[rng.uniform(size=raw.shape) < 0.2] = 0.0
    row = raw.sum(axis=1, keepdims=True)
    row[row == 0] = 1.0
    scale = rng.uniform(0.0, overshoot, size=(inst.L, 1))
    return PowerAllocation(raw / row * inst.p_max[:, None] * scale)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=["numpy", "numba"])
def kernels(request):
    return {"numpy": numpy_impl, "numba": numba_impl}[request.param]


@pytest.fixture
def sym12():
    return make_instance([[1.0, 1.0]], [1.0], 1.0)


@pytest.fixture
def asym12():
    return make_instance([[1.0, 2.0]], [1.0], 1.0)


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance as acc

    if not acc.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in range(1, 10):
        ok, detail = acc.RESULTS.get(n, (False, "not run or errored before a verdict"))
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'} criterion {n}: {detail}")
