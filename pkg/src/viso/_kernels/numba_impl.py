"""Loop kernels compiled with numba. Same contracts as ``numpy_impl``."""

from __future__ import annotations

import numpy as np
from numba import njit

from math import comb


@njit(cache=True, nogil=True)
def sinr(g, eta, sigma2):
    n_ap, n_ue = g.shape
    load = np.zeros(n_ap)
    for l in range(n_ap):
        acc = 0.0
        for k in range(n_ue):
            acc += eta[l, k]
        load[l] = acc
    out = np.empty(n_ue)
    for k in range(n_ue):
        coh = 0.0
        interf = 0.0
        for l in range(n_ap):
            coh += np.sqrt(eta[l, k]) * g[l, k]
            interf += g[l, k] * g[l, k] * (load[l] - eta[l, k])
        if interf < 0.0:
            interf = 0.0
        out[k] = coh * coh / (sigma2 + interf)
    return out


@njit(cache=True, nogil=True)
def channel_proportional(g, p_max):
    n_ap, n_ue = g.shape
    eta = np.zeros((n_ap, n_ue))
    for l in range(n_ap):
        tot = 0.0
        for k in range(n_ue):
            tot += g[l, k] * g[l, k]
        if tot > 0.0:
            for k in range(n_ue):
                eta[l, k] = p_max[l] * g[l, k] * g[l, k] / tot
    return eta


@njit(cache=True, nogil=True)
def fast_loop(g, p_max, sigma2, iters, frac):
    eta = channel_proportional(g, p_max)
    s = sinr(g, eta, sigma2)
    evals = 1
    best = s.min()
    n_ap = g.shape[0]
    for _ in range(iters):
        kmin = np.argmin(s)
        kmax = np.argmax(s)
        if kmin == kmax:
            break
        trial = eta.copy()
        for l in range(n_ap):
            delta = frac * trial[l, kmax]
            trial[l, kmax] -= delta
            trial[l, kmin] += delta
        s_new = sinr(g, trial, sigma2)
        evals += 1
        m = s_new.min()
        if m <= best:
            break
        eta = trial
        s = s_new
        best = m
    return eta, evals


@njit(cache=True, nogil=True)
def feasibility_inner(g, p_max, sigma2, target, max_iters, tol, eps):
    n_ap, n_ue = g.shape
    eta = channel_proportional(g, p_max)
    goal = target * (1.0 - tol)
    evals = 0
    for _ in range(max_iters):
        s = sinr(g, eta, sigma2)
        evals += 1
        if s.min() >= goal:
            return eta, True, evals
        for k in range(n_ue):
            d = target / max(s[k], eps)
            for l in range(n_ap):
                eta[l, k] *= d
        for l in range(n_ap):
            load = 0.0
            for k in range(n_ue):
                load += eta[l, k]
            if load > p_max[l]:
                r = p_max[l] / load
                for k in range(n_ue):
                    eta[l, k] *= r
    s = sinr(g, eta, sigma2)
    evals += 1
    return eta, s.min() >= goal, evals


@njit(cache=True, nogil=True)
def _worst_sinr(g, eta, sigma2, load):
    n_ap, n_ue = g.shape
    for l in range(n_ap):
        acc = 0.0
        for k in range(n_ue):
            acc += eta[l, k]
        load[l] = acc
    worst = np.inf
    for k in range(n_ue):
        coh = 0.0
        interf = 0.0
        for l in range(n_ap):
            coh += np.sqrt(eta[l, k]) * g[l, k]
            interf += g[l, k] * g[l, k] * (load[l] - eta[l, k])
        if interf < 0.0:
            interf = 0.0
        v = coh * coh / (sigma2 + interf)
        if v < worst:
            worst = v
    return worst


@njit(cache=True, nogil=True)
def _grid_kernel(g, p_max, sigma2, comp):
    n_ap, n_ue = g.shape
    n_comp = comp.shape[0]
    total = n_comp**n_ap
    digits = np.zeros(n_ap, dtype=np.int64)
    eta = np.empty((n_ap, n_ue))
    load = np.empty(n_ap)
    best_val = -1.0
    best_idx = 0
    for l in range(n_ap):
        for k in range(n_ue):
            eta[l, k] = comp[0, k] * p_max[l]
    for idx in range(total):
        if idx > 0:
            # mixed-radix increment, last AP fastest; only touched rows refresh
            l = n_ap - 1
            while True:
                digits[l] += 1
                if digits[l] < n_comp:
                    break
                digits[l] = 0
                for k in range(n_ue):
                    eta[l, k] = comp[0, k] * p_max[l]
                l -= 1
            for k in range(n_ue):
                eta[l, k] = comp[digits[l], k] * p_max[l]
        worst = _worst_sinr(g, eta, sigma2, load)
        if worst > best_val:
            best_val = worst
            best_idx = idx
    rem = best_idx
    for l in range(n_ap - 1, -1, -1):
        digits[l] = rem % n_comp
        rem //= n_comp
    for l in range(n_ap):
        for k in range(n_ue):
            eta[l, k] = comp[digits[l], k] * p_max[l]
    return eta, best_val


@njit(cache=True, nogil=True)
def _compositions(k, resolution, count):
    out = np.zeros((count, k), dtype=np.float64)
    c = np.zeros(k, dtype=np.int64)
    c[k - 1] = resolution
    for row in range(count):
        for j in range(k):
            out[row, j] = c[j] / resolution
        if k == 1 or row == count - 1:
            break
        # lexicographic successor: bump the last slot whose suffix is nonzero
        if c[k - 1] > 0:
            j = k - 2
        else:
            j = k - 2
            while c[j] == 0:
                j -= 1
            j -= 1
        c[j] += 1
        head = 0
        for i in range(j + 1):
            head += c[i]
        for i in range(j + 1, k - 1):
            c[i] = 0
        c[k - 1] = resolution - head
    return out


def grid_search(g, p_max, sigma2, resolution):
    n_ue = g.shape[1]
    comp = _compositions(n_ue, resolution, comb(resolution + n_ue - 1, n_ue - 1))
    eta, best = _grid_kernel(g, p_max, sigma2, comp)
    return eta, float(best)
