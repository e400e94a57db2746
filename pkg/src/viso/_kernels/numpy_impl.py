"""Vectorized numpy kernels. Reference path when numba is disabled."""

from __future__ import annotations

import numpy as np

# Max grid points evaluated per chunk in the oracle enumeration.
_CHUNK = 1 << 16


def sinr(g, eta, sigma2):
    num = (np.sqrt(eta) * g).sum(axis=0) ** 2
    g2 = g * g
    load = eta.sum(axis=1)
    interf = g2.T @ load - (g2 * eta).sum(axis=0)
    # exact-cancellation residue can go a hair negative
    np.maximum(interf, 0.0, out=interf)
    return num / (sigma2 + interf)


def channel_proportional(g, p_max):
    g2 = g * g
    tot = g2.sum(axis=1, keepdims=True)
    safe = np.where(tot > 0.0, tot, 1.0)
    return np.where(tot > 0.0, p_max[:, None] * g2 / safe, 0.0)


def fast_loop(g, p_max, sigma2, iters, frac):
    eta = channel_proportional(g, p_max)
    s = sinr(g, eta, sigma2)
    evals = 1
    best = s.min()
    for _ in range(iters):
        kmin = int(np.argmin(s))
        kmax = int(np.argmax(s))
        if kmin == kmax:
            break
        trial = eta.copy()
        delta = frac * trial[:, kmax]
        trial[:, kmax] -= delta
        trial[:, kmin] += delta
        s_new = sinr(g, trial, sigma2)
        evals += 1
        if s_new.min() <= best:
            break
        eta = trial
        s = s_new
        best = s_new.min()
    return eta, evals


def feasibility_inner(g, p_max, sigma2, target, max_iters, tol, eps):
    eta = channel_proportional(g, p_max)
    goal = target * (1.0 - tol)
    evals = 0
    for _ in range(max_iters):
        s = sinr(g, eta, sigma2)
        evals += 1
        if s.min() >= goal:
            return eta, True, evals
        eta = eta * (target / np.maximum(s, eps))[None, :]
        load = eta.sum(axis=1)
        over = load > p_max
        if over.any():
            eta[over] *= (p_max[over] / load[over])[:, None]
    s = sinr(g, eta, sigma2)
    evals += 1
    return eta, bool(s.min() >= goal), evals


def compositions(k, resolution):
    """All nonnegative integer K-vectors summing to ``resolution``, lexicographic."""
    # grow prefixes with sum <= resolution one coordinate at a time
    prefix = np.zeros((1, 0), dtype=np.int64)
    used = np.zeros(1, dtype=np.int64)
    for _ in range(k - 1):
        counts = resolution - used + 1
        rows = np.repeat(np.arange(prefix.shape[0]), counts)
        starts = np.cumsum(counts) - counts
        vals = np.arange(rows.size, dtype=np.int64) - np.repeat(starts, counts)
        prefix = np.column_stack([prefix[rows], vals])
        used = used[rows] + vals
    return np.column_stack([prefix, resolution - used])


def grid_search(g, p_max, sigma2, resolution):
    n_ap, n_ue = g.shape
    comp = compositions(n_ue, resolution).astype(np.float64) / resolution
    n_comp = comp.shape[0]
    total = n_comp**n_ap
    best_val = -1.0
    best_idx = 0
    g2 = g * g
    for start in range(0, total, _CHUNK):
        flat = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        # mixed-radix decode, last AP fastest
        digits = np.empty((flat.size, n_ap), dtype=np.int64)
        rem = flat.copy()
        for l in range(n_ap - 1, -1, -1):
            digits[:, l] = rem % n_comp
            rem //= n_comp
        eta = comp[digits] * p_max[None, :, None]  # (B, L, K)
        num = (np.sqrt(eta) * g[None]).sum(axis=1) ** 2
        load = eta.sum(axis=2)
        interf = load @ g2 - (g2[None] * eta).sum(axis=1)
        np.maximum(interf, 0.0, out=interf)
        worst = (num / (sigma2 + interf)).min(axis=1)
        i = int(np.argmax(worst))
        if worst[i] > best_val:
            best_val = float(worst[i])
            best_idx = int(flat[i])
    digits = np.empty(n_ap, dtype=np.int64)
    rem = best_idx
    for l in range(n_ap - 1, -1, -1):
        digits[l] = rem % n_comp
        rem //= n_comp
    eta = comp[digits] * p_max[:, None]
    return eta, best_val
