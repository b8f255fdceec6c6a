"""Streaming batch kernels for Monte Carlo: column-sweep dynamic programs
that regenerate weights from the counter-based generator on the fly, with
memory proportional to the lattice width.

The recurrences and float operations are identical to the stored engine in
:mod:`lppkit.passage`, so the two agree bit-exactly on shared queries.
Trial t of a batch uses stream tag ``tag0 + t``; every output slot depends
only on (seed, tag, query), so results are independent of threading and
batching.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .rng import site_weight

NEG_INF = -np.inf


@njit(cache=True)
def batch_point_weights(seed, tag0, ntrials, r, z, dist_id, p1, p2):
    """X_{(1,1),(r-z, r+z)} for each trial."""
    W = r - z
    H = r + z
    out = np.empty(ntrials, dtype=np.float64)
    col = np.empty(H + 1, dtype=np.float64)
    for t in range(ntrials):
        tag = tag0 + np.uint64(t)
        col[0] = NEG_INF
        for x in range(1, W + 1):
            for y in range(1, H + 1):
                w = site_weight(seed, tag, x, y, dist_id, p1, p2)
                if x == 1:
                    base = 0.0 if y == 1 else col[y - 1]
                else:
                    a = col[y]
                    b = col[y - 1]
                    base = a if a >= b else b
                col[y] = w + base if base > NEG_INF else NEG_INF
        out[t] = col[H]
    return out


@njit(cache=True)
def batch_profile(seed, tag0, ntrials, xmax, ymax, level, dist_id, p1, p2):
    """X_{(1,1), (x, level-x)} for all x on the antidiagonal, per trial.

    Returns (xs, out) with out[t, i] the weight to (xs[i], level - xs[i]);
    one environment per trial shared across the whole profile.
    """
    xlo = max(1, level - ymax)
    xhi = min(xmax, level - 1)
    npts = xhi - xlo + 1
    xs = np.arange(xlo, xhi + 1)
    out = np.full((ntrials, npts), NEG_INF)
    col = np.empty(ymax + 1, dtype=np.float64)
    for t in range(ntrials):
        tag = tag0 + np.uint64(t)
        col[0] = NEG_INF
        for x in range(1, xhi + 1):
            for y in range(1, ymax + 1):
                w = site_weight(seed, tag, x, y, dist_id, p1, p2)
                if x == 1:
                    base = 0.0 if y == 1 else col[y - 1]
                else:
                    a = col[y]
                    b = col[y - 1]
                    base = a if a >= b else b
                col[y] = w + base if base > NEG_INF else NEG_INF
            yq = level - x
            if x >= xlo and 1 <= yq <= ymax:
                out[t, x - xlo] = col[yq]
    return xs, out


@njit(cache=True)
def batch_constrained(seed, tag0, ntrials, r, z, allow, dist_id, p1, p2):
    """Constrained weight X_r^U per trial; allow[(x-1), (y-1)] is the
    membership mask over the window [1, r-z] x [1, r+z]."""
    W = r - z
    H = r + z
    out = np.empty(ntrials, dtype=np.float64)
    col = np.empty(H + 1, dtype=np.float64)
    for t in range(ntrials):
        tag = tag0 + np.uint64(t)
        col[0] = NEG_INF
        for x in range(1, W + 1):
            for y in range(1, H + 1):
                if not allow[x - 1, y - 1]:
                    col[y] = NEG_INF
                    continue
                w = site_weight(seed, tag, x, y, dist_id, p1, p2)
                if x == 1:
                    base = 0.0 if y == 1 else col[y - 1]
                else:
                    a = col[y]
                    b = col[y - 1]
                    base = a if a >= b else b
                col[y] = w + base if base > NEG_INF else NEG_INF
        out[t] = col[H]
    return out


@njit(cache=True)
def batch_geodesic_tf(seed, tag0, ntrials, r, z, dist_id, p1, p2):
    """tf of the leftmost geodesic (1,1) -> (r-z, r+z) per trial, as
    max |(r+z) x - (r-z) y| / r over the backtracked path."""
    W = r - z
    H = r + z
    out = np.empty(ntrials, dtype=np.float64)
    D = np.empty((W, H), dtype=np.float64)
    for t in range(ntrials):
        tag = tag0 + np.uint64(t)
        for x in range(1, W + 1):
            for y in range(1, H + 1):
                w = site_weight(seed, tag, x, y, dist_id, p1, p2)
                if x == 1 and y == 1:
                    base = 0.0
                elif x == 1:
                    base = D[0, y - 2]
                elif y == 1:
                    base = D[x - 2, 0]
                else:
                    a = D[x - 2, y - 1]
                    b = D[x - 1, y - 2]
                    base = a if a >= b else b
                D[x - 1, y - 1] = w + base
        # backtrack with the smaller-x-predecessor tie-break
        x, y = W, H
        m = abs((r + z) * x - (r - z) * y)
        while x > 1 or y > 1:
            if x == 1:
                y -= 1
            elif y == 1:
                x -= 1
            elif D[x - 2, y - 1] >= D[x - 1, y - 2]:
                x -= 1
            else:
                y -= 1
            num = abs((r + z) * x - (r - z) * y)
            if num > m:
                m = num
        out[t] = m / r
    return out


@njit(cache=True)
def batch_weibull_sums(seed, tag0, ntrials, k, alpha, c, mean):
    """Centered sums S_t = sum_{i=1..k} (W_i - mean) of Weibull draws with
    survival exp(-c t^alpha); draw i of trial t is keyed to site (i, 1)."""
    out = np.empty(ntrials, dtype=np.float64)
    for t in range(ntrials):
        tag = tag0 + np.uint64(t)
        s = 0.0
        comp = 0.0  # Kahan compensation, k can be large
        for i in range(1, k + 1):
            w = site_weight(seed, tag, i, 1, 3, alpha, c) - mean
            yv = w - comp
            tv = s + yv
            comp = (tv - s) - yv
            s = tv
        out[t] = s
    return out
