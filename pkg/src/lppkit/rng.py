"""Counter-based random numbers for reproducible lattice environments.

The generator is Philox4x32-10 (Salmon et al., Random123).  A vertex weight
is a pure function of the tuple (master_seed, stream_tag, x, y):

    counter = (x, y, tag_lo32, tag_hi32)      key = (seed_lo32, seed_hi32)
    y0..y3  = philox4x32_10(counter, key)
    u64     = (y0 << 32) | y1
    u'      = (u64 >> 11) / 2**53             # uniform on [0, 1 - 2**-53]

u' feeds the inverse CDF of the configured distribution.  This mapping is the
project's fixed convention: it is implemented exactly once (in the jitted
helpers below, which the pure-python wrappers call), so streaming and stored
engines, and any worker count, see bit-identical environments.

Distribution codes (used by the jitted kernels):

    0  Constant(v)          weight = p1
    1  Exponential(rate)    weight = -log1p(-u') / p1
    2  Geometric(q)         weight = floor(log1p(-u') / log(q)),  mass (1-q) q^j on j >= 0
    3  Weibull(alpha, c)    weight = (-log1p(-u') / p2) ** (1/p1), survival exp(-c t^alpha)
    4  UniformInt(a, b)     weight = a + floor(u' * (b - a + 1))
"""

from __future__ import annotations

import math

import numpy as np
from numba import njit

# Philox4x32 round multipliers and Weyl key increments (Random123 reference).
_M0 = np.uint64(0xD2511F53)
_M1 = np.uint64(0xCD9E8D57)
_W0 = np.uint64(0x9E3779B9)
_W1 = np.uint64(0xBB67AE85)
_MASK32 = np.uint64(0xFFFFFFFF)
_SHIFT32 = np.uint64(32)
_U53_SHIFT = np.uint64(11)
_U53_SCALE = 1.0 / 9007199254740992.0  # 2**-53

DIST_CONSTANT = 0
DIST_EXPONENTIAL = 1
DIST_GEOMETRIC = 2
DIST_WEIBULL = 3
DIST_UNIFORM_INT = 4


@njit(cache=True, inline="always")
def _philox4x32_10(c0, c1, c2, c3, k0, k1):
    """One Philox4x32-10 block; inputs/outputs are uint64 holding 32-bit words."""
    for _ in range(10):
        p0 = _M0 * c0
        p1 = _M1 * c2
        hi0 = p0 >> _SHIFT32
        lo0 = p0 & _MASK32
        hi1 = p1 >> _SHIFT32
        lo1 = p1 & _MASK32
        n0 = (hi1 ^ c1 ^ k0) & _MASK32
        n2 = (hi0 ^ c3 ^ k1) & _MASK32
        c0, c1, c2, c3 = n0, lo1, n2, lo0
        k0 = (k0 + _W0) & _MASK32
        k1 = (k1 + _W1) & _MASK32
    return c0, c1, c2, c3


@njit(cache=True, inline="always")
def _uniform53(seed, tag, x, y):
    """The fixed u' draw for lattice site (x, y) under (seed, tag)."""
    c0 = np.uint64(x) & _MASK32
    c1 = np.uint64(y) & _MASK32
    c2 = np.uint64(tag) & _MASK32
    c3 = (np.uint64(tag) >> _SHIFT32) & _MASK32
    k0 = np.uint64(seed) & _MASK32
    k1 = (np.uint64(seed) >> _SHIFT32) & _MASK32
    y0, y1, _, _ = _philox4x32_10(c0, c1, c2, c3, k0, k1)
    u64 = (y0 << _SHIFT32) | y1
    return float(u64 >> _U53_SHIFT) * _U53_SCALE


@njit(cache=True, inline="always")
def _inv_cdf(u, dist_id, p1, p2):
    if dist_id == 0:  # constant
        return p1
    if dist_id == 1:  # exponential(rate)
        return -math.log1p(-u) / p1
    if dist_id == 2:  # geometric(q), support {0,1,...}
        if u <= 0.0:
            return 0.0
        return math.floor(math.log1p(-u) / math.log(p1))
    if dist_id == 3:  # weibull: survival exp(-c t^alpha), p1=alpha, p2=c
        return (-math.log1p(-u) / p2) ** (1.0 / p1)
    # uniform integer on [a, b], p1=a, p2=b
    return p1 + math.floor(u * (p2 - p1 + 1.0))


@njit(cache=True, inline="always")
def site_weight(seed, tag, x, y, dist_id, p1, p2):
    return _inv_cdf(_uniform53(seed, tag, x, y), dist_id, p1, p2)


@njit(cache=True)
def fill_rectangle(seed, tag, x0, y0, out, dist_id, p1, p2):
    """Materialize weights for the rectangle [x0, x0+W) x [y0, y0+H) into out[W, H]."""
    w, h = out.shape
    for i in range(w):
        for j in range(h):
            out[i, j] = site_weight(seed, tag, x0 + i, y0 + j, dist_id, p1, p2)


def philox4x32_10(counter, key):
    """Pure-python reference of the block function; used by tests as an oracle."""
    c = [w & 0xFFFFFFFF for w in counter]
    k0, k1 = key[0] & 0xFFFFFFFF, key[1] & 0xFFFFFFFF
    for _ in range(10):
        p0 = 0xD2511F53 * c[0]
        p1 = 0xCD9E8D57 * c[2]
        c = [
            ((p1 >> 32) ^ c[1] ^ k0) & 0xFFFFFFFF,
            p1 & 0xFFFFFFFF,
            ((p0 >> 32) ^ c[3] ^ k1) & 0xFFFFFFFF,
            p0 & 0xFFFFFFFF,
        ]
        k0 = (k0 + 0x9E3779B9) & 0xFFFFFFFF
        k1 = (k1 + 0xBB67AE85) & 0xFFFFFFFF
    return tuple(c)


def uniform53(seed, tag, x, y):
    """Pure-python u' for one site, bit-identical to the jitted path."""
    y0, y1, _, _ = philox4x32_10(
        (x, y, tag & 0xFFFFFFFF, (tag >> 32) & 0xFFFFFFFF),
        (seed & 0xFFFFFFFF, (seed >> 32) & 0xFFFFFFFF),
    )
    return ((y0 << 32 | y1) >> 11) * _U53_SCALE


def inverse_cdf(u, dist_id, p1, p2):
    """Pure-python inverse CDF matching ``_inv_cdf`` exactly."""
    if dist_id == DIST_CONSTANT:
        return p1
    if dist_id == DIST_EXPONENTIAL:
        return -math.log1p(-u) / p1
    if dist_id == DIST_GEOMETRIC:
        if u <= 0.0:
            return 0.0
        return math.floor(math.log1p(-u) / math.log(p1))
    if dist_id == DIST_WEIBULL:
        return (-math.log1p(-u) / p2) ** (1.0 / p1)
    if dist_id == DIST_UNIFORM_INT:
        return p1 + math.floor(u * (p2 - p1 + 1.0))
    raise ValueError(f"unknown distribution code {dist_id}")
