"""Exact dynamic-programming engines for passage weights.

All weights are maxima of ell(gamma) = sum of vertex weights over up-right
paths, with both endpoint weights included.  Values live in the reals plus a
bottom sentinel (float('-inf'), serialized as the string "-inf") for empty
maximizations, matching the convention X_{u,v} = -infinity for unordered
pairs.

The stored engine here works on a materialized :class:`~lppkit.env.Field`
window; the streaming engine (module :mod:`lppkit.streaming`) recomputes the
same recurrences on the fly with O(width) memory.  Both perform the identical
float operations in the identical order, so they agree bit-exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from numba import njit

from .env import Field, ParallelogramSpec, Vertex, precedes, transversal_numerator

BOTTOM = float("-inf")

NEG_INF = -np.inf


@njit(cache=True)
def _dp_corner(W):
    """D[i, j] = best weight of a path from (0, 0) to (i, j) in window coords."""
    nx, ny = W.shape
    D = np.empty((nx, ny), dtype=np.float64)
    D[0, 0] = W[0, 0]
    for j in range(1, ny):
        D[0, j] = D[0, j - 1] + W[0, j]
    for i in range(1, nx):
        D[i, 0] = D[i - 1, 0] + W[i, 0]
        for j in range(1, ny):
            a = D[i - 1, j]
            b = D[i, j - 1]
            D[i, j] = W[i, j] + (a if a >= b else b)
    return D


@njit(cache=True)
def _profile_sweep(W, level):
    """Column sweep from corner (0,0); returns the DP values on the
    window antidiagonal i + j = level with O(height) scratch."""
    nx, ny = W.shape
    col = np.empty(ny + 1, dtype=np.float64)
    col[0] = NEG_INF
    out = np.full(min(level, nx - 1) + 1, NEG_INF)
    for i in range(nx):
        for j in range(1, ny + 1):
            w = W[i, j - 1]
            if i == 0:
                base = 0.0 if j == 1 else col[j - 1]
            else:
                a = col[j]
                b = col[j - 1]
                base = a if a >= b else b
            col[j] = w + base if base > NEG_INF else NEG_INF
        jq = level - i
        if 0 <= jq < ny:
            out[i] = col[jq + 1]
    return out


@njit(cache=True)
def _dp_from_sources(W, src, allow):
    """D[i, j] = best weight of a path starting at a source vertex and ending
    at (i, j), visiting only allowed vertices; -inf when no such path."""
    nx, ny = W.shape
    D = np.full((nx, ny), NEG_INF)
    for i in range(nx):
        for j in range(ny):
            if not allow[i, j]:
                continue
            best = NEG_INF
            if i > 0 and D[i - 1, j] > best:
                best = D[i - 1, j]
            if j > 0 and D[i, j - 1] > best:
                best = D[i, j - 1]
            if src[i, j] and best < 0.0:
                best = 0.0
            if best > NEG_INF:
                D[i, j] = W[i, j] + best
    return D


@njit(cache=True)
def _dp_exceeding(W, src, inside):
    """Two-layer DP for paths that must leave the strip.

    Layer 0 tracks paths confined to the strip so far; layer 1 tracks paths
    that have visited at least one vertex outside it.  Returns the layer-1
    table.
    """
    nx, ny = W.shape
    D0 = np.full((nx, ny), NEG_INF)
    D1 = np.full((nx, ny), NEG_INF)
    for i in range(nx):
        for j in range(ny):
            p0 = NEG_INF
            p1 = NEG_INF
            if i > 0:
                if D0[i - 1, j] > p0:
                    p0 = D0[i - 1, j]
                if D1[i - 1, j] > p1:
                    p1 = D1[i - 1, j]
            if j > 0:
                if D0[i, j - 1] > p0:
                    p0 = D0[i, j - 1]
                if D1[i, j - 1] > p1:
                    p1 = D1[i, j - 1]
            if inside[i, j]:
                if src[i, j] and p0 < 0.0:
                    p0 = 0.0
                if p0 > NEG_INF:
                    D0[i, j] = W[i, j] + p0
                if p1 > NEG_INF:
                    D1[i, j] = W[i, j] + p1
            else:
                if src[i, j] and p0 < 0.0:
                    p0 = 0.0
                if p0 > p1:
                    p1 = p0
                if p1 > NEG_INF:
                    D1[i, j] = W[i, j] + p1
    return D1


@dataclass(frozen=True)
class SetSpec:
    """A set of vertices: a point, an antidiagonal interval or line, or an
    explicit vertex list.

    Interval/line kinds live on the single antidiagonal x + y = level;
    interval positions are x - y in [lo, hi] (parity matching the level).
    """

    kind: str
    level: int = 0
    lo: int = 0
    hi: int = 0
    verts: tuple = ()

    @staticmethod
    def point(v: Vertex) -> "SetSpec":
        return SetSpec("point", verts=(v,))

    @staticmethod
    def interval(level: int, lo: int, hi: int) -> "SetSpec":
        if lo > hi:
            raise ValueError("interval needs lo <= hi")
        return SetSpec("interval", level=level, lo=lo, hi=hi)

    @staticmethod
    def line(level: int) -> "SetSpec":
        return SetSpec("line", level=level)

    @staticmethod
    def vertices(vs) -> "SetSpec":
        vs = tuple(sorted(set(vs)))
        if not vs:
            raise ValueError("vertex list must be nonempty")
        return SetSpec("list", verts=vs)

    def vertices_in(self, field: Field) -> list:
        """Materialize the set clipped to the field window."""
        if self.kind == "point":
            return [v for v in self.verts if field.contains(v)]
        if self.kind == "list":
            return [v for v in self.verts if field.contains(v)]
        out = []
        lev = self.level
        if self.kind == "line":
            dlo = lev - 2 * field.y1
            dhi = lev - 2 * field.y0
        else:
            dlo, dhi = self.lo, self.hi
        # x = (lev + d)/2 must be integral: d must match the level's parity
        start = dlo if (lev + dlo) % 2 == 0 else dlo + 1
        for d in range(start, dhi + 1, 2):
            x = (lev + d) // 2
            y = (lev - d) // 2
            if field.x0 <= x <= field.x1 and field.y0 <= y <= field.y1:
                out.append(Vertex(x, y))
        return out

    def midpoint(self) -> Vertex:
        """A representative central vertex (median in sorted order for lists)."""
        if self.kind in ("point", "list"):
            return self.verts[len(self.verts) // 2]
        if self.kind == "interval":
            mid = (self.lo + self.hi) // 2
            if (self.level + mid) % 2 != 0:
                mid += 1
            return Vertex((self.level + mid) // 2, (self.level - mid) // 2)
        return Vertex(self.level // 2, self.level - self.level // 2)


def _window(field: Field, xlo, xhi, ylo, yhi):
    """Slice the field window [xlo..xhi] x [ylo..yhi]; caller guarantees bounds."""
    if not (field.x0 <= xlo and xhi <= field.x1 and field.y0 <= ylo and yhi <= field.y1):
        raise ValueError("query window exceeds the materialized field bounds")
    return field.data[xlo - field.x0 : xhi - field.x0 + 1,
                      ylo - field.y0 : yhi - field.y0 + 1]


def point_to_point(field: Field, u: Vertex, v: Vertex) -> float:
    """X_{u,v}: exact maximum of ell(gamma) over up-right paths u -> v.

    Returns BOTTOM when u does not precede v.
    """
    if not (field.contains(u) and field.contains(v)):
        raise ValueError("endpoints outside field bounds")
    if not precedes(u, v):
        return BOTTOM
    W = _window(field, u.x, v.x, u.y, v.y)
    return float(_dp_corner(W)[-1, -1])


def corner_table(field: Field, u: Vertex, v: Vertex) -> np.ndarray:
    """Full DP table of X_{u, .} over the rectangle [u, v] (for backtracking)."""
    if not precedes(u, v):
        raise ValueError("corner_table needs u preceding v")
    return _dp_corner(_window(field, u.x, v.x, u.y, v.y))


def passage_profile(field: Field, start: Vertex, target_level: int) -> dict:
    """X_{start, v} for every in-bounds v with v.x + v.y = target_level.

    One column sweep with O(height) scratch (not O(area)); agrees with
    point_to_point entrywise and bit-exactly with the streaming engine.
    """
    if target_level < start.level:
        raise ValueError("target level precedes the start vertex")
    if target_level == start.level:
        return {start: field.weight(start)}
    xhi = min(field.x1, target_level - start.y)
    yhi = min(field.y1, target_level - start.x)
    if xhi < start.x or yhi < start.y:
        return {}
    W = _window(field, start.x, xhi, start.y, yhi)
    vals = _profile_sweep(W, target_level - start.level)
    out = {}
    for x in range(max(start.x, target_level - yhi), xhi + 1):
        y = target_level - x
        if start.y <= y <= yhi:
            out[Vertex(x, y)] = float(vals[x - start.x])
    return out


def _masks_for(field, xlo, xhi, ylo, yhi, A_verts, B_verts):
    nx, ny = xhi - xlo + 1, yhi - ylo + 1
    src = np.zeros((nx, ny), dtype=bool)
    for a in A_verts:
        if xlo <= a.x <= xhi and ylo <= a.y <= yhi:
            src[a.x - xlo, a.y - ylo] = True
    tgt = [b for b in B_verts if xlo <= b.x <= xhi and ylo <= b.y <= yhi]
    return src, tgt


def set_to_set(field: Field, A: SetSpec, B: SetSpec) -> float:
    """X_{A,B} = sup over ordered pairs (u, v) in A x B of X_{u,v}."""
    A_verts = A.vertices_in(field)
    B_verts = B.vertices_in(field)
    if not A_verts or not B_verts:
        raise ValueError("set_to_set requires nonempty vertex sets")
    xlo = min(a.x for a in A_verts)
    ylo = min(a.y for a in A_verts)
    xhi = max(b.x for b in B_verts)
    yhi = max(b.y for b in B_verts)
    if xhi < xlo or yhi < ylo:
        return BOTTOM
    W = _window(field, xlo, xhi, ylo, yhi)
    src, tgt = _masks_for(field, xlo, xhi, ylo, yhi, A_verts, B_verts)
    if not src.any() or not tgt:
        return BOTTOM
    D = _dp_from_sources(W, src, np.ones_like(src))
    best = BOTTOM
    for b in tgt:
        val = D[b.x - xlo, b.y - ylo]
        if val > best:
            best = float(val)
    return best


def constrained_weight(field: Field, U: ParallelogramSpec) -> float:
    """X_r^U: best weight from (1,1) to (r-z, r+z) over paths inside U."""
    u, v = U.start, U.end
    if not (U.contains(u) and U.contains(v)):
        raise ValueError("parallelogram does not contain its own endpoints")
    if not (field.contains(u) and field.contains(v)):
        raise ValueError("endpoints outside field bounds")
    W = _window(field, u.x, v.x, u.y, v.y)
    allow = U.membership_mask(u.x, u.y, W.shape[0], W.shape[1])
    src = np.zeros_like(allow)
    src[0, 0] = True
    D = _dp_from_sources(W, src, allow)
    return float(D[-1, -1])


def constrained_between(field: Field, U_list, u: Vertex, v: Vertex) -> float:
    """Best weight of a u -> v path inside the intersection of the given
    parallelograms; BOTTOM when infeasible."""
    if not precedes(u, v):
        return BOTTOM
    W = _window(field, u.x, v.x, u.y, v.y)
    allow = np.ones(W.shape, dtype=bool)
    for U in U_list:
        allow &= U.membership_mask(u.x, u.y, W.shape[0], W.shape[1])
    if not (allow[0, 0] and allow[-1, -1]):
        return BOTTOM
    src = np.zeros_like(allow)
    src[0, 0] = True
    D = _dp_from_sources(W, src, allow)
    return float(D[-1, -1])


def split_chain(field: Field, r: int, k: int):
    """Super-additive block chain: k point-to-point weights between consecutive
    diagonal blocks of height floor(r/k), consecutive starts offset by (1,0).

    Returns (terms, total); total <= X_r holds exactly per environment because
    the blocks concatenate into one feasible path.
    """
    if not (1 <= k <= r):
        raise ValueError(f"need 1 <= k <= r, got k={k}, r={r}")
    q = r // k
    terms = []
    for i in range(k):
        u = Vertex(1, 1) if i == 0 else Vertex(i * q + 1, i * q)
        v = Vertex((i + 1) * q, (i + 1) * q)
        terms.append(point_to_point(field, u, v))
    return terms, math.fsum(terms)


def constrained_split_chain(field: Field, U: ParallelogramSpec, k: int):
    """Super-additive chain of constrained weights: sub-parallelograms of
    height r/k and width min(ell r^(2/3), (r/k)^(2/3)), clipped to U, linked
    with the (1,0) offset.  Sum of terms <= constrained_weight(U) exactly.
    """
    r, z = U.r, U.z
    if not (1 <= k <= r):
        raise ValueError(f"need 1 <= k <= r, got k={k}, r={r}")
    rk = r // k
    # width min(ell r^(2/3), (r/k)^(2/3)) in lattice units, stored as cube
    w_cap_cubed = min(U.ell_cubed * r * r, Fraction(rk * rk))
    ends = [Vertex(1, 1)]
    for i in range(1, k + 1):
        ends.append(Vertex(i * (r - z) // k, i * (r + z) // k))
    terms = []
    for i in range(1, k + 1):
        u = ends[i - 1] if i == 1 else Vertex(ends[i - 1].x + 1, ends[i - 1].y)
        v = ends[i]
        sub = _TranslatedSlab(u, v, w_cap_cubed)
        terms.append(_constrained_slab(field, sub, U))
    return terms, math.fsum(terms)


@dataclass(frozen=True)
class _TranslatedSlab:
    """Strip of |t| <= w/2 around the line through u and v, between their levels."""

    u: Vertex
    v: Vertex
    width_cubed: Fraction  # (w in lattice units)^3

    def membership_mask(self, x0, y0, w, h):
        dx = self.v.x - self.u.x
        dy = self.v.y - self.u.y
        denom = dx + dy
        xs = np.arange(x0, x0 + w, dtype=np.int64)[:, None] - self.u.x
        ys = np.arange(y0, y0 + h, dtype=np.int64)[None, :] - self.u.y
        lev = xs + ys
        in_band = (lev >= 0) & (lev <= denom)
        if denom == 0:
            return in_band
        # t = (u1*dy - u2*dx)/denom, membership |t| <= w/2  <=>  |2 num|^3 <= w^3 denom^3
        num = xs * dy - ys * dx
        wc = self.width_cubed
        peak = int(np.abs(num).max()) if num.size else 0
        lhs_max = (2 * peak) ** 3 * wc.denominator  # python ints, no overflow
        rhs = wc.numerator * denom**3
        if lhs_max < 2**62 and abs(rhs) < 2**62:
            lhs = (2 * np.abs(num)) ** 3 * int(wc.denominator)
            return in_band & (lhs <= int(rhs))
        out = np.zeros((w, h), dtype=bool)
        for i in range(w):
            for j in range(h):
                if in_band[i, j]:
                    out[i, j] = (
                        Fraction(int(2 * abs(num[i, j])) ** 3) <= wc * denom**3
                    )
        return out


def _constrained_slab(field: Field, slab: _TranslatedSlab, U: ParallelogramSpec) -> float:
    u, v = slab.u, slab.v
    if not precedes(u, v):
        return BOTTOM
    W = _window(field, u.x, v.x, u.y, v.y)
    allow = slab.membership_mask(u.x, u.y, W.shape[0], W.shape[1])
    allow &= U.membership_mask(u.x, u.y, W.shape[0], W.shape[1])
    if not (allow[0, 0] and allow[-1, -1]):
        return BOTTOM
    src = np.zeros_like(allow)
    src[0, 0] = True
    D = _dp_from_sources(W, src, allow)
    return float(D[-1, -1])


def max_weight_exceeding_tf(field: Field, A: SetSpec, B: SetSpec,
                            strip_halfwidth, reference_z: int = 0) -> float:
    """Best weight among A -> B paths containing at least one vertex with
    |t(v)| > strip_halfwidth, where t is measured (in antidiagonal step
    units) from the line through the origin with slope (r+z)/(r-z); r is half
    the level of B's midpoint and z = reference_z.

    BOTTOM when no path achieves the excursion.
    """
    A_verts = A.vertices_in(field)
    B_verts = B.vertices_in(field)
    if not A_verts or not B_verts:
        raise ValueError("max_weight_exceeding_tf requires nonempty vertex sets")
    r_hat = B.midpoint().level // 2
    z = reference_z
    if abs(z) >= r_hat:
        raise ValueError("|reference_z| must be < height of B's midpoint")
    h = Fraction(strip_halfwidth)
    xlo = min(a.x for a in A_verts)
    ylo = min(a.y for a in A_verts)
    xhi = max(b.x for b in B_verts)
    yhi = max(b.y for b in B_verts)
    if xhi < xlo or yhi < ylo:
        return BOTTOM
    W = _window(field, xlo, xhi, ylo, yhi)
    src, tgt = _masks_for(field, xlo, xhi, ylo, yhi, A_verts, B_verts)
    if not src.any() or not tgt:
        return BOTTOM
    # inside means |t| <= h, i.e. |num| * h.denom <= 2 r_hat * h.numer
    xs = np.arange(xlo, xhi + 1, dtype=np.int64)[:, None]
    ys = np.arange(ylo, yhi + 1, dtype=np.int64)[None, :]
    max_num = (r_hat + abs(z)) * max(xhi, yhi)
    if max_num * h.denominator < 2**62 and 2 * r_hat * h.numerator < 2**62:
        num = (r_hat + z) * xs - (r_hat - z) * ys
        inside = np.abs(num) * int(h.denominator) <= int(2 * r_hat * h.numerator)
    else:
        inside = np.zeros(W.shape, dtype=bool)
        for i in range(W.shape[0]):
            for j in range(W.shape[1]):
                num = transversal_numerator(r_hat, z, xlo + i, ylo + j)
                inside[i, j] = Fraction(abs(num)) <= 2 * r_hat * h
    D1 = _dp_exceeding(W, src, inside)
    best = BOTTOM
    for b in tgt:
        val = D1[b.x - xlo, b.y - ylo]
        if val > best:
            best = float(val)
    return best


def serialize_value(x: float):
    """JSON-safe value: the bottom sentinel becomes the string '-inf'."""
    if x == BOTTOM:
        return "-inf"
    return x


def deserialize_value(x) -> float:
    if x == "-inf":
        return BOTTOM
    return float(x)
