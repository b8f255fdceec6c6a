"""Deterministic weight environments on Z^2 and antidiagonal lattice geometry.

Coordinates are 1-based: a vertex (x, y) has column x >= 1 and row y >= 1.
The antidiagonal level of v is x + y; the position along an antidiagonal is
x - y.  The transversal coordinate t(v) relative to the line through the
origin with slope (r+z)/(r-z) is

    t(v) = ((r+z) x - (r-z) y) / (2 r),

i.e. v + t(-1, 1) lies on the line; at z = 0 this is (x - y)/2.  Strips and
parallelograms are half-width conditions |t| <= w/2, compared exactly with
integer cross-multiplication (no floats in the comparison).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from . import rng


@dataclass(frozen=True, order=True)
class Vertex:
    """Lattice vertex; comparison operators sort lexicographically, the
    coordinatewise partial order is :func:`precedes`."""

    x: int
    y: int

    def __post_init__(self):
        if self.x < 1 or self.y < 1:
            raise ValueError(f"vertex coordinates must be >= 1, got {(self.x, self.y)}")

    @property
    def level(self) -> int:
        return self.x + self.y

    def as_tuple(self):
        return (self.x, self.y)


def precedes(u: Vertex, v: Vertex) -> bool:
    """u precedes v in the coordinatewise partial order."""
    return u.x <= v.x and u.y <= v.y


_DIST_KINDS = {
    "constant": (rng.DIST_CONSTANT, ("value",)),
    "exponential": (rng.DIST_EXPONENTIAL, ("rate",)),
    "geometric": (rng.DIST_GEOMETRIC, ("q",)),
    "weibull": (rng.DIST_WEIBULL, ("alpha", "c")),
    "uniform_int": (rng.DIST_UNIFORM_INT, ("a", "b")),
}


@dataclass(frozen=True)
class DistributionSpec:
    """A nonnegative vertex-weight law plus its inverse-CDF parameters."""

    kind: str
    params: tuple = ()

    def __post_init__(self):
        if self.kind not in _DIST_KINDS:
            raise ValueError(f"unknown distribution kind {self.kind!r}")
        names = _DIST_KINDS[self.kind][1]
        if len(self.params) != len(names):
            raise ValueError(f"{self.kind} needs params {names}, got {self.params}")
        k, p = self.kind, self.params
        if k == "exponential" and p[0] <= 0:
            raise ValueError("exponential rate must be positive")
        if k == "geometric" and not (0.0 < p[0] < 1.0):
            raise ValueError("geometric q must lie in (0,1)")
        if k == "weibull" and (p[0] <= 0 or p[1] <= 0):
            raise ValueError("weibull needs alpha > 0 and c > 0")
        if k == "constant" and p[0] < 0:
            raise ValueError("constant value must be nonnegative")
        if k == "uniform_int":
            a, b = p
            if not (0 <= a <= b) or int(a) != a or int(b) != b:
                raise ValueError("uniform_int needs integers 0 <= a <= b")

    # convenience constructors
    @staticmethod
    def exponential(rate=1.0):
        return DistributionSpec("exponential", (float(rate),))

    @staticmethod
    def geometric(q):
        return DistributionSpec("geometric", (float(q),))

    @staticmethod
    def weibull(alpha, c=1.0):
        return DistributionSpec("weibull", (float(alpha), float(c)))

    @staticmethod
    def constant(value):
        return DistributionSpec("constant", (float(value),))

    @staticmethod
    def uniform_int(a, b):
        return DistributionSpec("uniform_int", (int(a), int(b)))

    @property
    def code(self) -> int:
        return _DIST_KINDS[self.kind][0]

    @property
    def p1(self) -> float:
        return float(self.params[0])

    @property
    def p2(self) -> float:
        return float(self.params[1]) if len(self.params) > 1 else 0.0

    def to_config(self) -> dict:
        names = _DIST_KINDS[self.kind][1]
        d = {"kind": self.kind}
        d.update(zip(names, self.params))
        return d

    @staticmethod
    def from_config(d: dict) -> "DistributionSpec":
        if "kind" not in d:
            raise ValueError("distribution config missing 'kind'")
        kind = d["kind"]
        if kind not in _DIST_KINDS:
            raise ValueError(f"unknown distribution kind {kind!r}")
        names = _DIST_KINDS[kind][1]
        extra = set(d) - {"kind", *names}
        if extra:
            raise ValueError(f"unknown distribution key {sorted(extra)[0]!r}")
        missing = [n for n in names if n not in d]
        if missing:
            raise ValueError(f"distribution config missing {missing[0]!r}")
        params = tuple(int(d[n]) if kind == "uniform_int" else float(d[n]) for n in names)
        return DistributionSpec(kind, params)


@dataclass(frozen=True)
class WeightFieldSpec:
    """A reproducible i.i.d. environment on the rectangle [1, x_max] x [1, y_max].

    weight_at is a pure function of (master_seed, stream_tag, x, y); the same
    vertex queried twice, in any order, from any engine, gives identical bits.
    """

    master_seed: int
    dist: DistributionSpec
    x_max: int
    y_max: int
    stream_tag: int = 0

    def __post_init__(self):
        if self.x_max < 1 or self.y_max < 1:
            raise ValueError("field bounds must be at least 1x1")

    def in_bounds(self, v: Vertex) -> bool:
        return 1 <= v.x <= self.x_max and 1 <= v.y <= self.y_max

    def weight_at(self, v: Vertex) -> float:
        if not self.in_bounds(v):
            raise ValueError(f"vertex {v.as_tuple()} outside bounds "
                             f"[1,{self.x_max}]x[1,{self.y_max}]")
        return float(rng.site_weight(
            np.uint64(self.master_seed & 0xFFFFFFFFFFFFFFFF),
            np.uint64(self.stream_tag & 0xFFFFFFFFFFFFFFFF),
            v.x, v.y, self.dist.code, self.dist.p1, self.dist.p2))

    def with_tag(self, tag: int) -> "WeightFieldSpec":
        return WeightFieldSpec(self.master_seed, self.dist, self.x_max, self.y_max, tag)

    def materialize(self, x0=1, y0=1, x1=None, y1=None) -> "Field":
        """Realize the window [x0, x1] x [y0, y1] (defaults: full bounds)."""
        x1 = self.x_max if x1 is None else x1
        y1 = self.y_max if y1 is None else y1
        if not (1 <= x0 <= x1 <= self.x_max and 1 <= y0 <= y1 <= self.y_max):
            raise ValueError("materialization window outside field bounds")
        data = np.empty((x1 - x0 + 1, y1 - y0 + 1), dtype=np.float64)
        rng.fill_rectangle(
            np.uint64(self.master_seed & 0xFFFFFFFFFFFFFFFF),
            np.uint64(self.stream_tag & 0xFFFFFFFFFFFFFFFF),
            x0, y0, data, self.dist.code, self.dist.p1, self.dist.p2)
        return Field(self, x0, y0, data)


@dataclass
class Field:
    """A materialized window of a WeightFieldSpec; the stored-engine currency."""

    spec: WeightFieldSpec
    x0: int
    y0: int
    data: np.ndarray  # shape (W, H); data[i, j] = weight at (x0 + i, y0 + j)

    @property
    def x1(self) -> int:
        return self.x0 + self.data.shape[0] - 1

    @property
    def y1(self) -> int:
        return self.y0 + self.data.shape[1] - 1

    def contains(self, v: Vertex) -> bool:
        return self.x0 <= v.x <= self.x1 and self.y0 <= v.y <= self.y1

    def weight(self, v: Vertex) -> float:
        return float(self.data[v.x - self.x0, v.y - self.y0])

    def path_weight(self, vertices: Iterable[Vertex]) -> float:
        return math.fsum(self.weight(v) for v in vertices)


def make_field(master_seed, dist, x_max, y_max, stream_tag=0) -> Field:
    """Materialize a full-bounds field in one call."""
    return WeightFieldSpec(master_seed, dist, x_max, y_max, stream_tag).materialize()


def transversal_numerator(r: int, z: int, x, y):
    """2r * t(v) as an exact integer: (r+z) x - (r-z) y."""
    return (r + z) * x - (r - z) * y


@dataclass(frozen=True)
class ParallelogramSpec:
    """The parallelogram U_{r, ell, z}: height r, width ell * r^(2/3), opposite
    side midpoints (1,1) and (r-z, r+z).

    Membership is 2 <= x+y <= 2r together with |t(v)| <= ell r^(2/3) / 2.  The
    half-width is stored as ell^3 (an exact Fraction) so that widths like the
    full-square ell = 2 r^(1/3) compare exactly: |t| <= ell r^(2/3)/2 is
    equivalent to |(r+z)x - (r-z)y|^3 <= ell^3 r^5.
    """

    r: int
    z: int
    ell_cubed: Fraction

    def __post_init__(self):
        if abs(self.z) >= self.r:
            raise ValueError(f"|z| = {abs(self.z)} must be < r = {self.r} (degenerate slope)")
        if self.ell_cubed < 0:
            raise ValueError("width must be nonnegative")

    @staticmethod
    def from_ell(r: int, ell, z: int = 0) -> "ParallelogramSpec":
        """Width given in units of r^(2/3)."""
        return ParallelogramSpec(r, z, Fraction(ell) ** 3)

    @staticmethod
    def from_width(r: int, w, z: int = 0) -> "ParallelogramSpec":
        """Width w given in raw lattice units (the slab U_{r,w,z})."""
        return ParallelogramSpec(r, z, Fraction(w) ** 3 / (r * r))

    @staticmethod
    def full_square(r: int, z: int = 0) -> "ParallelogramSpec":
        """ell = 2 r^(1/3), wide enough to contain all of [1, r]^2 (ell^3 = 8r)."""
        return ParallelogramSpec(r, z, Fraction(8 * r))

    @property
    def ell(self) -> float:
        return float(self.ell_cubed) ** (1.0 / 3.0)

    @property
    def width(self) -> float:
        """ell * r^(2/3) in lattice units."""
        return float(self.ell_cubed * self.r**2) ** (1.0 / 3.0)

    @property
    def start(self) -> Vertex:
        return Vertex(1, 1)

    @property
    def end(self) -> Vertex:
        return Vertex(self.r - self.z, self.r + self.z)

    def contains_xy(self, x: int, y: int) -> bool:
        if not (2 <= x + y <= 2 * self.r):
            return False
        num = transversal_numerator(self.r, self.z, x, y)
        lhs = Fraction(abs(num) ** 3)
        return lhs <= self.ell_cubed * self.r**5

    def contains(self, v: Vertex) -> bool:
        return self.contains_xy(v.x, v.y)

    def membership_mask(self, x0: int, y0: int, w: int, h: int) -> np.ndarray:
        """Boolean mask over the window [x0, x0+w) x [y0, y0+h).

        Vectorized with int64 when every quantity provably fits; otherwise an
        exact big-integer loop (the comparison itself is always exact).
        """
        r, z = self.r, self.z
        c3 = self.ell_cubed
        xs = np.arange(x0, x0 + w, dtype=np.int64)[:, None]
        ys = np.arange(y0, y0 + h, dtype=np.int64)[None, :]
        max_num = (r + abs(z)) * max(abs(x0) + w, abs(y0) + h)
        int64_ok = (
            max_num**3 * c3.denominator < 2**62
            and c3.numerator * r**5 < 2**62
        )
        lev = xs + ys
        in_band = (lev >= 2) & (lev <= 2 * r)
        if int64_ok:
            num = (r + z) * xs - (r - z) * ys
            lhs = np.abs(num) ** 3 * int(c3.denominator)
            return in_band & (lhs <= int(c3.numerator * r**5))
        out = np.zeros((w, h), dtype=bool)
        for i in range(w):
            for j in range(h):
                if in_band[i, j]:
                    out[i, j] = self.contains_xy(x0 + i, y0 + j)
        return out


def parallelogram_contains(U: ParallelogramSpec, v: Vertex) -> bool:
    """Exact membership test for U_{r, ell, z}."""
    return U.contains(v)
