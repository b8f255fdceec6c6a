"""The interval grid through which geodesics are discretized, and the
chain-domination machinery.

Grid lines i = 0..k sit on antidiagonals x + y = 2 v_i with v_i = floor(i r/k)
(line 0 is anchored at the level of (1,1), a +1 shift of the degenerate
floor(0) = 0, whose antidiagonal contains no positive vertex).  Line i holds
M = 2 ceil(theta^(3/(4 alpha)) k^(2/3)) intervals of width (r/k)^(2/3); the
j-th spans transversal offsets h in [h(i, j+1), h(i, j)] with

    h(i, j) = floor(i z / k + (theta^(3/(4 alpha)) - j k^(-2/3)) r^(2/3)).

A discretization picks one interval per line, the ends pinned to the
intervals containing (1,1) and (r-z, r+z).  Whenever a geodesic stays in the
grid, the sum of consecutive interval-to-interval weights along the intervals
it crosses dominates its weight exactly, per environment.

Floors follow the rounded-down-without-comment convention; float powers are
snapped by 1e-9 before rounding so that exact integer targets (e.g.
theta = 16, alpha = 1) land on their intended values.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

from .env import Field, Vertex
from .geodesic import Path
from .passage import SetSpec, set_to_set

ENUMERATION_CAP = 10**6


def _snap_ceil(x: float) -> int:
    return math.ceil(x - 1e-9)


def _snap_floor(x: float) -> int:
    return math.floor(x + 1e-9)


@dataclass(frozen=True)
class GridSpec:
    r: int
    k: int
    z: int
    theta: float
    alpha: float

    def __post_init__(self):
        if self.k < 1 or self.k > self.r:
            raise ValueError(f"need 1 <= k <= r (cell width >= 1), got k={self.k}, r={self.r}")
        if abs(self.z) ** 6 > self.r**5:
            raise ValueError(f"|z| = {abs(self.z)} exceeds r^(5/6)")
        if self.theta <= 0:
            raise ValueError("theta must be positive")
        if not (0 < self.alpha <= 1):
            raise ValueError("alpha must lie in (0, 1]")

    @property
    def halfwidth_scale(self) -> float:
        """theta^(3/(4 alpha)), the grid half-width in units of r^(2/3)."""
        return self.theta ** (3.0 / (4.0 * self.alpha))

    @property
    def M(self) -> int:
        m = 2 * _snap_ceil(self.halfwidth_scale * self.k ** (2.0 / 3.0))
        return max(m, 2)

    def v(self, i: int) -> int:
        """Diagonal coordinate of grid line i (its antidiagonal is x+y = 2 v_i)."""
        if not (0 <= i <= self.k):
            raise ValueError(f"grid line index {i} outside [0, {self.k}]")
        if i == 0:
            return 1
        return (i * self.r) // self.k

    def h(self, i: int, j: int) -> int:
        """Transversal offset of grid point j on line i."""
        if not (0 <= j <= self.M):
            raise ValueError(f"grid offset index {j} outside [0, {self.M}]")
        t = self.halfwidth_scale - j * self.k ** (-2.0 / 3.0)
        return _snap_floor(i * self.z / self.k + t * self.r ** (2.0 / 3.0))

    def interval(self, i: int, j: int) -> SetSpec:
        """Interval L_{ij} as a vertex set: points (v_i - h, v_i + h) for
        h in [h(i, j+1), h(i, j)]."""
        if not (0 <= j <= self.M - 1):
            raise ValueError(f"interval index {j} outside [0, {self.M - 1}]")
        vi = self.v(i)
        return SetSpec.interval(2 * vi, -2 * self.h(i, j), -2 * self.h(i, j + 1))

    def interval_offsets(self, i: int, j: int):
        """The h-range [lo, hi] covered by L_{ij}."""
        return self.h(i, j + 1), self.h(i, j)

    def pinned_index(self, i: int) -> int:
        """The interval on line i containing the interpolating-line crossing
        (h = 0 on line 0, h = z on line k)."""
        target = 0 if i == 0 else (self.z if i == self.k else None)
        if target is None:
            raise ValueError("only lines 0 and k are pinned")
        j = self.locate(i, target)
        if j is None:
            raise ValueError("grid too narrow to contain its own corners")
        return j

    def locate(self, i: int, h_cross: int) -> Optional[int]:
        """Smallest j with h(i, j+1) <= h_cross <= h(i, j); None if outside."""
        if h_cross > self.h(i, 0) or h_cross < self.h(i, self.M):
            return None
        lo, hi = 0, self.M - 1
        while lo < hi:  # h(i, .) is nonincreasing in j
            mid = (lo + hi) // 2
            if self.h(i, mid + 1) <= h_cross:
                hi = mid
            else:
                lo = mid + 1
        return lo

    @property
    def start(self) -> Vertex:
        return Vertex(1, 1)

    @property
    def end(self) -> Vertex:
        return Vertex(self.r - self.z, self.r + self.z)


def build_grid(r: int, k: int, z: int, theta: float, alpha: float) -> GridSpec:
    return GridSpec(r=r, k=k, z=z, theta=theta, alpha=alpha)


@dataclass(frozen=True)
class Discretization:
    """One interval index per grid line, ends pinned."""

    grid: GridSpec
    indices: tuple  # ((i, j_i) for i = 0..k)

    def __post_init__(self):
        g = self.grid
        if len(self.indices) != g.k + 1:
            raise ValueError("discretization needs exactly one interval per grid line")
        for want_i, (i, j) in enumerate(self.indices):
            if i != want_i:
                raise ValueError("discretization lines must be 0..k in order")
            if not (0 <= j <= g.M - 1):
                raise ValueError(f"interval index {j} out of range on line {i}")
        if self.indices[0][1] != g.pinned_index(0):
            raise ValueError("line-0 interval must be the pinned one")
        if self.indices[-1][1] != g.pinned_index(g.k):
            raise ValueError("line-k interval must be the pinned one")

    def intervals(self):
        return [self.grid.interval(i, j) for i, j in self.indices]


class DiscretizationCount(NamedTuple):
    count: int          # exact: M^(k-1)
    log_bound: float    # k (log k + 3/(4 alpha) log theta + log 2)
    bound: float        # exp(log_bound), inf on overflow


def count_discretizations(grid: GridSpec) -> DiscretizationCount:
    """Exact count M^(k-1) plus the exponential entropy bound
    exp{k (log k + 3/(4 alpha) log theta + log 2)} used in union bounds."""
    count = grid.M ** (grid.k - 1)
    log_bound = grid.k * (
        math.log(grid.k) + 3.0 / (4.0 * grid.alpha) * math.log(grid.theta) + math.log(2.0)
    )
    try:
        bound = math.exp(log_bound)
    except OverflowError:
        bound = math.inf
    return DiscretizationCount(count=count, log_bound=log_bound, bound=bound)


def enumerate_discretizations(grid: GridSpec):
    """Yield every discretization; refuses when the exact count exceeds 10^6."""
    c = count_discretizations(grid).count
    if c > ENUMERATION_CAP:
        raise ValueError(f"{c} discretizations exceed the enumeration cap {ENUMERATION_CAP}")
    j0 = grid.pinned_index(0)
    jk = grid.pinned_index(grid.k)
    free_lines = range(1, grid.k)
    for combo in itertools.product(range(grid.M), repeat=max(grid.k - 1, 0)):
        idx = [(0, j0)]
        idx.extend((i, combo[i - 1]) for i in free_lines)
        idx.append((grid.k, jk))
        yield Discretization(grid=grid, indices=tuple(idx))


def geodesic_discretization(path: Path, grid: GridSpec) -> Optional[Discretization]:
    """The discretization whose intervals the path crosses; None when any
    crossing falls outside its grid line (the exit flag)."""
    if path.start != grid.start or path.end != grid.end:
        raise ValueError("path endpoints must match the grid corners")
    indices = []
    for i in range(grid.k + 1):
        vert = path.vertex_at_level(2 * grid.v(i))
        h_cross = (vert.y - vert.x) // 2
        j = grid.locate(i, h_cross)
        if j is None:
            return None
        indices.append((i, j))
    return Discretization(grid=grid, indices=tuple(indices))


def chain_weight(field: Field, grid: GridSpec, d: Discretization) -> float:
    """Sum of consecutive interval-to-interval weights along the
    discretization (the Z_i chain); dominates X_r^z whenever the geodesic
    crosses those intervals."""
    if d.grid != grid:
        raise ValueError("discretization belongs to a different grid")
    ivals = d.intervals()
    terms = [set_to_set(field, ivals[i - 1], ivals[i]) for i in range(1, len(ivals))]
    return math.fsum(terms)
