"""Geodesic recovery and geometric observables.

Transversal fluctuation follows the printed convention literally:
tf(gamma) = 2 * max |t(v)| with t(v) = ((r+z) x - (r-z) y) / (2r), so at
z = 0 it equals max |x - y|.  Values are computed with exact rational
arithmetic and returned as floats.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .env import Field, Vertex, precedes, transversal_numerator
from .passage import corner_table


@dataclass(frozen=True)
class Path:
    """An up-right nearest-neighbor path, stored as its vertex sequence."""

    vertices: tuple

    def __post_init__(self):
        vs = self.vertices
        if not vs:
            raise ValueError("path must contain at least one vertex")
        for a, b in zip(vs, vs[1:]):
            step = (b.x - a.x, b.y - a.y)
            if step not in ((1, 0), (0, 1)):
                raise ValueError(f"illegal step {step} from {a.as_tuple()}")

    def __len__(self):
        return len(self.vertices)

    def __iter__(self):
        return iter(self.vertices)

    @property
    def start(self) -> Vertex:
        return self.vertices[0]

    @property
    def end(self) -> Vertex:
        return self.vertices[-1]

    @staticmethod
    def from_tuples(pairs) -> "Path":
        return Path(tuple(Vertex(x, y) for x, y in pairs))

    def vertex_at_level(self, level: int) -> Vertex:
        """The unique path vertex on the antidiagonal x + y = level."""
        lo = self.start.level
        if not (lo <= level <= self.end.level):
            raise ValueError(f"level {level} not spanned by path")
        return self.vertices[level - lo]


@dataclass(frozen=True)
class GeodesicRecord:
    path: Path
    weight: float
    tf: float
    z: int
    r: int

    def to_json(self) -> str:
        return json.dumps({
            "r": self.r,
            "z": self.z,
            "weight": self.weight,
            "tf": self.tf,
            "vertices": [[v.x, v.y] for v in self.path],
        }, sort_keys=True)

    @staticmethod
    def from_json(s: str) -> "GeodesicRecord":
        d = json.loads(s)
        return GeodesicRecord(
            path=Path.from_tuples(d["vertices"]),
            weight=float(d["weight"]),
            tf=float(d["tf"]),
            z=int(d["z"]),
            r=int(d["r"]),
        )


def leftmost_geodesic(field: Field, u: Vertex, v: Vertex) -> GeodesicRecord:
    """The maximizing u -> v path that, under ties, prefers the smaller-x
    predecessor at every backtracking step (the lattice-leftmost maximizer;
    on a constant field this is the left-boundary hook)."""
    if not precedes(u, v):
        raise ValueError(f"{u.as_tuple()} does not precede {v.as_tuple()}")
    D = corner_table(field, u, v)
    rev = [v]
    x, y = v.x, v.y
    while (x, y) != (u.x, u.y):
        i, j = x - u.x, y - u.y
        if i == 0:
            y -= 1
        elif j == 0:
            x -= 1
        elif D[i - 1, j] >= D[i, j - 1]:  # tie -> smaller-x predecessor
            x -= 1
        else:
            y -= 1
        rev.append(Vertex(x, y))
    path = Path(tuple(reversed(rev)))
    r = v.level // 2
    z = (v.y - v.x) // 2
    weight = field.path_weight(path)
    return GeodesicRecord(path=path, weight=weight,
                          tf=transversal_fluctuation(path, r, z, _check_start=False),
                          z=z, r=r)


def rightmost_geodesic(field: Field, u: Vertex, v: Vertex) -> GeodesicRecord:
    """Opposite tie-break (smaller-y predecessor); used to probe tie structure."""
    if not precedes(u, v):
        raise ValueError(f"{u.as_tuple()} does not precede {v.as_tuple()}")
    D = corner_table(field, u, v)
    rev = [v]
    x, y = v.x, v.y
    while (x, y) != (u.x, u.y):
        i, j = x - u.x, y - u.y
        if i == 0:
            y -= 1
        elif j == 0:
            x -= 1
        elif D[i, j - 1] >= D[i - 1, j]:
            y -= 1
        else:
            x -= 1
        rev.append(Vertex(x, y))
    path = Path(tuple(reversed(rev)))
    r = v.level // 2
    z = (v.y - v.x) // 2
    return GeodesicRecord(path=path, weight=field.path_weight(path),
                          tf=transversal_fluctuation(path, r, z, _check_start=False),
                          z=z, r=r)


def transversal_fluctuation(path: Path, r: int, z: int, _check_start: bool = True) -> float:
    """tf(path) = 2 max |t(v)| = max |(r+z) x - (r-z) y| / r over path vertices."""
    if _check_start and (path.start != Vertex(1, 1) or path.end != Vertex(r - z, r + z)):
        raise ValueError("path endpoints must be (1,1) and (r-z, r+z)")
    m = max(abs(transversal_numerator(r, z, v.x, v.y)) for v in path)
    return float(Fraction(m, r))


def transversal_position(v: Vertex, r: int, z: int) -> Fraction:
    """t(v) as an exact rational."""
    return Fraction(transversal_numerator(r, z, v.x, v.y), 2 * r)


def midpoint_position(path: Path, x: int) -> int:
    """The unique y with (x - y, x + y) on the path (the level-2x crossing)."""
    v = path.vertex_at_level(2 * x)
    return (v.y - v.x) // 2
