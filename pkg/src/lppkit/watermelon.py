"""Maximum-weight families of k vertex-disjoint up-right paths in [1, r]^2.

The solver is min-cost flow on the node-split lattice DAG: each vertex v
becomes in(v) -> out(v) with capacity 1 and cost -xi_v, lattice steps are
capacity-1 zero-cost arcs, and the source/sink wiring selects the endpoint
mode.  Successive shortest augmenting paths with Johnson potentials keep
every intermediate flow value optimal, so one solve yields X_r^j for all
j <= k (free-endpoint mode).  Results carry a certificate: the extracted
paths are re-checked for disjointness and their weights re-summed.

Endpoint modes:

    FREE    any k vertex-disjoint up-right paths inside [1, r]^2
    PINNED  path i runs (1, i) -> (r, r-k+i); the printed order-reversing
            endpoints (1, i) -> (r, r-i+1) cannot be vertex-disjoint for
            k >= 2 (two disjoint up-right paths never swap antidiagonal
            order), so the order-preserving variant is used.
"""

from __future__ import annotations

import heapq
import itertools
import math
from dataclasses import dataclass

from .env import Field, Vertex
from .geodesic import Path
from .passage import BOTTOM

FREE = "free"
PINNED = "pinned"
MODES = (FREE, PINNED)


class WatermelonInfeasibleError(ValueError):
    """Requested endpoint wiring admits no family of k disjoint paths."""


class BruteForceSizeError(ValueError):
    """Instance too large for the exhaustive oracle."""


@dataclass
class WatermelonResult:
    k: int
    mode: str
    total_weight: float
    paths: list
    totals_by_k: dict  # j -> optimal total for j paths (free mode prefixes)

    def to_json(self) -> str:
        import json
        return json.dumps({
            "k": self.k,
            "mode": self.mode,
            "total_weight": self.total_weight,
            "paths": [[[v.x, v.y] for v in p] for p in self.paths],
        }, sort_keys=True)


class _FlowNet:
    """Arc-list residual network; paired arcs at indices (2i, 2i+1)."""

    def __init__(self, n_nodes):
        self.n = n_nodes
        self.head = [[] for _ in range(n_nodes)]  # node -> arc indices
        self.to = []
        self.cap = []
        self.cost = []

    def add_arc(self, u, v, cap, cost):
        self.head[u].append(len(self.to))
        self.to.append(v)
        self.cap.append(cap)
        self.cost.append(cost)
        self.head[v].append(len(self.to))
        self.to.append(u)
        self.cap.append(0)
        self.cost.append(-cost)


def _build_network(field: Field, r: int, k: int, mode: str):
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if not (1 <= k <= r):
        raise ValueError(f"need 1 <= k <= r, got k={k}, r={r}")
    if field.x0 > 1 or field.y0 > 1 or field.x1 < r or field.y1 < r:
        raise ValueError("field window must cover [1, r]^2")
    n = 2 + 2 * r * r
    net = _FlowNet(n)
    S, T = 0, 1

    def node_in(x, y):
        return 2 + 2 * ((x - 1) * r + (y - 1))

    def node_out(x, y):
        return node_in(x, y) + 1

    for x in range(1, r + 1):
        for y in range(1, r + 1):
            w = field.weight(Vertex(x, y))
            net.add_arc(node_in(x, y), node_out(x, y), 1, -w)
            if x < r:
                net.add_arc(node_out(x, y), node_in(x + 1, y), 1, 0.0)
            if y < r:
                net.add_arc(node_out(x, y), node_in(x, y + 1), 1, 0.0)
    if mode == FREE:
        for x in range(1, r + 1):
            for y in range(1, r + 1):
                net.add_arc(S, node_in(x, y), 1, 0.0)
                net.add_arc(node_out(x, y), T, 1, 0.0)
    else:
        for i in range(1, k + 1):
            net.add_arc(S, node_in(1, i), 1, 0.0)
            net.add_arc(node_out(r, r - k + i), T, 1, 0.0)
    return net, node_in, node_out


def _initial_potentials(net: _FlowNet, r: int):
    """Shortest distances from S on the acyclic network, by topological order."""
    big = math.inf
    pot = [big] * net.n
    pot[0] = 0.0
    # topological order: S, then vertex nodes by (level, x) with in before out, then T
    order = [0]
    for lev in range(2, 2 * r + 1):
        for x in range(max(1, lev - r), min(r, lev - 1) + 1):
            y = lev - x
            base = 2 + 2 * ((x - 1) * r + (y - 1))
            order.append(base)
            order.append(base + 1)
    order.append(1)
    for u in order:
        du = pot[u]
        if du == big:
            continue
        for a in net.head[u]:
            if net.cap[a] > 0:
                v = net.to[a]
                nd = du + net.cost[a]
                if nd < pot[v]:
                    pot[v] = nd
    return pot


def _ssp(net: _FlowNet, k: int, pot):
    """k successive shortest S->T augmentations; returns cost after each."""
    S, T = 0, 1
    totals = []
    running = 0.0
    for _ in range(k):
        dist = [math.inf] * net.n
        par = [-1] * net.n
        dist[S] = 0.0
        pq = [(0.0, S)]
        done = [False] * net.n
        while pq:
            d, u = heapq.heappop(pq)
            if done[u]:
                continue
            done[u] = True
            if u == T:
                break
            for a in net.head[u]:
                if net.cap[a] <= 0:
                    continue
                v = net.to[a]
                if done[v]:
                    continue
                rc = net.cost[a] + pot[u] - pot[v]
                if rc < 0.0:
                    rc = 0.0  # float jitter guard; exact for integer fields
                nd = d + rc
                if nd < dist[v]:
                    dist[v] = nd
                    par[v] = a
                    heapq.heappush(pq, (nd, v))
        if not done[T] or dist[T] == math.inf:
            raise WatermelonInfeasibleError(
                "no augmenting path: endpoint wiring infeasible")
        # early-terminated Dijkstra: capping by dist[T] preserves reduced-cost
        # nonnegativity for the next round
        dT = dist[T]
        for u in range(net.n):
            if dist[u] < math.inf:
                pot[u] += dist[u] if dist[u] < dT else dT
            else:
                pot[u] += dT
        # augment one unit along the parent chain
        v = T
        while v != S:
            a = par[v]
            net.cap[a] -= 1
            net.cap[a ^ 1] += 1
            running += net.cost[a]
            v = net.to[a ^ 1]
        totals.append(-running)
    return totals


def _extract_paths(net: _FlowNet, r: int):
    """Decompose the final flow into S->T paths of lattice vertices."""
    S, T = 0, 1
    flow_arcs = {}  # node -> list of arcs with residual flow
    for u in range(net.n):
        for a in net.head[u]:
            if a % 2 == 0 and net.cap[a ^ 1] > 0:  # forward arc carrying flow
                flow_arcs.setdefault(u, []).append(a)
    paths = []
    for a0 in sorted(flow_arcs.get(S, [])):
        if net.cap[a0 ^ 1] <= 0:
            continue
        verts = []
        u, a = S, a0
        while True:
            net.cap[a ^ 1] -= 1
            u = net.to[a]
            if u == T:
                break
            idx = (u - 2) // 2
            if (u - 2) % 2 == 0:  # in-node: record the lattice vertex
                verts.append(Vertex(idx // r + 1, idx % r + 1))
            nxt = None
            for b in flow_arcs.get(u, []):
                if net.cap[b ^ 1] > 0:
                    nxt = b
                    break
            if nxt is None:
                raise RuntimeError("flow decomposition lost conservation")
            a = nxt
        paths.append(Path(tuple(verts)))
    return paths


def watermelon_weight(field: Field, r: int, k: int, mode: str = FREE) -> WatermelonResult:
    """Exact optimum total weight of k vertex-disjoint paths, with certificate."""
    net, _, _ = _build_network(field, r, k, mode)
    pot = _initial_potentials(net, r)
    totals = _ssp(net, k, pot)
    paths = _extract_paths(net, r)
    if len(paths) != k:
        raise WatermelonInfeasibleError(f"solver produced {len(paths)} paths, wanted {k}")
    seen = set()
    for p in paths:
        for v in p:
            if v in seen:
                raise RuntimeError("certificate failure: paths share a vertex")
            seen.add(v)
            if not (1 <= v.x <= r and 1 <= v.y <= r):
                raise RuntimeError("certificate failure: vertex outside the square")
    if mode == PINNED:
        starts = sorted(p.start for p in paths)
        ends = sorted(p.end for p in paths)
        want_starts = sorted(Vertex(1, i) for i in range(1, k + 1))
        want_ends = sorted(Vertex(r, r - k + i) for i in range(1, k + 1))
        if starts != want_starts or ends != want_ends:
            raise RuntimeError("certificate failure: pinned endpoints not met")
    total = math.fsum(field.path_weight(p) for p in paths)
    if not math.isclose(total, totals[-1], rel_tol=1e-9, abs_tol=1e-6):
        raise RuntimeError(
            f"certificate failure: recomputed weight {total} != flow optimum {totals[-1]}")
    by_k = {j + 1: totals[j] for j in range(k)} if mode == FREE else {k: totals[-1]}
    return WatermelonResult(k=k, mode=mode, total_weight=total, paths=paths,
                            totals_by_k=by_k)


def watermelon_totals(field: Field, r: int, k_max: int) -> dict:
    """Free-endpoint optima X_r^j for every j <= k_max from a single solve."""
    return watermelon_weight(field, r, k_max, FREE).totals_by_k


def _enumerate_paths_from(field, r, u, v):
    """All monotone paths u -> v as (vertex-bitmask, weight)."""
    out = []

    def rec(p, mask, wsum):
        if p == v:
            out.append((mask, wsum))
            return
        if p.x < v.x:
            q = Vertex(p.x + 1, p.y)
            rec(q, mask | (1 << ((q.x - 1) * r + (q.y - 1))), wsum + field.weight(q))
        if p.y < v.y:
            q = Vertex(p.x, p.y + 1)
            rec(q, mask | (1 << ((q.x - 1) * r + (q.y - 1))), wsum + field.weight(q))

    rec(u, 1 << ((u.x - 1) * r + (u.y - 1)), field.weight(u))
    return out


def brute_force_disjoint(field: Field, r: int, k: int, mode: str = FREE) -> float:
    """Exhaustive oracle for tiny instances (r <= 5, k <= 2)."""
    if r > 5 or k > 2:
        raise BruteForceSizeError("brute force is limited to r <= 5, k <= 2")
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if not (1 <= k <= r):
        raise ValueError(f"need 1 <= k <= r, got k={k}, r={r}")
    if mode == PINNED:
        groups = []
        for i in range(1, k + 1):
            groups.append(_enumerate_paths_from(field, r, Vertex(1, i), Vertex(r, r - k + i)))
        if k == 1:
            return max(w for _, w in groups[0])
        best = BOTTOM
        for m1, w1 in groups[0]:
            for m2, w2 in groups[1]:
                if m1 & m2 == 0 and w1 + w2 > best:
                    best = w1 + w2
        return best
    # free endpoints: every ordered pair u <= v
    all_paths = []
    for ux, uy, vx, vy in itertools.product(range(1, r + 1), repeat=4):
        if ux <= vx and uy <= vy:
            all_paths.extend(_enumerate_paths_from(field, r, Vertex(ux, uy), Vertex(vx, vy)))
    if k == 1:
        return max(w for _, w in all_paths)
    all_paths.sort(key=lambda t: -t[1])
    best = BOTTOM
    n = len(all_paths)
    for i in range(n):
        mi, wi = all_paths[i]
        if 2 * wi <= best:
            break
        for j in range(i + 1, n):
            mj, wj = all_paths[j]
            if wi + wj <= best:
                break
            if mi & mj == 0:
                best = wi + wj
                break
    return best
