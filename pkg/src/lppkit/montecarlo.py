"""Trial orchestration, empirical tail curves, exponent and limit-shape fits.

Statistics are sampled from deterministic per-trial environments: trial t of
the i-th entry of r_values uses stream tag (i << 48) | t, and all z offsets
within one trial share that trial's environment (one antidiagonal sweep
serves the whole profile).  Record streams are therefore byte-stable for any
worker count.

Tail curves count deviations of at least theta * scaling * r^(1/3) from the
configured centering; exponent fits are weighted least squares of
log(-log p) on log theta with bootstrap confidence intervals.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

import numpy as np

from .env import DistributionSpec, ParallelogramSpec, Vertex, WeightFieldSpec
from .passage import BOTTOM, SetSpec, max_weight_exceeding_tf, passage_profile
from . import streaming, watermelon

STATISTICS = ("point", "constrained", "tf", "watermelon", "exceeding_tf")


@dataclass(frozen=True)
class Centering:
    mode: str  # "known" | "empirical_mean"
    mu: Optional[float] = None

    def __post_init__(self):
        if self.mode not in ("known", "empirical_mean"):
            raise ValueError(f"unknown centering mode {self.mode!r}")
        if self.mode == "known" and self.mu is None:
            raise ValueError("known centering needs mu")

    def center(self, values: np.ndarray, r: int) -> float:
        if self.mode == "known":
            return self.mu * r
        return float(values.mean())

    def to_config(self):
        if self.mode == "known":
            return {"mode": "known", "mu": self.mu}
        return {"mode": "empirical_mean"}

    @staticmethod
    def from_config(d):
        if not isinstance(d, dict) or "mode" not in d:
            raise ValueError("centering config needs a 'mode'")
        extra = set(d) - {"mode", "mu"}
        if extra:
            raise ValueError(f"unknown centering key {sorted(extra)[0]!r}")
        if d["mode"] == "known":
            return Centering("known", float(d["mu"]))
        if d["mode"] == "empirical_mean":
            return Centering("empirical_mean")
        raise ValueError(f"unknown centering mode {d['mode']!r}")


EMPIRICAL_MEAN = Centering("empirical_mean")


@dataclass(frozen=True)
class ExperimentConfig:
    dist: DistributionSpec
    statistic: str
    r_values: tuple
    trials: int
    master_seed: int
    z_values: tuple = (0,)
    centering: Centering = EMPIRICAL_MEAN
    scaling: float = 1.0
    theta_grid: tuple = ()
    rho: float = 0.25
    ell: Optional[float] = None          # constrained statistic
    k: Optional[int] = None              # watermelon / exceeding_tf
    melon_mode: str = watermelon.FREE    # watermelon statistic
    strip_halfwidth: Optional[float] = None  # exceeding_tf statistic

    def __post_init__(self):
        if self.statistic not in STATISTICS:
            raise ValueError(f"unknown statistic {self.statistic!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.r_values:
            raise ValueError("r_values must be nonempty")
        if any(t2 <= t1 for t1, t2 in zip(self.theta_grid, self.theta_grid[1:])):
            raise ValueError("theta_grid must be strictly increasing")
        if self.statistic == "constrained" and self.ell is None:
            raise ValueError("constrained statistic needs ell")
        if self.statistic == "watermelon" and self.k is None:
            raise ValueError("watermelon statistic needs k")
        if self.statistic == "exceeding_tf" and self.strip_halfwidth is None:
            raise ValueError("exceeding_tf statistic needs strip_halfwidth")
        if not (0.0 < self.rho < 1.0):
            raise ValueError("rho must lie in (0, 1)")


@dataclass(frozen=True)
class TrialRecord:
    r: int
    z: int
    statistic: str
    value: float
    trial: int


def stream_tag(r_index: int, trial: int) -> int:
    """Per-trial stream tag; distinct r values get independent environments."""
    return (r_index << 48) | trial


def _field_bounds(config: ExperimentConfig, r: int):
    zmax = max((abs(z) for z in config.z_values), default=0)
    return r + zmax, r + zmax


def _sample_r(config: ExperimentConfig, r_index: int, workers: int = 1):
    """values[(z)] -> np.ndarray of the statistic over trials, for one r."""
    r = config.r_values[r_index]
    seed = np.uint64(config.master_seed & 0xFFFFFFFFFFFFFFFF)
    tag0 = np.uint64(stream_tag(r_index, 0))
    d = config.dist
    n = config.trials
    zs = config.z_values
    if config.statistic == "point":
        if zs == (0,):
            vals = streaming.batch_point_weights(seed, tag0, n, r, 0, d.code, d.p1, d.p2)
            return {0: vals}
        xmax, ymax = _field_bounds(config, r)
        xs, prof = streaming.batch_profile(seed, tag0, n, xmax, ymax, 2 * r, d.code, d.p1, d.p2)
        xlo = int(xs[0])
        out = {}
        for z in zs:
            x = r - z
            if not (xs[0] <= x <= xs[-1]):
                raise ValueError(f"offset z={z} outside the sampled profile")
            out[z] = prof[:, x - xlo].copy()
        return out
    if config.statistic == "constrained":
        out = {}
        for z in zs:
            U = _ell_spec(config.ell, r, z)
            allow = U.membership_mask(1, 1, r - z, r + z)
            out[z] = streaming.batch_constrained(seed, tag0, n, r, z, allow, d.code, d.p1, d.p2)
        return out
    if config.statistic == "tf":
        return {z: streaming.batch_geodesic_tf(seed, tag0, n, r, z, d.code, d.p1, d.p2)
                for z in zs}
    if config.statistic == "watermelon":
        vals = _pooled(_melon_value, config, r_index, workers)
        return {0: vals}
    # exceeding_tf
    out = {}
    for z in zs:
        out[z] = _pooled(_exceed_value, config, r_index, workers, z=z)
    return out


def _ell_spec(ell, r, z) -> ParallelogramSpec:
    if ell == "full" or (isinstance(ell, (int, float)) and ell >= 2.0 * r ** (1.0 / 3.0)):
        return ParallelogramSpec.full_square(r, z)
    return ParallelogramSpec.from_ell(r, ell, z)


def _melon_value(config: ExperimentConfig, r_index: int, trial: int, z: int = 0) -> float:
    r = config.r_values[r_index]
    spec = WeightFieldSpec(config.master_seed, config.dist, r, r,
                           stream_tag(r_index, trial))
    f = spec.materialize()
    return watermelon.watermelon_weight(f, r, config.k, config.melon_mode).total_weight


def _exceed_value(config: ExperimentConfig, r_index: int, trial: int, z: int = 0) -> float:
    r = config.r_values[r_index]
    spec = WeightFieldSpec(config.master_seed, config.dist, r + abs(z), r + abs(z),
                           stream_tag(r_index, trial))
    f = spec.materialize(1, 1, r - z, r + z)
    A = SetSpec.point(Vertex(1, 1))
    B = SetSpec.point(Vertex(r - z, r + z))
    return max_weight_exceeding_tf(f, A, B, Fraction(config.strip_halfwidth), z)


def _pooled(fn, config, r_index, workers, z=0):
    n = config.trials
    if workers <= 1:
        return np.array([fn(config, r_index, t, z) for t in range(n)])
    chunk = max(1, math.ceil(n / (workers * 4)))
    blocks = [(lo, min(lo + chunk, n)) for lo in range(0, n, chunk)]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        futs = [ex.submit(_pool_block, fn, config, r_index, lo, hi, z) for lo, hi in blocks]
        parts = [f.result() for f in futs]
    return np.concatenate(parts)


def _pool_block(fn, config, r_index, lo, hi, z):
    return np.array([fn(config, r_index, t, z) for t in range(lo, hi)])


def run_trials(config: ExperimentConfig, workers: int = 1) -> Iterable[TrialRecord]:
    """Yield one record per (r, z, trial), ordered by (r, z, trial)."""
    for i, r in enumerate(config.r_values):
        by_z = _sample_r(config, i, workers)
        for z in sorted(by_z):
            vals = by_z[z]
            for t in range(config.trials):
                yield TrialRecord(r=r, z=z, statistic=config.statistic,
                                  value=float(vals[t]), trial=t)


def collect_samples(config: ExperimentConfig, workers: int = 1) -> dict:
    """{(r, z): values array}, the bulk-array face of run_trials."""
    out = {}
    for i, r in enumerate(config.r_values):
        for z, vals in _sample_r(config, i, workers).items():
            out[(r, z)] = vals
    return out


# ---------------------------------------------------------------------------
# tail curves and exponent fits


def wilson_interval(count: int, n: int, z: float = 1.959963984540054):
    """95% Wilson score interval for a binomial proportion."""
    if n == 0:
        return (0.0, 1.0)
    p = count / n
    z2 = z * z
    denom = 1.0 + z2 / n
    center = (p + z2 / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom
    lo = 0.0 if count == 0 else max(0.0, center - half)
    hi = 1.0 if count == n else min(1.0, center + half)
    return (lo, hi)


@dataclass
class TailCurve:
    """Empirical survival curve; p_hat is nonincreasing in theta by
    construction (the counted events are nested), so no monotone
    regularization step is needed."""

    side: str                 # "upper" | "lower"
    theta: np.ndarray
    tail_counts: np.ndarray
    N: int
    p_hat: np.ndarray
    ci95: list
    r: int = 0
    scaling: float = 1.0
    center: float = 0.0


def empirical_tail(values: np.ndarray, r: int, centering: Centering,
                   scaling: float, theta_grid, side: str) -> TailCurve:
    """Survival curve p(theta) = P(±(X - center) >= theta scaling r^(1/3))."""
    if len(values) == 0:
        raise ValueError("empirical_tail needs samples")
    if side not in ("upper", "lower"):
        raise ValueError("side must be 'upper' or 'lower'")
    values = np.asarray(values, dtype=np.float64)
    center = centering.center(values, r)
    dev = values - center if side == "upper" else center - values
    unit = scaling * r ** (1.0 / 3.0)
    grid = np.asarray(list(theta_grid), dtype=np.float64)
    counts = np.array([(dev >= th * unit).sum() for th in grid], dtype=np.int64)
    n = len(values)
    return TailCurve(
        side=side, theta=grid, tail_counts=counts, N=n,
        p_hat=counts / n,
        ci95=[wilson_interval(int(c), n) for c in counts],
        r=r, scaling=scaling, center=center)


@dataclass
class ExponentFit:
    beta_hat: float
    ci: tuple
    window: tuple
    min_count: int
    n_points: int
    method: str = "wls log(-log p) ~ log theta"


class InsufficientTailDataError(ValueError):
    pass


def _wls_slope(log_theta, y, w):
    sw = np.sqrt(w)
    A = np.stack([np.ones_like(log_theta), log_theta], axis=1) * sw[:, None]
    coef, *_ = np.linalg.lstsq(A, y * sw, rcond=None)
    return coef[1]


def fit_tail_exponent(curve: TailCurve, window, min_count: int = 50,
                      n_boot: int = 200, boot_seed: int = 7) -> ExponentFit:
    """Weighted least squares of log(-log p) on log theta over the window.

    Only grid points with at least min_count tail hits enter.  The bootstrap
    resamples the trial multiset (via the multinomial equivalent on the
    nested count bins) and refits; the CI is the 2.5/97.5 percentile band.
    """
    lo, hi = window
    elig = [
        i for i, th in enumerate(curve.theta)
        if lo <= th <= hi and curve.tail_counts[i] >= min_count
        and 0 < curve.p_hat[i] < 1.0
    ]
    if len(elig) < 3:
        raise InsufficientTailDataError(
            f"only {len(elig)} eligible grid points in window {window}")
    th = curve.theta[elig]
    counts = curve.tail_counts[elig]
    beta = _fit_counts(th, counts, curve.N)
    # nested bins: [not >= th_0], [>= th_i but < th_{i+1}], ..., [>= th_last]
    n = curve.N
    probs = np.empty(len(elig) + 1)
    probs[0] = (n - counts[0]) / n
    for i in range(len(elig) - 1):
        probs[i + 1] = (counts[i] - counts[i + 1]) / n
    probs[-1] = counts[-1] / n
    rng_ = np.random.default_rng(boot_seed)
    betas = []
    for _ in range(n_boot):
        draw = rng_.multinomial(n, probs)
        re_counts = np.cumsum(draw[1:][::-1])[::-1]
        if (re_counts < 1).any() or (re_counts >= n).any():
            continue
        betas.append(_fit_counts(th, re_counts, n))
    if betas:
        ci = (float(np.percentile(betas, 2.5)), float(np.percentile(betas, 97.5)))
    else:
        ci = (beta, beta)
    return ExponentFit(beta_hat=beta, ci=ci, window=(lo, hi), min_count=min_count,
                       n_points=len(elig))


def _fit_counts(th, counts, n):
    p = counts / n
    y = np.log(-np.log(p))
    return float(_wls_slope(np.log(th), y, counts.astype(np.float64)))


# ---------------------------------------------------------------------------
# limit shape


@dataclass
class LimitShapeFit:
    mu_hat: float
    G_hat: float
    H_hat: Optional[float]
    g_hat: Optional[float]
    window: tuple
    residuals: np.ndarray


def fit_limit_shape(mean_profile: dict, r: int, rho: float,
                    known_mu: Optional[float] = None,
                    fit_quartic: bool = False) -> LimitShapeFit:
    """Least squares of m(z) ~ mu r - G z^2 / r (optionally - H z^4 / r^3)
    over a symmetric window |z| <= rho r with at least 5 points.

    g_hat, the nonrandom fluctuation scale (mu r - m(0)) / r^(1/3), needs an
    externally known mu (the single-r fit absorbs the deficit into mu_hat).
    """
    zs = sorted(mean_profile)
    if len(zs) < 5:
        raise ValueError("limit-shape fit needs at least 5 profile points")
    if any(-z not in mean_profile for z in zs):
        raise ValueError("limit-shape fit needs a symmetric window")
    if max(abs(z) for z in zs) > rho * r:
        raise ValueError(f"profile exceeds the window |z| <= rho r = {rho * r}")
    z = np.array(zs, dtype=np.float64)
    m = np.array([mean_profile[zz] for zz in zs], dtype=np.float64)
    cols = [np.full_like(z, float(r)), -z * z / r]
    if fit_quartic:
        cols.append(-(z ** 4) / r ** 3)
    A = np.stack(cols, axis=1)
    coef, *_ = np.linalg.lstsq(A, m, rcond=None)
    resid = m - A @ coef
    mu_hat = float(coef[0])
    g_hat = None
    if known_mu is not None and 0 in mean_profile:
        g_hat = (known_mu * r - mean_profile[0]) / r ** (1.0 / 3.0)
    return LimitShapeFit(
        mu_hat=mu_hat, G_hat=float(coef[1]),
        H_hat=float(coef[2]) if fit_quartic else None,
        g_hat=g_hat, window=(zs[0], zs[-1]), residuals=resid)


# ---------------------------------------------------------------------------
# reference envelopes and centered interval suprema


def tw_upper_envelope(theta) -> np.ndarray:
    """exp(-(4/3) theta^(3/2)), the leading upper-tail decay in the
    (X_r - 4r) / (2^(4/3) r^(1/3)) normalization."""
    th = np.asarray(theta, dtype=np.float64)
    return np.exp(-(4.0 / 3.0) * th ** 1.5)


def tw_lower_envelope(theta) -> np.ndarray:
    """exp(-(1/12) theta^3), the leading lower-tail decay."""
    th = np.asarray(theta, dtype=np.float64)
    return np.exp(-(1.0 / 12.0) * th ** 3)


def tw_envelopes(theta_grid):
    return tw_upper_envelope(theta_grid), tw_lower_envelope(theta_grid)


def centered_interval_sup(field, interval: SetSpec, mean_table: dict) -> float:
    """sup over interval vertices v of (X_{(1,1), v} - mean_table[v])."""
    verts = interval.vertices_in(field)
    if not verts:
        raise ValueError("interval has no vertices inside the field")
    missing = [v for v in verts if v not in mean_table]
    if missing:
        raise KeyError(f"mean_table does not cover {missing[0].as_tuple()}")
    best = BOTTOM
    start = Vertex(1, 1)
    levels = {v.level for v in verts}
    prof = {}
    for lev in levels:
        prof.update(passage_profile(field, start, lev))
    for v in verts:
        val = prof.get(v, BOTTOM) - mean_table[v]
        if val > best:
            best = val
    return best
