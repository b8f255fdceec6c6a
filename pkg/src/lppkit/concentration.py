"""Stretched-exponential concentration numerics.

Sums of k independent centered Weibull variables (survival exp(-c t^alpha),
alpha in (0, 1]) transition from Gaussian behavior to single-variable
stretched-exponential decay at the crossover t = k^(1/(2-alpha)); the
experiment here measures the empirical tail against the two-regime envelope
2 exp(-c t^2 / k) / 2 exp(-c t^alpha).

The mean of the Weibull law is c^(-1/alpha) Gamma(1 + 1/alpha) (the direct
integral of the survival function; the equivalent alpha c^(-1/alpha)
Gamma(alpha) sometimes quoted holds only at alpha = 1).  The pseudo-mean
centering constant is c1 = t0 + E[W].

The bootstrap exponent schedule iterates

    beta_j  = min((3 - beta_{j-1}/2) / (3 - beta_{j-1}) * beta_{j-1}, 1)
    zeta_j  = min(alpha zeta_{j-1} / (1 + alpha zeta_{j-1})
                  * (3 - beta_{j-1}) / (3 beta_{j-1}),  2 alpha / (9 + 16 alpha))

from beta_1 = alpha, zeta_1 = infinity (the zeta factor read as 1), stopping
at n = min{j : beta_j = 1}; the final depth exponent is
zeta = min((2/3) alpha zeta_n / (1 + alpha zeta_n), 2 alpha / (9 + 16 alpha)),
which equals 2/25 for alpha = 1 and tends to 0 with alpha.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import streaming


def gamma_function(x: float) -> float:
    """Euler Gamma on (0, inf); relative error well under 1e-12."""
    if x <= 0:
        raise ValueError(f"gamma_function needs x > 0, got {x}")
    return math.gamma(x)


def weibull_mean(c: float, alpha: float) -> float:
    """E[W] for survival P(W > t) = exp(-c t^alpha)."""
    if c <= 0 or alpha <= 0:
        raise ValueError("weibull_mean needs c > 0 and alpha > 0")
    return c ** (-1.0 / alpha) * gamma_function(1.0 + 1.0 / alpha)


def bernstein_crossover(k: int, alpha: float) -> float:
    """k^(1/(2-alpha)): the boundary between Gaussian and stretched regimes."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return float(k) ** (1.0 / (2.0 - alpha))


@dataclass(frozen=True)
class ConcentrationSpec:
    alpha: float
    c: float
    t0: float
    k: int
    trials: int

    def __post_init__(self):
        if not (0 < self.alpha <= 1):
            raise ValueError("alpha must lie in (0, 1]")
        if self.c <= 0:
            raise ValueError("c must be positive")
        if self.t0 < 0:
            raise ValueError("t0 must be nonnegative")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.trials < 10**4:
            raise ValueError("sum_tail_experiment needs at least 1e4 trials")


@dataclass
class SumTailRow:
    t: float
    regime: str          # "gaussian" | "stretched"
    hits: int
    p_hat: float
    envelope: float      # 2 exp(-c_hat t^alpha), the fitted deep-tail envelope
    gaussian_ref: float  # exp(-t^2 / (2 k Var)) when the variance is known


@dataclass
class SumTailReport:
    spec: ConcentrationSpec
    crossover: float
    rows: list
    c_hat: float         # min over deep-tail points of -log(p_hat/2) / t^alpha
    c1: float            # t0 + E[W], the pseudo-mean shift constant
    mean: float
    sums: Optional[np.ndarray] = None


def sum_tail_experiment(spec: ConcentrationSpec, t_grid, master_seed: int = 0,
                        min_hits: int = 30, keep_sums: bool = False,
                        sums=None) -> SumTailReport:
    """Empirical P(sum_i (W_i - E W) >= t) against the two-regime envelope.

    The fitted envelope constant is
    c_hat = min over deep-tail grid points (t >= crossover, hits >= min_hits,
    t > 0) of -log(p_hat / 2) / t^alpha, so every such point satisfies
    p_hat <= 2 exp(-c_hat t^alpha) by construction, with equality at the
    minimizer; a positive c_hat certifies the stretched-exponential regime.

    Passing precomputed centered sums (e.g. replayed from a records file)
    skips the drawing stage.
    """
    mean = weibull_mean(spec.c, spec.alpha)
    if sums is None:
        sums = streaming.batch_weibull_sums(
            np.uint64(master_seed & 0xFFFFFFFFFFFFFFFF), np.uint64(0),
            spec.trials, spec.k, spec.alpha, spec.c, mean)
    else:
        sums = np.asarray(sums, dtype=np.float64)
        if len(sums) != spec.trials:
            raise ValueError("provided sums do not match spec.trials")
    srt = np.sort(sums)
    n = spec.trials
    cross = bernstein_crossover(spec.k, spec.alpha)
    if not any(t >= cross for t in t_grid):
        raise ValueError(f"t_grid never reaches the crossover {cross}; extend it")
    var_known = _weibull_variance(spec.c, spec.alpha)
    rows = []
    c_hat = math.inf  # stays inf when no deep point collects min_hits
    for t in t_grid:
        hits = int(n - np.searchsorted(srt, t, side="left"))
        p = hits / n
        regime = "stretched" if t >= cross else "gaussian"
        if regime == "stretched" and hits >= min_hits and t > 0:
            c_hat = min(c_hat, -math.log(p / 2.0) / t ** spec.alpha)
        g_ref = math.exp(-t * t / (2.0 * spec.k * var_known)) if t >= 0 else 1.0
        rows.append(SumTailRow(t=float(t), regime=regime, hits=hits, p_hat=p,
                               envelope=math.nan, gaussian_ref=g_ref))
    for row in rows:
        if math.isinf(c_hat):
            row.envelope = 2.0 if row.t <= 0 else 0.0
        else:
            row.envelope = 2.0 * math.exp(-c_hat * max(row.t, 0.0) ** spec.alpha)
    return SumTailReport(spec=spec, crossover=cross, rows=rows, c_hat=c_hat,
                         c1=spec.t0 + mean, mean=mean,
                         sums=sums if keep_sums else None)


def _weibull_variance(c: float, alpha: float) -> float:
    m1 = weibull_mean(c, alpha)
    m2 = c ** (-2.0 / alpha) * gamma_function(1.0 + 2.0 / alpha)
    return m2 - m1 * m1


@dataclass
class BootstrapSchedule:
    alpha: float
    betas: list        # beta_1 .. beta_n (beta_n = 1)
    zetas: list        # zeta_1 .. zeta_n (zeta_1 = inf)
    n: int
    final_zeta: float

    def lambda_coeff(self, j: int) -> float:
        """The parabolic relaxation coefficient lambda_j = 1/2 + 2^-j."""
        return 0.5 + 2.0 ** (-j)


def _zeta_factor(alpha: float, zeta: float) -> float:
    """alpha zeta / (1 + alpha zeta), read as 1 when zeta is infinite."""
    if math.isinf(zeta):
        return 1.0
    az = alpha * zeta
    return az / (1.0 + az)


def bootstrap_schedule(alpha: float) -> BootstrapSchedule:
    """Iterate the exponent recursion from beta_1 = alpha until beta_n = 1."""
    if not (0 < alpha <= 1):
        raise ValueError("alpha must lie in (0, 1]")
    zeta_cap = 2.0 * alpha / (9.0 + 16.0 * alpha)
    betas = [alpha]
    zetas = [math.inf]
    while betas[-1] < 1.0:
        b = betas[-1]
        z = zetas[-1]
        betas.append(min((3.0 - 0.5 * b) / (3.0 - b) * b, 1.0))
        zetas.append(min(_zeta_factor(alpha, z) * (3.0 - b) / (3.0 * b), zeta_cap))
    n = len(betas)
    final_zeta = min((2.0 / 3.0) * _zeta_factor(alpha, zetas[-1]), zeta_cap)
    return BootstrapSchedule(alpha=alpha, betas=betas, zetas=zetas, n=n,
                             final_zeta=final_zeta)
