"""Experiment orchestration CLI.

Subcommands: tails, shape, geodesic, watermelon, grid-audit, concentration,
schedule.  Each consumes a JSON config (documented below), runs its
experiment into --out, and emits records.jsonl, manifest.json and
summary.csv (plus plot.svg with --svg).  Global flags: --seed (overrides the
config's master_seed), --workers (also via LPPKIT_WORKERS), --out,
--report-only (rebuild summary/plot from existing records; exit 3 if absent).

Exit codes: 0 ok; 2 config parse/validation error (the diagnostic names the
offending key); 3 infeasible experiment or missing records; 4 numeric
failure.

Config schemas (unknown keys are hard errors):

  tails          dist, r, trials, master_seed, theta_grid; optional: z,
                 scaling, centering, fit_window, min_count, bootstrap,
                 experiment_id
  shape          dist, r, z_values, trials, master_seed; optional: rho,
                 known_mu, experiment_id
  geodesic       dist, r_values, trials, master_seed; optional: z,
                 experiment_id
  watermelon     dist, r, k_values, trials, master_seed; optional: mode
                 ("free"|"pinned"), known_mu, experiment_id
  grid-audit     dist, r, k_values, theta, alpha, trials, master_seed;
                 optional: z, experiment_id
  concentration  alpha, c, k, trials, t_grid, master_seed; optional: t0,
                 experiment_id
  schedule       alpha (or a list alphas); optional: experiment_id

dist is {"kind": ..., ...params}, e.g. {"kind": "exponential", "rate": 1.0};
centering is {"mode": "empirical_mean"} or {"mode": "known", "mu": 4.0}.

records.jsonl holds one JSON object per line, sorted by (r, z, trial); the
bottom sentinel serializes as the string "-inf".  Runs that sample several
streams (multiple r, z or k) suffix the stream onto experiment_id (e.g.
"shape-7/z-4") so that (experiment_id, trial) stays unique.  grid-audit
records carry the audit fields (k, exited, x_r, chain_weight, margin)
instead of a single value.  summary.csv is RFC-4180 with a `section`
discriminator column.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import statistics
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__, concentration, montecarlo
from .env import DistributionSpec, Vertex, WeightFieldSpec
from .geodesic import leftmost_geodesic
from .grid import build_grid, chain_weight, geodesic_discretization
from .montecarlo import Centering, ExperimentConfig
from .passage import deserialize_value, point_to_point, serialize_value
from .watermelon import FREE, MODES, WatermelonInfeasibleError

SCHEMA_VERSION = 1
KINDS = ("tails", "shape", "geodesic", "watermelon", "grid-audit",
         "concentration", "schedule")

EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_NUMERIC = 4


class ConfigError(ValueError):
    pass


class MissingRecordsError(RuntimeError):
    pass


@dataclass(frozen=True)
class ResultRecord:
    experiment_id: str
    trial: int
    r: int
    z: int
    statistic: str
    value: float
    seed: int

    def to_json_dict(self):
        return {
            "experiment_id": self.experiment_id,
            "trial": self.trial,
            "r": self.r,
            "z": self.z,
            "statistic": self.statistic,
            "value": serialize_value(self.value),
            "seed": self.seed,
        }

    @staticmethod
    def from_json_dict(d):
        return ResultRecord(
            experiment_id=d["experiment_id"], trial=int(d["trial"]),
            r=int(d["r"]), z=int(d["z"]), statistic=d["statistic"],
            value=deserialize_value(d["value"]), seed=int(d["seed"]))


_SCHEMAS = {
    "tails": ({"dist", "r", "trials", "master_seed", "theta_grid"},
              {"z", "scaling", "centering", "fit_window", "min_count",
               "bootstrap", "experiment_id"}),
    "shape": ({"dist", "r", "z_values", "trials", "master_seed"},
              {"rho", "known_mu", "experiment_id"}),
    "geodesic": ({"dist", "r_values", "trials", "master_seed"},
                 {"z", "experiment_id"}),
    "watermelon": ({"dist", "r", "k_values", "trials", "master_seed"},
                   {"mode", "known_mu", "experiment_id"}),
    "grid-audit": ({"dist", "r", "k_values", "theta", "alpha", "trials",
                    "master_seed"},
                   {"z", "experiment_id"}),
    "concentration": ({"alpha", "c", "k", "trials", "t_grid", "master_seed"},
                      {"t0", "experiment_id"}),
    "schedule": (set(), {"alpha", "alphas", "experiment_id"}),
}


def load_config(path: str, kind: str) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except OSError as e:
        raise ConfigError(f"cannot read config: {e}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"config is not valid JSON: {e}") from e
    if not isinstance(cfg, dict):
        raise ConfigError("config must be a JSON object")
    required, optional = _SCHEMAS[kind]
    for key in cfg:
        if key not in required and key not in optional:
            raise ConfigError(f"unknown config key {key!r} for kind {kind!r}")
    for key in sorted(required):
        if key not in cfg:
            raise ConfigError(f"missing config key {key!r} for kind {kind!r}")
    if kind == "schedule" and "alpha" not in cfg and "alphas" not in cfg:
        raise ConfigError("schedule config needs 'alpha' or 'alphas'")
    try:
        if "dist" in cfg:
            cfg = dict(cfg)
            cfg["dist"] = DistributionSpec.from_config(cfg["dist"])
        if "centering" in cfg:
            cfg = dict(cfg)
            cfg["centering"] = Centering.from_config(cfg["centering"])
    except ValueError as e:
        raise ConfigError(str(e)) from e
    if cfg.get("mode", FREE) not in MODES:
        raise ConfigError(f"unknown watermelon mode {cfg['mode']!r}")
    return cfg


def _config_for_manifest(cfg: dict):
    out = {}
    for k, v in cfg.items():
        if isinstance(v, DistributionSpec):
            out[k] = v.to_config()
        elif isinstance(v, Centering):
            out[k] = v.to_config()
        else:
            out[k] = v
    return out


def _write_manifest(out_dir, kind, cfg, experiment_id):
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "code_version": __version__,
        "kind": kind,
        "experiment_id": experiment_id,
        "master_seed": cfg.get("master_seed"),
        "config": _config_for_manifest(cfg),
    }
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_records(out_dir, rows):
    with open(os.path.join(out_dir, "records.jsonl"), "w") as fh:
        for row in rows:
            fh.write(json.dumps(row, sort_keys=True))
            fh.write("\n")


def read_records(out_dir):
    path = os.path.join(out_dir, "records.jsonl")
    if not os.path.exists(path):
        raise MissingRecordsError(f"no records.jsonl in {out_dir}")
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]


def _write_summary(out_dir, header, rows):
    with open(os.path.join(out_dir, "summary.csv"), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)


# ---------------------------------------------------------------------------
# runners


def _run_tails(cfg, workers):
    eid = cfg.get("experiment_id", f"tails-{cfg['master_seed']}")
    mc = ExperimentConfig(
        dist=cfg["dist"], statistic="point", r_values=(int(cfg["r"]),),
        trials=int(cfg["trials"]), master_seed=int(cfg["master_seed"]),
        z_values=(int(cfg.get("z", 0)),),
        centering=cfg.get("centering", montecarlo.EMPIRICAL_MEAN),
        scaling=float(cfg.get("scaling", 1.0)),
        theta_grid=tuple(float(t) for t in cfg["theta_grid"]))
    records = [
        ResultRecord(eid, t.trial, t.r, t.z, t.statistic, t.value,
                     mc.master_seed).to_json_dict()
        for t in montecarlo.run_trials(mc, workers)
    ]
    return eid, records


def _summary_tails(cfg, records, out_dir):
    r = int(cfg["r"])
    values = np.array([deserialize_value(d["value"]) for d in records])
    centering = cfg.get("centering", montecarlo.EMPIRICAL_MEAN)
    scaling = float(cfg.get("scaling", 1.0))
    grid = [float(t) for t in cfg["theta_grid"]]
    window = cfg.get("fit_window") or (grid[0], grid[-1])
    min_count = int(cfg.get("min_count", 50))
    n_boot = int(cfg.get("bootstrap", 200))
    env_up, env_lo = montecarlo.tw_envelopes(grid)
    header = ["section", "side", "theta", "count", "p_hat", "ci_lo", "ci_hi",
              "tw_envelope", "beta_hat", "beta_lo", "beta_hi", "n_points"]
    rows = []
    curves = {}
    for side, env in (("upper", env_up), ("lower", env_lo)):
        curve = montecarlo.empirical_tail(values, r, centering, scaling, grid, side)
        curves[side] = curve
        for i, th in enumerate(grid):
            rows.append(["curve", side, th, int(curve.tail_counts[i]),
                         curve.p_hat[i], curve.ci95[i][0], curve.ci95[i][1],
                         env[i], "", "", "", ""])
    for side, curve in curves.items():
        try:
            fit = montecarlo.fit_tail_exponent(curve, window, min_count, n_boot)
            rows.append(["fit", side, "", "", "", "", "", "", fit.beta_hat,
                         fit.ci[0], fit.ci[1], fit.n_points])
        except montecarlo.InsufficientTailDataError as e:
            rows.append(["fit", side, "", "", "", "", "", "", "", "", "", str(e)])
    _write_summary(out_dir, header, rows)
    return curves


def _sub_id(eid, multi, **parts):
    """Per-stream record id; keeps (experiment_id, trial) unique in a run."""
    if not multi:
        return eid
    return eid + "/" + "".join(f"{k}{v}" for k, v in parts.items())


def _run_shape(cfg, workers):
    eid = cfg.get("experiment_id", f"shape-{cfg['master_seed']}")
    zs = tuple(int(z) for z in cfg["z_values"])
    mc = ExperimentConfig(
        dist=cfg["dist"], statistic="point", r_values=(int(cfg["r"]),),
        trials=int(cfg["trials"]), master_seed=int(cfg["master_seed"]),
        z_values=zs, rho=float(cfg.get("rho", 0.3)))
    multi = len(zs) > 1
    records = [
        ResultRecord(_sub_id(eid, multi, z=t.z), t.trial, t.r, t.z,
                     t.statistic, t.value, mc.master_seed).to_json_dict()
        for t in montecarlo.run_trials(mc, workers)
    ]
    return eid, records


def _summary_shape(cfg, records, out_dir):
    r = int(cfg["r"])
    by_z = {}
    for d in records:
        by_z.setdefault(int(d["z"]), []).append(deserialize_value(d["value"]))
    header = ["section", "z", "n", "mean", "stderr", "mu_hat", "G_hat",
              "g_hat", "max_abs_residual"]
    rows = []
    profile = {}
    for z in sorted(by_z):
        vals = np.array(by_z[z])
        profile[z] = float(vals.mean())
        se = float(vals.std(ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else 0.0
        rows.append(["profile", z, len(vals), profile[z], se, "", "", "", ""])
    fit = montecarlo.fit_limit_shape(profile, r, float(cfg.get("rho", 0.3)),
                                     known_mu=cfg.get("known_mu"))
    rows.append(["fit", "", "", "", "", fit.mu_hat, fit.G_hat,
                 "" if fit.g_hat is None else fit.g_hat,
                 float(np.abs(fit.residuals).max())])
    _write_summary(out_dir, header, rows)
    return fit


def _run_geodesic(cfg, workers):
    eid = cfg.get("experiment_id", f"geodesic-{cfg['master_seed']}")
    rs = tuple(int(r) for r in cfg["r_values"])
    mc = ExperimentConfig(
        dist=cfg["dist"], statistic="tf", r_values=rs,
        trials=int(cfg["trials"]), master_seed=int(cfg["master_seed"]),
        z_values=(int(cfg.get("z", 0)),))
    records = [
        ResultRecord(_sub_id(eid, len(rs) > 1, r=t.r), t.trial, t.r, t.z,
                     t.statistic, t.value, mc.master_seed).to_json_dict()
        for t in montecarlo.run_trials(mc, workers)
    ]
    return eid, records


def _summary_geodesic(cfg, records, out_dir):
    by_r = {}
    for d in records:
        by_r.setdefault(int(d["r"]), []).append(deserialize_value(d["value"]))
    header = ["section", "r", "n", "median_tf", "median_tf_over_r23"]
    rows = []
    for r in sorted(by_r):
        med = statistics.median(by_r[r])
        rows.append(["tf", r, len(by_r[r]), med, med / r ** (2.0 / 3.0)])
    _write_summary(out_dir, header, rows)


def _run_watermelon(cfg, workers):
    eid = cfg.get("experiment_id", f"watermelon-{cfg['master_seed']}")
    r = int(cfg["r"])
    ks = sorted(int(k) for k in cfg["k_values"])
    mode = cfg.get("mode", FREE)
    seed = int(cfg["master_seed"])
    trials = int(cfg["trials"])
    mc = ExperimentConfig(
        dist=cfg["dist"], statistic="watermelon", r_values=(r,),
        trials=trials, master_seed=seed, k=max(ks), melon_mode=mode)
    if mode == FREE:
        rows = montecarlo._pooled(_melon_totals_value, mc, 0, workers)
        records = []
        multi = len(ks) > 1
        for t in range(trials):
            for k in ks:
                records.append(ResultRecord(
                    _sub_id(eid, multi, k=k), t, r, 0, f"watermelon_k{k}",
                    float(rows[t][k - 1]), seed).to_json_dict())
        return eid, records
    records = []
    for t in montecarlo.run_trials(mc, workers):
        records.append(ResultRecord(eid, t.trial, t.r, t.z,
                                    f"watermelon_k{max(ks)}", t.value,
                                    seed).to_json_dict())
    return eid, records


def _melon_totals_value(config, r_index, trial, z=0):
    """Free-mode totals X_r^j for j = 1..k from a single solve."""
    from .watermelon import watermelon_totals
    r = config.r_values[r_index]
    spec = WeightFieldSpec(config.master_seed, config.dist, r, r,
                           montecarlo.stream_tag(r_index, trial))
    totals = watermelon_totals(spec.materialize(), r, config.k)
    return [totals[j] for j in range(1, config.k + 1)]


def _summary_watermelon(cfg, records, out_dir):
    r = int(cfg["r"])
    by_k = {}
    for d in records:
        k = int(d["statistic"].split("_k")[1])
        by_k.setdefault(k, []).append(deserialize_value(d["value"]))
    ks_cfg = sorted(int(k) for k in cfg["k_values"])
    mu = cfg.get("known_mu")
    header = ["section", "k", "n", "mean_total", "stderr", "deficit",
              "deficit_over_k53"]
    rows = []
    for k in sorted(by_k):
        if k not in ks_cfg:
            continue
        vals = np.array(by_k[k])
        mean = float(vals.mean())
        se = float(vals.std(ddof=1) / math.sqrt(len(vals))) if len(vals) > 1 else 0.0
        if mu is not None:
            deficit = mu * k * r - mean
        elif 1 in by_k:
            deficit = float(np.mean(by_k[1])) * k - mean
        else:
            deficit = None
        rows.append(["melon", k, len(vals), mean, se,
                     "" if deficit is None else deficit,
                     "" if deficit is None else deficit / k ** (5.0 / 3.0)])
    _write_summary(out_dir, header, rows)


def _run_grid_audit(cfg, workers):
    eid = cfg.get("experiment_id", f"grid-audit-{cfg['master_seed']}")
    r = int(cfg["r"])
    z = int(cfg.get("z", 0))
    seed = int(cfg["master_seed"])
    theta = float(cfg["theta"])
    alpha = float(cfg["alpha"])
    dist = cfg["dist"]
    records = []
    ks = sorted(int(k) for k in cfg["k_values"])
    for k in ks:
        g = build_grid(r, k, z, theta, alpha)
        sub = _sub_id(eid, len(ks) > 1, k=k)
        for t in range(int(cfg["trials"])):
            spec = WeightFieldSpec(seed, dist, r + abs(z), r + abs(z),
                                   montecarlo.stream_tag(0, t))
            f = spec.materialize()
            geo = leftmost_geodesic(f, Vertex(1, 1), Vertex(r - z, r + z))
            x_r = point_to_point(f, Vertex(1, 1), Vertex(r - z, r + z))
            d = geodesic_discretization(geo.path, g)
            if d is None:
                records.append({"experiment_id": sub, "trial": t, "r": r,
                                "z": z, "k": k, "exited": True, "x_r": x_r,
                                "chain_weight": serialize_value(montecarlo.BOTTOM),
                                "margin": serialize_value(montecarlo.BOTTOM),
                                "seed": seed})
                continue
            cw = chain_weight(f, g, d)
            records.append({"experiment_id": sub, "trial": t, "r": r, "z": z,
                            "k": k, "exited": False, "x_r": x_r,
                            "chain_weight": cw, "margin": cw - x_r,
                            "seed": seed})
    return eid, records


def _summary_grid_audit(cfg, records, out_dir):
    header = ["section", "k", "n", "exits", "exit_rate", "min_margin",
              "domination_ok"]
    by_k = {}
    for d in records:
        by_k.setdefault(int(d["k"]), []).append(d)
    rows = []
    for k in sorted(by_k):
        recs = by_k[k]
        exits = sum(1 for d in recs if d["exited"])
        margins = [deserialize_value(d["margin"]) for d in recs if not d["exited"]]
        min_margin = min(margins) if margins else ""
        ok = all(m >= 0 for m in margins)
        rows.append(["grid", k, len(recs), exits, exits / len(recs),
                     min_margin, ok])
    _write_summary(out_dir, header, rows)


def _run_concentration(cfg, workers):
    eid = cfg.get("experiment_id", f"concentration-{cfg['master_seed']}")
    spec = concentration.ConcentrationSpec(
        alpha=float(cfg["alpha"]), c=float(cfg["c"]),
        t0=float(cfg.get("t0", 0.0)), k=int(cfg["k"]), trials=int(cfg["trials"]))
    report = concentration.sum_tail_experiment(
        spec, [float(t) for t in cfg["t_grid"]],
        master_seed=int(cfg["master_seed"]), keep_sums=True)
    records = [{
        "experiment_id": eid, "trial": t, "r": spec.k, "z": 0,
        "statistic": "weibull_sum", "value": float(report.sums[t]),
        "seed": int(cfg["master_seed"]),
    } for t in range(spec.trials)]
    return eid, records, report


def _summary_concentration(cfg, report, out_dir):
    header = ["section", "t", "regime", "hits", "p_hat", "envelope",
              "gaussian_ref", "c_hat", "c1", "crossover"]
    rows = []
    for row in report.rows:
        rows.append(["tail", row.t, row.regime, row.hits, row.p_hat,
                     row.envelope, row.gaussian_ref, "", "", ""])
    rows.append(["fit", "", "", "", "", "", "", report.c_hat, report.c1,
                 report.crossover])
    _write_summary(out_dir, header, rows)


def _run_schedule(cfg, out_dir):
    eid = cfg.get("experiment_id", "schedule")
    alphas = cfg.get("alphas") or [cfg["alpha"]]
    header = ["section", "alpha", "j", "beta_j", "zeta_j", "n", "final_zeta"]
    rows = []
    for a in alphas:
        sched = concentration.bootstrap_schedule(float(a))
        for j, (b, zt) in enumerate(zip(sched.betas, sched.zetas), start=1):
            rows.append(["iterate", a, j, b,
                         "inf" if math.isinf(zt) else zt, "", ""])
        rows.append(["final", a, "", "", "", sched.n, sched.final_zeta])
    _write_summary(out_dir, header, rows)
    return eid, []


# ---------------------------------------------------------------------------
# plotting (optional)


def _plot(out_dir, kind, cfg):
    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError as e:
        raise RuntimeError("plotting requires matplotlib (install lppkit[plots])") from e
    path = os.path.join(out_dir, "plot.svg")
    fig, ax = plt.subplots(figsize=(6, 4))
    if kind == "tails":
        import collections
        rows = _read_summary(out_dir)
        by_side = collections.defaultdict(list)
        for row in rows:
            if row["section"] == "curve":
                by_side[row["side"]].append(row)
        for side, pts in by_side.items():
            th = [float(p["theta"]) for p in pts]
            ph = [float(p["p_hat"]) for p in pts]
            ax.semilogy(th, ph, "o-", label=f"empirical {side}")
            env = [float(p["tw_envelope"]) for p in pts]
            style = "--" if side == "upper" else ":"
            ax.semilogy(th, env, style, label=f"TW {side} envelope")
        ax.set_xlabel("theta")
        ax.set_ylabel("tail probability")
        ax.legend()
    else:
        rows = _read_summary(out_dir)
        xs = list(range(len(rows)))
        ys = []
        for row in rows:
            for key in ("p_hat", "mean", "mean_total", "median_tf", "beta_j"):
                if key in row and row[key] not in ("", None):
                    ys.append(float(row[key]))
                    break
            else:
                ys.append(0.0)
        ax.plot(xs[: len(ys)], ys, "o-")
        ax.set_xlabel("row")
        ax.set_ylabel("value")
    ax.set_title(f"{kind} ({cfg.get('experiment_id', '')})")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def _read_summary(out_dir):
    with open(os.path.join(out_dir, "summary.csv"), newline="") as fh:
        return list(csv.DictReader(fh))


# ---------------------------------------------------------------------------
# entry point


def _revive_config(d: dict) -> dict:
    cfg = dict(d)
    if "dist" in cfg:
        cfg["dist"] = DistributionSpec.from_config(cfg["dist"])
    if "centering" in cfg:
        cfg["centering"] = Centering.from_config(cfg["centering"])
    return cfg


def _emit_summary(cfg, kind, records, out_dir):
    if kind == "tails":
        _summary_tails(cfg, records, out_dir)
    elif kind == "shape":
        _summary_shape(cfg, records, out_dir)
    elif kind == "geodesic":
        _summary_geodesic(cfg, records, out_dir)
    elif kind == "watermelon":
        _summary_watermelon(cfg, records, out_dir)
    elif kind == "grid-audit":
        _summary_grid_audit(cfg, records, out_dir)
    elif kind == "concentration":
        spec = concentration.ConcentrationSpec(
            alpha=float(cfg["alpha"]), c=float(cfg["c"]),
            t0=float(cfg.get("t0", 0.0)), k=int(cfg["k"]),
            trials=int(cfg["trials"]))
        sums = [deserialize_value(d["value"])
                for d in sorted(records, key=lambda d: d["trial"])]
        report = concentration.sum_tail_experiment(
            spec, [float(t) for t in cfg["t_grid"]], sums=sums)
        _summary_concentration(cfg, report, out_dir)
    elif kind == "schedule":
        _run_schedule(cfg, out_dir)
    else:
        raise ConfigError(f"unknown kind {kind!r}")


def emit_report(output_dir: str, kind: str = None, svg: bool = False,
                cfg: dict = None) -> str:
    """Rebuild summary.csv (and optionally plot.svg) from an existing run.

    The config is recovered from manifest.json unless given explicitly;
    missing records or manifest raise MissingRecordsError (CLI exit 3).
    """
    manifest_path = os.path.join(output_dir, "manifest.json")
    if cfg is None or kind is None:
        if not os.path.exists(manifest_path):
            raise MissingRecordsError(f"no manifest.json in {output_dir}")
        with open(manifest_path) as fh:
            manifest = json.load(fh)
        if kind is None:
            kind = manifest["kind"]
        if cfg is None:
            cfg = _revive_config(manifest["config"])
    records = read_records(output_dir) if kind != "schedule" else []
    _emit_summary(cfg, kind, records, output_dir)
    if svg:
        _plot(output_dir, kind, cfg)
    return output_dir


def run_experiment(config_path: str, out_dir: str, kind: str,
                   seed_override=None, workers: int = 1,
                   report_only: bool = False, svg: bool = False) -> str:
    cfg = load_config(config_path, kind)
    if seed_override is not None and "master_seed" in _SCHEMAS[kind][0]:
        cfg["master_seed"] = int(seed_override)
    os.makedirs(out_dir, exist_ok=True)
    if report_only:
        return emit_report(out_dir, kind, svg=svg, cfg=cfg)
    if kind == "tails":
        eid, records = _run_tails(cfg, workers)
    elif kind == "shape":
        eid, records = _run_shape(cfg, workers)
    elif kind == "geodesic":
        eid, records = _run_geodesic(cfg, workers)
    elif kind == "watermelon":
        eid, records = _run_watermelon(cfg, workers)
    elif kind == "grid-audit":
        eid, records = _run_grid_audit(cfg, workers)
    elif kind == "concentration":
        eid, records, report = _run_concentration(cfg, workers)
    elif kind == "schedule":
        eid, records = _run_schedule(cfg, out_dir)
    else:
        raise ConfigError(f"unknown kind {kind!r}")
    _write_records(out_dir, records)
    _write_manifest(out_dir, kind, cfg, eid)
    if kind == "concentration":
        _summary_concentration(cfg, report, out_dir)
    elif kind != "schedule":  # schedule writes its table inside the runner
        _emit_summary(cfg, kind, records, out_dir)
    if svg:
        _plot(out_dir, kind, cfg)
    return out_dir


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="lppkit",
        description="Last passage percolation experiments.")
    sub = parser.add_subparsers(dest="kind", required=True)
    for kind in KINDS:
        p = sub.add_parser(kind)
        if kind == "schedule":
            p.add_argument("config", nargs="?", help="JSON config (optional)")
            p.add_argument("--alpha", type=float, help="tail exponent alpha")
        else:
            p.add_argument("config", help="JSON config file")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config's master_seed")
        p.add_argument("--workers", type=int, default=None,
                       help="worker count (default: LPPKIT_WORKERS or 1)")
        p.add_argument("--report-only", action="store_true",
                       help="rebuild summary from existing records")
        p.add_argument("--svg", action="store_true", help="emit plot.svg")
    args = parser.parse_args(argv)
    workers = args.workers
    if workers is None:
        workers = int(os.environ.get("LPPKIT_WORKERS", "1"))
    try:
        if args.kind == "schedule" and args.config is None:
            if args.alpha is None:
                raise ConfigError("schedule needs a config file or --alpha")
            os.makedirs(args.out, exist_ok=True)
            _run_schedule({"alpha": args.alpha}, args.out)
            _write_records(args.out, [])
            _write_manifest(args.out, "schedule", {"alpha": args.alpha}, "schedule")
            return 0
        run_experiment(args.config, args.out, args.kind,
                       seed_override=args.seed, workers=workers,
                       report_only=args.report_only, svg=args.svg)
        return 0
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (WatermelonInfeasibleError, MissingRecordsError) as e:
        print(f"infeasible: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (montecarlo.InsufficientTailDataError, FloatingPointError,
            ZeroDivisionError, OverflowError) as e:
        print(f"numeric failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
