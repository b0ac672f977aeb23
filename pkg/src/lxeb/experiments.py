"""Monte Carlo orchestration and report persistence.

Trials are independent: trial ``i`` draws every gate from streams derived
from ``(master_seed, i, gate_counter)``, so the records do not depend on the
worker count or on the order trials finish in. Reductions run in trial-index
order.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import bounds, moments
from .config import ExperimentConfig
from .core import full_distribution, run_circuit, sample_outcomes
from .ensembles import build_circuit, sample_haar_orthogonal, sample_haar_unitary
from .estimators import (
    collision_probability_exact,
    is_uniform_distribution,
    lxeb_test,
    max_output_probability,
    maxp_threshold,
    mean_and_se,
    sample_variance_over_outputs,
)
from .seeding import MASK64, derive_trial_seed, philox_stream, SeedPlan

CSV_HEADER = ("trial", "seed", "collision_prob", "max_prob", "sample_variance", "lxeb_stat", "pass")
SE_FLAG = 5.0
PT_RANGE = (0.0, 10.0)
MOMENT_CHUNK = 10_000
SAMPLING_COUNTER = MASK64  # gate counters never get here


@dataclass
class TrialRecord:
    trial: int
    seed: int
    collision_prob: float | None = None
    max_prob: float | None = None
    sample_variance: float | None = None
    lxeb_stat: float | None = None
    passed: bool | None = None
    pt_counts: np.ndarray | None = field(default=None, repr=False)

    def row(self) -> list[str]:
        def num(x):
            return "" if x is None else format(x, ".17g")
        flag = "" if self.passed is None else str(int(self.passed))
        return [str(self.trial), str(self.seed), num(self.collision_prob), num(self.max_prob),
                num(self.sample_variance), num(self.lxeb_stat), flag]

    def as_dict(self) -> dict:
        return {
            "trial": self.trial,
            "seed": self.seed,
            "collision_prob": self.collision_prob,
            "max_prob": self.max_prob,
            "sample_variance": self.sample_variance,
            "lxeb_stat": self.lxeb_stat,
            "pass": self.passed,
        }


@dataclass
class ExperimentReport:
    config: dict
    records: list
    aggregates: dict
    oracles: dict
    guarantees: list
    checks: list
    histograms: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)
    elapsed_seconds: float = 0.0  # wall clock; kept out of report.json
    workers: int = 1

    def as_dict(self) -> dict:
        return {
            "config": self.config,
            "aggregates": self.aggregates,
            "oracles": self.oracles,
            "guarantees": self.guarantees,
            "checks": self.checks,
            "histograms": self.histograms,
            "notes": self.notes,
            "records": [r.as_dict() for r in self.records],
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=False) + "\n"

    def trials_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in self.records:
            w.writerow(r.row())
        return buf.getvalue()

    def check(self, name: str) -> dict:
        for c in self.checks:
            if c["name"] == name:
                return c
        raise KeyError(name)


def config_echo(config: ExperimentConfig) -> dict:
    """Config as written into report.json, minus settings that cannot change results."""
    out = config.to_dict()
    out.pop("workers")
    out.pop("output_dir")
    return out


def exact(value: Fraction) -> dict:
    return {"exact": f"{value.numerator}/{value.denominator}", "value": float(value)}


def _check(name, value, target, passed, **extra) -> dict:
    out = {"name": name, "value": value, "target": target, "passed": bool(passed)}
    out.update(extra)
    return out


# -- trial execution -----------------------------------------------------------

def run_trial(config: ExperimentConfig, trial_index: int) -> TrialRecord:
    plan = SeedPlan(config.master_seed, trial_index)
    circuit = build_circuit(config.ensemble, plan)
    dist = full_distribution(run_circuit(circuit, config.max_qubits))
    rec = TrialRecord(
        trial=trial_index,
        seed=plan.trial_seed,
        collision_prob=collision_probability_exact(dist),
        max_prob=max_output_probability(dist),
        sample_variance=sample_variance_over_outputs(dist),
    )
    if config.experiment == "lxeb":
        samples = sample_outcomes(dist, config.k, philox_stream(plan.trial_seed, SAMPLING_COUNTER))
        res = lxeb_test(dist, samples, config.b)
        rec.lxeb_stat, rec.passed = res.statistic, res.passed
    elif config.experiment == "clifford-uniformity":
        rec.passed = is_uniform_distribution(dist)
    rec.pt_counts = np.histogram(dist.probs * dist.probs.size, bins=config.hist_bins, range=PT_RANGE)[0]
    return rec


def _run_trial_star(args):
    return run_trial(*args)


def _parallel_map(fn, items, workers):
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    chunk = max(1, len(items) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=chunk))


def run_trials(config: ExperimentConfig) -> list[TrialRecord]:
    records = _parallel_map(_run_trial_star, [(config, i) for i in range(config.trials)], config.workers)
    records.sort(key=lambda r: r.trial)
    return records


# -- reductions ------------------------------------------------------------------

def _stats(values) -> dict:
    values = np.asarray(values, dtype=np.float64)
    mean = math.fsum(values) / values.size
    var = math.fsum((values - mean) ** 2) / (values.size - 1) if values.size > 1 else math.nan
    return {"mean": mean, "variance": var, "min": float(values.min()), "max": float(values.max()),
            "count": int(values.size)}


def _quantiles(values, qs=(0.5, 0.9, 0.99, 1.0)) -> dict:
    return {str(q): float(np.quantile(values, q)) for q in qs}


def _pt_histogram(config, records) -> dict:
    counts = np.sum([r.pt_counts for r in records], axis=0)
    edges = np.linspace(*PT_RANGE, config.hist_bins + 1)
    total_outputs = len(records) * 2 ** config.ensemble.n
    expected = np.exp(-edges[:-1]) - np.exp(-edges[1:])
    return {
        "edges": edges.tolist(),
        "counts": counts.astype(int).tolist(),
        "total": total_outputs,
        "porter_thomas_mass": expected.tolist(),
    }


def _base_report(config, records) -> ExperimentReport:
    return ExperimentReport(
        config=config_echo(config),
        records=records,
        aggregates={},
        oracles={},
        guarantees=[],
        checks=[],
        histograms={"porter_thomas": _pt_histogram(config, records)},
        notes=[f"gate ensemble {config.ensemble.kind}, {config.ensemble.architecture}, "
               f"n={config.ensemble.n}, depth={config.ensemble.depth}"],
    )


def _guarantee_block(theorems, k, n) -> list:
    out = []
    for th in theorems:
        g = bounds.guarantee(th, k, n).as_dict()
        g["label"] = f"vacuous at n={n}, k={k}" if g["vacuous"] else "non-vacuous"
        out.append(g)
    return out


def _collision_section(report, config, records):
    n = config.ensemble.n
    d = 2**n
    group = config.group
    cps = np.array([r.collision_prob for r in records])
    mean_oracle = moments.collision_mean(d, group)
    var_oracle = moments.collision_variance(d, group)
    stats = _stats(cps)
    report.aggregates["collision_prob"] = stats
    report.aggregates["collision_deviation_quantiles"] = _quantiles(np.abs(cps - float(mean_oracle)))
    report.oracles["collision_mean"] = exact(mean_oracle)
    report.oracles["collision_variance"] = exact(var_oracle)
    ladder = []
    for c in config.deltas:
        delta = c / d
        frac = float(np.count_nonzero(np.abs(cps - float(mean_oracle)) >= delta)) / cps.size
        # chebyshev with the approximate-design second-moment bound
        predicted = bounds.chebyshev_tail(5 / d**3 if group == "unitary" else 25 / d**3, delta)
        ladder.append({"delta_times_d": c, "delta": delta, "fraction": frac, "chebyshev_bound": predicted})
    report.aggregates["deviation_ladder"] = ladder
    rel = abs(stats["mean"] - float(mean_oracle)) / float(mean_oracle)
    report.aggregates["collision_mean_relative_error"] = rel
    return stats, rel, var_oracle


def run_collision_experiment(config: ExperimentConfig) -> ExperimentReport:
    records = run_trials(config)
    report = _base_report(config, records)
    stats, rel, var_oracle = _collision_section(report, config, records)
    tol = 0.01 if config.group == "unitary" else 0.02
    report.checks.append(_check("collision_mean", stats["mean"], report.oracles["collision_mean"]["value"],
                                rel <= tol, relative_error=rel, tolerance=tol))
    report.checks.append(_check("collision_variance", stats["variance"], float(var_oracle),
                                stats["variance"] <= 2 * float(var_oracle), bound="2 x Haar variance"))
    return report


def run_orthogonal_collision(config: ExperimentConfig) -> ExperimentReport:
    return run_collision_experiment(config)


def run_lxeb_experiment(config: ExperimentConfig) -> ExperimentReport:
    records = run_trials(config)
    report = _base_report(config, records)
    n, k = config.ensemble.n, config.k
    stats = [r.lxeb_stat for r in records]
    passes = sum(bool(r.passed) for r in records)
    frac = passes / len(records)
    report.aggregates["lxeb_stat"] = _stats(stats)
    report.aggregates["lxeb_stat_times_d"] = report.aggregates["lxeb_stat"]["mean"] * 2**n
    report.aggregates["pass_count"] = passes
    report.aggregates["pass_fraction"] = frac
    report.aggregates["threshold"] = config.b / 2**n
    report.oracles["collision_mean"] = exact(moments.collision_mean(2**n, config.group))
    theorems = ["orthogonal"] if config.group == "orthogonal" else ["lindepth", "8design", "polydepth"]
    report.guarantees = _guarantee_block(theorems, k, n)
    report.checks.append(_check("pass_fraction", frac, 0.95, frac >= 0.95))
    report.notes.append("guarantees use asymptotic constants; a vacuous label means the bound says nothing here")
    return report


def run_maxp_experiment(config: ExperimentConfig) -> ExperimentReport:
    records = run_trials(config)
    report = _base_report(config, records)
    n = config.ensemble.n
    d = 2**n
    thr = maxp_threshold(n)
    maxps = np.array([r.max_prob for r in records])
    exceed = float(np.count_nonzero(maxps >= thr)) / maxps.size
    report.aggregates["max_prob"] = _stats(maxps)
    report.aggregates["threshold"] = thr
    report.aggregates["threshold_reachable"] = thr <= 1.0
    report.aggregates["exceed_fraction"] = exceed
    scaled = maxps * d / n
    counts, edges = np.histogram(scaled, bins=config.hist_bins, range=(0.0, max(4.0, float(scaled.max()))))
    report.histograms["max_prob_scaled"] = {"edges": edges.tolist(), "counts": counts.tolist(),
                                            "quantity": "d * max_x p(x) / n"}
    report.oracles["maxp_tail"] = bounds.maxp_tail(n)
    limit = 0.01 if config.group == "unitary" else 0.02
    report.checks.append(_check("exceed_fraction", exceed, limit, exceed <= limit, tail_bound=bounds.maxp_tail(n)))
    return report


def run_variance_experiment(config: ExperimentConfig) -> ExperimentReport:
    records = run_trials(config)
    report = _base_report(config, records)
    n = config.ensemble.n
    d = 2**n
    group = config.group
    vs = np.array([r.sample_variance for r in records])
    oracle = moments.sample_variance_mean(d, group)
    stats = _stats(vs)
    level, tail = (8 / d**2, 4 / d) if group == "unitary" else (12 / d**2, 75 / d)
    frac = float(np.count_nonzero(vs >= level)) / vs.size
    report.aggregates["sample_variance"] = stats
    report.aggregates["exceed_level"] = level
    report.aggregates["exceed_fraction"] = frac
    report.oracles["sample_variance_mean"] = exact(oracle)
    report.oracles["variance_of_variance"] = exact(moments.variance_of_variance(d, group))
    report.oracles["exceed_tail_bound"] = tail
    rel = abs(stats["mean"] - float(oracle)) / float(oracle) if oracle else abs(stats["mean"])
    report.checks.append(_check("sample_variance_mean", stats["mean"], float(oracle), rel <= 0.05,
                                relative_error=rel, tolerance=0.05))
    report.checks.append(_check("exceed_fraction", frac, 0.02, frac <= 0.02, tail_bound=tail))
    return report


def uniform_stabilizer_fraction(n: int) -> float:
    """Fraction of n-qubit stabilizer states whose output distribution is uniform."""
    return math.prod(1 / (1 + 2.0**-j) for j in range(1, n + 1))


def run_clifford_uniformity(config: ExperimentConfig) -> ExperimentReport:
    records = run_trials(config)
    report = _base_report(config, records)
    n = config.ensemble.n
    uniform = sum(bool(r.passed) for r in records)
    frac = uniform / len(records)
    report.aggregates["uniform_count"] = uniform
    report.aggregates["uniform_fraction"] = frac
    report.aggregates["uniform_fraction_se"] = math.sqrt(frac * (1 - frac) / len(records))
    report.oracles["uniform_stabilizer_fraction"] = uniform_stabilizer_fraction(n)
    report.checks.append(_check("uniform_fraction", frac, [0.30, 0.50], 0.30 <= frac <= 0.50))
    report.notes.append("pass column holds the uniform-output flag for this experiment")
    return report


# -- full-Haar moment validation -------------------------------------------------

def _first_column_probs(d, group, seed, counter, size):
    stream = philox_stream(seed, counter)
    sampler = sample_haar_unitary if group == "unitary" else sample_haar_orthogonal
    u = sampler(d, stream, size=size)
    col = u[:, :, 0]
    return col.real**2 + col.imag**2


def _moment_chunk(args):
    d, group, seed, counter, size = args
    return _first_column_probs(d, group, seed, counter, size)


def haar_output_probs(config: ExperimentConfig, d: int) -> np.ndarray:
    """``trials`` rows of |U e_0|^2 for Haar U of dimension d, chunked independently of workers."""
    jobs = []
    for chunk, start in enumerate(range(0, config.trials, MOMENT_CHUNK)):
        size = min(MOMENT_CHUNK, config.trials - start)
        jobs.append((d, config.group, derive_trial_seed(config.master_seed, chunk), d, size))
    return np.concatenate(_parallel_map(_moment_chunk, jobs, config.workers))


def variance_se(values: np.ndarray) -> tuple[float, float]:
    """Unbiased sample variance and its large-sample standard error."""
    values = np.asarray(values, dtype=np.float64)
    m = values.size
    mean = math.fsum(values) / m
    dev = values - mean
    s2 = math.fsum(dev**2) / (m - 1)
    m4 = math.fsum(dev**4) / m
    return s2, math.sqrt(max(m4 - s2 * s2, 0.0) / m)


def run_moment_validation(config: ExperimentConfig) -> ExperimentReport:
    group = config.group
    report = ExperimentReport(config=config_echo(config), records=[], aggregates={}, oracles={},
                              guarantees=[], checks=[])
    report.notes.append("aggregate-only experiment: samples are single Haar matrices, no per-trial CSV rows")
    for d in config.dims:
        probs = haar_output_probs(config, d)
        entry = {}
        for t in config.moment_orders:
            oracle = moments.haar_moment((t,), d, group)
            mean, se = mean_and_se(probs[:, 0] ** t)
            z = (mean - float(oracle)) / se if se > 0 else 0.0
            entry[f"p0^{t}"] = {"mean": mean, "se": se, "oracle": exact(oracle), "z": z}
            report.checks.append(_check(f"d={d} E[p0^{t}]", mean, float(oracle), abs(z) <= SE_FLAG, se=se, z=z))
            oracle2 = moments.haar_moment((t, t), d, group)
            mean2, se2 = mean_and_se(probs[:, 0] ** t * probs[:, 1] ** t)
            z2 = (mean2 - float(oracle2)) / se2 if se2 > 0 else 0.0
            entry[f"p0^{t} p1^{t}"] = {"mean": mean2, "se": se2, "oracle": exact(oracle2), "z": z2}
            report.checks.append(_check(f"d={d} E[p0^{t} p1^{t}]", mean2, float(oracle2), abs(z2) <= SE_FLAG,
                                        se=se2, z=z2))
        p2 = probs * probs
        s2 = np.sum(p2, axis=1)
        v = np.sum(p2 * probs, axis=1) - s2 * s2
        vmean, vmean_se = mean_and_se(v)
        vv, vv_se = variance_se(v)
        mean_oracle = moments.sample_variance_mean(d, group)
        vv_oracle = moments.variance_of_variance(d, group)
        z_mean = (vmean - float(mean_oracle)) / vmean_se
        z_vv = (vv - float(vv_oracle)) / vv_se
        entry["sample_variance_mean"] = {"mean": vmean, "se": vmean_se, "oracle": exact(mean_oracle), "z": z_mean}
        entry["variance_of_variance"] = {"value": vv, "se": vv_se, "oracle": exact(vv_oracle), "z": z_vv}
        report.checks.append(_check(f"d={d} E[Var_x p]", vmean, float(mean_oracle), abs(z_mean) <= SE_FLAG,
                                    se=vmean_se, z=z_mean))
        report.checks.append(_check(f"d={d} Var[Var_x p]", vv, float(vv_oracle), abs(z_vv) <= SE_FLAG,
                                    se=vv_se, z=z_vv))
        report.aggregates[f"d={d}"] = entry
    return report


RUNNERS = {
    "collision": run_collision_experiment,
    "orthogonal-collision": run_orthogonal_collision,
    "lxeb": run_lxeb_experiment,
    "maxp": run_maxp_experiment,
    "variance": run_variance_experiment,
    "clifford-uniformity": run_clifford_uniformity,
    "moment-validation": run_moment_validation,
}


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    start = time.perf_counter()
    report = RUNNERS[config.experiment](config)
    report.elapsed_seconds = time.perf_counter() - start
    report.workers = config.workers
    return report


def write_report(report: ExperimentReport, output_dir) -> dict:
    """Write report.json, trials.csv and timing.json; return their paths."""
    out = Path(output_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {"report": out / "report.json", "trials": out / "trials.csv", "timing": out / "timing.json"}
    paths["report"].write_text(report.to_json(), encoding="utf-8")
    paths["trials"].write_text(report.trials_csv(), encoding="utf-8")
    paths["timing"].write_text(json.dumps({"elapsed_seconds": report.elapsed_seconds, "workers": report.workers}) + "\n", encoding="utf-8")
    return paths


def summary_lines(report: ExperimentReport) -> list[str]:
    """One-screen ``key=value`` summary."""
    agg = report.aggregates
    lines = [f"experiment={report.config['experiment']}", f"trials={report.config['trials']}"]
    for key in ("pass_fraction", "uniform_fraction", "exceed_fraction", "collision_mean_relative_error"):
        if key in agg:
            lines.append(f"{key}={agg[key]!r}")
    for key in ("collision_prob", "sample_variance", "lxeb_stat", "max_prob"):
        if key in agg:
            lines.append(f"{key}_mean={agg[key]['mean']!r}")
    for name, val in report.oracles.items():
        v = val["value"] if isinstance(val, dict) else val
        lines.append(f"oracle.{name}={v!r}")
    for g in report.guarantees:
        tag = "vacuous" if g["vacuous"] else "ok"
        lines.append(f"guarantee.{g['theorem']}={g['raw']!r} ({tag}, log base {g['log_base']})")
    for c in report.checks:
        lines.append(f"check[{c['name']}]={'PASS' if c['passed'] else 'FAIL'} value={c['value']!r}")
    return lines
