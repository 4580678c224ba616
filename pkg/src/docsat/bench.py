"""Benchmark campaigns and their statistics.

A campaign runs every configured solver on every instance of a suite and
writes plot-ready CSV files (see :mod:`docsat.results`).  Work is split
into (instance, solver, trial-shard) units; results are merged in shard
order, so output files do not depend on the number of worker processes.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from itertools import combinations
from pathlib import Path

import numpy as np

from .dimacs import read_dimacs
from .engine import TrialConfig, run_restarts
from .errors import EmptyInput, InsufficientPoints, InvalidConfig, NonpositiveProbability
from .generate import generate_suite
from .heuristics import HeuristicConfig
from .results import crit_rows, histogram_rows, rate_row, read_results, trial_rows, write_results
from .rng import mix
from .stats import StatsAccumulator

HARD_BELOW = 0.01
EASY_ABOVE = 0.9


def classify(p: float, hard_below: float = HARD_BELOW, easy_above: float = EASY_ABOVE) -> str:
    if p < hard_below:
        return "hard"
    if p > easy_above:
        return "easy"
    return "other"


def classify_instances(p_values: dict, hard_below: float = HARD_BELOW, easy_above: float = EASY_ABOVE) -> dict:
    """Split ``{instance_id: p}`` into hard (p < 1%), easy (p > 90%) and other."""
    out = {"hard": [], "easy": [], "other": []}
    for iid, p in p_values.items():
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"success probability {p} for {iid} outside [0, 1]")
        out[classify(p, hard_below, easy_above)].append(iid)
    return out


def _mean_stderr(values):
    a = np.asarray(values, dtype=float)
    if len(a) < 2:
        return float(a.mean()), 0.0
    return float(a.mean()), float(a.std(ddof=1) / math.sqrt(len(a)))


@dataclass(frozen=True)
class SummaryRow:
    n_vars: int
    solver: str
    n_instances: int
    r_sol: float
    p_avg: float
    p_avg_stderr: float
    p_avg_quintile: float
    p_avg_quintile_stderr: float


def aggregate_summary(per_instance) -> list[SummaryRow]:
    """Per (N, solver) solution ratio and mean success probability.

    ``per_instance`` yields ``(n_vars, solver, instance_id, p)``.  The
    quintile columns average the ceil(n/5) instances with the lowest p for
    that solver.  Error bars are standard deviations of the mean.
    """
    groups: dict[tuple, list] = {}
    for n_vars, solver, _iid, p in per_instance:
        groups.setdefault((n_vars, solver), []).append(p)
    if not groups:
        raise EmptyInput("no per-instance results to summarize")
    rows = []
    for (n_vars, solver), ps in groups.items():
        ps_sorted = sorted(ps)
        q = math.ceil(len(ps) / 5)
        mean, err = _mean_stderr(ps)
        qmean, qerr = _mean_stderr(ps_sorted[:q])
        r_sol = sum(1 for p in ps if p > 0) / len(ps)
        rows.append(SummaryRow(n_vars, solver, len(ps), r_sol, mean, err, qmean, qerr))
    return rows


@dataclass(frozen=True)
class FitResult:
    fit_b: float
    prefactor: float
    slope: float
    residual: float


def fit_scaling(points) -> FitResult:
    """Least-squares fit of ``<p> ~ c * (1 + b)**(-N)`` in log space.

    ``points`` are ``(N, <p>)`` pairs with positive ``<p>``.
    """
    pts = list(points)
    if len(pts) < 2 or len({n for n, _ in pts}) < 2:
        raise InsufficientPoints("need at least two distinct N")
    if any(p <= 0 for _, p in pts):
        raise NonpositiveProbability("fit needs <p> > 0 at every point")
    n = np.array([float(n) for n, _ in pts])
    y = np.log([float(p) for _, p in pts])
    n0 = n.mean()
    dn = n - n0
    slope = float((dn * (y - y.mean())).sum() / (dn * dn).sum())
    intercept = float(y.mean() - slope * n0)
    resid = y - (intercept + slope * n)
    return FitResult(
        fit_b=float(np.expm1(-slope)),
        prefactor=float(np.exp(intercept)),
        slope=slope,
        residual=float(np.sqrt((resid * resid).sum())),
    )


def rate_report(accumulators: dict) -> dict:
    """Critical-clause generation rates per solver and their pairwise ratios.

    ``accumulators`` maps solver name to a :class:`StatsAccumulator` with
    rates enabled.  ``gamma_c`` counts oversatisfied-to-critical transitions
    per non-random flip; ``gamma_combined`` also counts unsatisfied-to-critical.
    """
    rates = {
        name: {"gamma_c": acc.gamma_c(), "gamma_combined": acc.gamma_c(include_unsat=True)}
        for name, acc in accumulators.items()
    }
    ratios = {}
    for a, b in combinations(rates, 2):
        for x, y in ((a, b), (b, a)):
            den_c, den_all = rates[y]["gamma_c"], rates[y]["gamma_combined"]
            ratios[(x, y)] = {
                "gamma_c": rates[x]["gamma_c"] / den_c if den_c else math.inf,
                "gamma_combined": rates[x]["gamma_combined"] / den_all if den_all else math.inf,
            }
    return {"rates": rates, "ratios": ratios}


@dataclass
class SuiteSpec:
    n_list: list = field(default_factory=lambda: [100])
    alpha: float = 4.27
    n_instances: int = 10
    master_seed: int = 0
    protocol: str = "uniform"
    p0: float = 0.08
    planted: bool = False
    forbid_duplicate_clauses: bool = False
    # directory with manifest.csv and {instance_id}.cnf; overrides generation
    manifest: str | None = None


@dataclass
class ExperimentConfig:
    suite: SuiteSpec = field(default_factory=SuiteSpec)
    solvers: list = field(default_factory=lambda: [HeuristicConfig("walksat", 0.5)])
    n_trials: int = 100
    flips_per_var: int = 300
    stop_on_solution: bool = True
    histogram: bool = False
    crit_stats: bool = False
    rates: bool = False
    hist_max_energy: int = 64
    seed: int = 0
    jobs: int = 1
    shard_trials: int = 50
    out_dir: str = "results"

    def __post_init__(self):
        if self.n_trials < 1 or self.flips_per_var < 0 or self.jobs < 1 or self.shard_trials < 1:
            raise InvalidConfig("n_trials, jobs and shard_trials must be >= 1; flips_per_var >= 0")
        if not self.solvers:
            raise InvalidConfig("at least one solver is required")

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise InvalidConfig(f"unknown config keys: {sorted(unknown)}")
        try:
            if "suite" in d:
                d["suite"] = SuiteSpec(**d["suite"])
            if "solvers" in d:
                d["solvers"] = [HeuristicConfig(**s) for s in d["solvers"]]
            return cls(**d)
        except TypeError as exc:
            raise InvalidConfig(str(exc)) from None

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        try:
            return cls.from_dict(json.loads(Path(path).read_text()))
        except json.JSONDecodeError as exc:
            raise InvalidConfig(f"{path}: {exc}") from None

    def to_dict(self) -> dict:
        return asdict(self)


def load_suite(spec: SuiteSpec) -> list[tuple[str, object]]:
    if spec.manifest:
        root = Path(spec.manifest)
        manifest = root / "manifest.csv" if root.is_dir() else root
        rows = read_results(manifest, "manifest")
        return [(r["instance_id"], read_dimacs(manifest.parent / f"{r['instance_id']}.cnf")) for r in rows]
    options = {"protocol": spec.protocol, "planted": spec.planted,
               "forbid_duplicate_clauses": spec.forbid_duplicate_clauses}
    if spec.protocol == "weigt":
        options["p0"] = spec.p0
    return generate_suite(spec.n_list, spec.alpha, spec.n_instances, spec.master_seed, **options)


def _run_unit(args):
    f, h, t, master, trials, instr = args
    acc = None
    if instr is not None:
        histogram, crit, rates, emax = instr
        acc = StatsAccumulator(f.n_clauses, histogram, crit, rates, emax)
    try:
        _p, results = run_restarts(f, h, t, master, hooks=acc, trials=trials)
    except Exception as exc:  # isolated per unit, reported by the caller
        return None, f"{type(exc).__name__}: {exc}"
    return results, acc


@dataclass
class InstanceRun:
    instance_id: str
    n_vars: int
    solver: str
    seed: int
    results: list
    stats: StatsAccumulator | None

    @property
    def p_hat(self) -> float:
        return sum(r.solved for r in self.results) / len(self.results)


def run_campaign(cfg: ExperimentConfig, suite=None, failures=None) -> list[InstanceRun]:
    """Run all (instance, solver) pairs; returns results in suite x solver order.

    A pair whose run raises is left out; ``(instance_id, solver, message)``
    is appended to ``failures`` when given.
    """
    suite = load_suite(cfg.suite) if suite is None else suite
    want_stats = cfg.histogram or cfg.crit_stats or cfg.rates
    instr = (cfg.histogram, cfg.crit_stats, cfg.rates, cfg.hist_max_energy) if want_stats else None
    units, keys = [], []
    for idx, (iid, f) in enumerate(suite):
        t = TrialConfig(cfg.flips_per_var * f.n_vars, cfg.n_trials, cfg.stop_on_solution)
        master = mix(cfg.seed, idx)
        for si, h in enumerate(cfg.solvers):
            for start in range(0, cfg.n_trials, cfg.shard_trials):
                trials = range(start, min(start + cfg.shard_trials, cfg.n_trials))
                units.append((f, h, t, master, trials, instr))
                keys.append((idx, si))
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            outputs = list(pool.map(_run_unit, units))
    else:
        outputs = [_run_unit(u) for u in units]

    runs: dict[tuple, InstanceRun] = {}
    failed = {}
    for (idx, si), (results, acc) in zip(keys, outputs):
        iid, f = suite[idx]
        if results is None:
            failed.setdefault((idx, si), (iid, cfg.solvers[si].name, acc))
            continue
        run = runs.get((idx, si))
        if run is None:
            runs[(idx, si)] = InstanceRun(iid, f.n_vars, cfg.solvers[si].name, mix(cfg.seed, idx), results, acc)
        else:
            run.results = run.results + results
            if acc is not None:
                run.stats += acc
    for key in failed:
        runs.pop(key, None)
    if failures is not None:
        failures.extend(failed[k] for k in sorted(failed))
    return [runs[k] for k in sorted(runs)]


def write_campaign(cfg: ExperimentConfig, runs: list[InstanceRun], out_dir=None, failures=()) -> dict:
    out = Path(out_dir or cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if not runs:
        raise EmptyInput("every (instance, solver) run failed" if failures else "empty suite")
    solver_cfg = {h.name: h for h in cfg.solvers}
    paths = {}
    trials = []
    for run in runs:
        trials.extend(trial_rows(run.instance_id, solver_cfg[run.solver], run.seed, run.results))
    paths["trials"] = write_results(trials, out / "trials.csv", "trials")
    if cfg.histogram:
        rows = [r for run in runs for r in histogram_rows(run.instance_id, run.solver, run.stats)]
        paths["histogram"] = write_results(rows, out / "histogram.csv", "histogram")
    if cfg.crit_stats:
        rows = [r for run in runs for r in crit_rows(run.instance_id, run.solver, run.stats)]
        paths["crit"] = write_results(rows, out / "crit.csv", "crit")
    if cfg.rates:
        rows = [rate_row(run.instance_id, run.solver, run.stats) for run in runs]
        paths["rates"] = write_results(rows, out / "rates.csv", "rates")
    summary = aggregate_summary((run.n_vars, run.solver, run.instance_id, run.p_hat) for run in runs)
    paths["summary"] = write_results([asdict(r) for r in summary], out / "summary.csv", "summary")
    config_path = out / "config.json"
    config_path.write_text(json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n")
    paths["config"] = config_path
    if failures:
        fail_path = out / "failures.txt"
        fail_path.write_text("".join(f"{iid}\t{solver}\t{msg}\n" for iid, solver, msg in failures))
        paths["failures"] = fail_path
    return paths


def run_experiment(cfg: ExperimentConfig, out_dir=None) -> dict:
    """Run a campaign and write trials/histogram/crit/rates/summary CSVs.

    Returns ``{name: path}`` for the files written.  Histogram, crit and
    rates files are only written when their toggles are on.
    """
    failures = []
    runs = run_campaign(cfg, failures=failures)
    return write_campaign(cfg, runs, out_dir, failures)


def fit_summary(summary_rows, column="p_avg") -> dict:
    """Fit the exponential scaling per solver from summary rows.

    Points with zero mean success probability are dropped before the fit;
    a solver with fewer than two remaining sizes gets ``None``.
    """
    by_solver: dict[str, list] = {}
    for row in summary_rows:
        by_solver.setdefault(row["solver"], []).append((int(row["n_vars"]), float(row[column])))
    fits = {}
    for solver, pts in by_solver.items():
        pts = [(n, p) for n, p in pts if p > 0]
        try:
            fits[solver] = fit_scaling(pts)
        except InsufficientPoints:
            fits[solver] = None
    return fits
