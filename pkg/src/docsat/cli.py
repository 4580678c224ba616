"""Command line entry point: ``docsat {generate,solve,bench,oracle,fit,rates,external}``.

Exit status is 0 on success, 1 for usage or configuration errors and 2 for
failures while running.
"""

from __future__ import annotations

import argparse
import json
import logging
import shutil
import subprocess
import sys
from dataclasses import asdict, replace
from pathlib import Path

import numpy as np

from . import bench
from .dimacs import read_dimacs, save_dimacs
from .engine import BACKEND, TrialConfig, run_restarts
from .errors import DimacsError, DocsatError, FormulaError, InvalidConfig
from .generate import GenConfig, generate, instance_id, instance_seed
from .heuristics import KINDS, HeuristicConfig
from .oracle import dpll_sat, enumerate_assignments
from .results import read_results, trial_rows, write_results
from .stats import NONRANDOM, StatsAccumulator

log = logging.getLogger("docsat")

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; keep 2 for runtime failures
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _solver_args(p):
    p.add_argument("--solver", choices=KINDS, action="append",
                   help="heuristic; repeat to compare several (default walksat)")
    p.add_argument("--p-walk", type=float, default=None, help="walk probability")
    p.add_argument("--r-doc", type=float, default=None, help="DOC weight (docsat)")
    p.add_argument("--tabu-len", type=int, default=None)
    p.add_argument("--p-novelty", type=float, default=None)
    p.add_argument("--trials", type=int, default=None, help="restarts per instance")
    p.add_argument("--flips-per-var", type=int, default=None, help="flip budget per trial in units of N")
    p.add_argument("--seed", type=int, default=None, help="master seed")


def _solvers_from_args(args, default=()):
    kinds = args.solver or []
    if not kinds:
        if default:
            solvers = list(default)
        else:
            solvers = [HeuristicConfig("walksat")]
    else:
        solvers = [HeuristicConfig(k) for k in kinds]
    overrides = {}
    for flag, key in (("p_walk", "p_walk"), ("r_doc", "r_doc"), ("tabu_len", "tabu_len"), ("p_novelty", "p_novelty")):
        v = getattr(args, flag)
        if v is not None:
            overrides[key] = v
    return [replace(h, **overrides) for h in solvers]


def cmd_generate(args):
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for n in args.n:
        for i in range(args.instances):
            seed = instance_seed(args.seed, n, i)
            cfg = GenConfig(n, args.alpha, seed, forbid_duplicate_clauses=args.forbid_duplicates,
                            planted=args.planted, protocol=args.protocol, p0=args.p0,
                            filter_satisfiable=args.filter_satisfiable)
            iid = instance_id(n, i)
            save_dimacs(generate(cfg), out / f"{iid}.cnf", comments=(f"{iid} alpha={args.alpha} seed={seed}",))
            rows.append((iid, n, float(args.alpha), seed))
    write_results(rows, out / "manifest.csv", "manifest")
    print(f"wrote {len(rows)} instances to {out}")
    return EXIT_OK


def cmd_solve(args):
    f = read_dimacs(args.cnf, strict=not args.lenient)
    seed = 0 if args.seed is None else args.seed
    trials = 10 if args.trials is None else args.trials
    fpv = 300 if args.flips_per_var is None else args.flips_per_var
    t = TrialConfig(fpv * f.n_vars, trials, args.stop_on_solution)
    rows = []
    for h in _solvers_from_args(args):
        p_hat, results = run_restarts(f, h, t, seed)
        best = min(results, key=lambda r: r.final_energy)
        print(f"{h.name}: p={p_hat:.4g} ({sum(r.solved for r in results)}/{trials})  best E={best.final_energy}")
        if args.print_solution and best.solved:
            print("v " + " ".join(str(v if x else -v) for v, x in enumerate(best.solution, 1)) + " 0")
        rows.extend(trial_rows(Path(args.cnf).stem, h, seed, results))
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        write_results(rows, out / "trials.csv", "trials")
    return EXIT_OK


def _load_config(args):
    cfg = bench.ExperimentConfig.from_json(args.config) if args.config else bench.ExperimentConfig()
    changes = {}
    if args.solver or any(getattr(args, k) is not None for k in ("p_walk", "r_doc", "tabu_len", "p_novelty")):
        changes["solvers"] = _solvers_from_args(args, default=cfg.solvers if not args.solver else ())
    for flag, key in (("trials", "n_trials"), ("flips_per_var", "flips_per_var"), ("seed", "seed"),
                      ("jobs", "jobs"), ("out_dir", "out_dir"), ("stop_on_solution", "stop_on_solution")):
        v = getattr(args, flag)
        if v is not None:
            changes[key] = v
    for toggle in ("histogram", "crit_stats", "rates"):
        if getattr(args, toggle):
            changes[toggle] = True
    suite = cfg.suite
    if args.manifest:
        suite = replace(suite, manifest=args.manifest)
    if args.n:
        suite = replace(suite, n_list=args.n)
    if args.instances is not None:
        suite = replace(suite, n_instances=args.instances)
    changes["suite"] = suite
    return replace(cfg, **changes)


def cmd_bench(args):
    cfg = _load_config(args)
    paths = bench.run_experiment(cfg)
    for name, path in paths.items():
        print(f"{name}: {path}")
    if "failures" in paths:
        log.warning("some runs failed, see %s", paths["failures"])
    return EXIT_OK


def cmd_oracle(args):
    f = read_dimacs(args.cnf, strict=not args.lenient)
    if f.n_vars <= args.enumerate_limit:
        rep = enumerate_assignments(f, n_limit=args.enumerate_limit)
        status = "SATISFIABLE" if rep.satisfiable else "UNSATISFIABLE"
        print(f"s {status}\nc min_energy={rep.min_energy} solutions={rep.solutions}")
        return EXIT_OK
    res = dpll_sat(f, budget=args.budget)
    print(f"s {'SATISFIABLE' if res.satisfiable else 'UNSATISFIABLE'}\nc nodes={res.nodes}")
    if res.satisfiable and args.print_solution:
        print("v " + " ".join(str(v if x else -v) for v, x in enumerate(res.witness, 1)) + " 0")
    return EXIT_OK


def cmd_fit(args):
    rows = read_results(args.summary, "summary")
    fits = bench.fit_summary(rows, column=args.column)
    out = {solver: (asdict(fit) if fit is not None else None) for solver, fit in fits.items()}
    dropped = sorted({(r["solver"], int(r["n_vars"])) for r in rows if float(r[args.column]) <= 0})
    for solver, n in dropped:
        print(f"# dropped {solver} N={n}: zero {args.column}", file=sys.stderr)
    print(json.dumps(out, indent=2, sort_keys=True))
    return EXIT_OK


def cmd_rates(args):
    rows = read_results(args.rates_csv, "rates")
    if args.instance:
        rows = [r for r in rows if r["instance_id"] in args.instance]
    accs: dict[str, StatsAccumulator] = {}
    cols = ("oversat_to_crit", "unsat_to_crit", "crit_destroyed", "nonrandom_flips", "random_flips")
    for r in rows:
        acc = accs.setdefault(r["solver"], StatsAccumulator(0, histogram=False, crit_stats=False, rates=True))
        acc.transitions += np.array([int(r[c]) for c in cols], dtype=np.int64)
    usable = {k: a for k, a in accs.items() if a.transitions[NONRANDOM] > 0}
    for k in sorted(set(accs) - set(usable)):
        print(f"# {k}: no non-random flips, skipped", file=sys.stderr)
    report = bench.rate_report(usable)
    for name, v in report["rates"].items():
        print(f"{name}: gamma_c={v['gamma_c']:.5g} combined={v['gamma_combined']:.5g}")
    for (a, b), v in report["ratios"].items():
        print(f"{a} / {b}: gamma_c={v['gamma_c']:.4g} combined={v['gamma_combined']:.4g}")
    return EXIT_OK


def cmd_external(args):
    # thin adapter: runs a DIMACS solver binary and reports its status line
    exe = shutil.which(args.binary)
    if exe is None:
        raise InvalidConfig(f"solver binary {args.binary!r} not found on PATH")
    proc = subprocess.run([exe, *args.extra, str(args.cnf)], capture_output=True, text=True,
                          timeout=args.timeout)
    status = next((ln for ln in proc.stdout.splitlines() if ln.startswith("s ")), "s UNKNOWN")
    print(status)
    return EXIT_OK


def build_parser():
    ap = _Parser(prog="docsat", description="Focused local search for random 3-SAT.")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="write a seeded instance suite")
    p.add_argument("--n", type=int, nargs="+", required=True, help="numbers of variables")
    p.add_argument("--alpha", type=float, default=4.27)
    p.add_argument("--instances", type=int, default=10, help="instances per N")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--protocol", choices=("uniform", "weigt"), default="uniform")
    p.add_argument("--p0", type=float, default=0.08, help="weigt: fraction of fully satisfied clauses")
    p.add_argument("--planted", action="store_true")
    p.add_argument("--filter-satisfiable", action="store_true")
    p.add_argument("--forbid-duplicates", action="store_true")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("solve", help="run restarts on one DIMACS file")
    p.add_argument("cnf")
    _solver_args(p)
    p.add_argument("--stop-on-solution", action=argparse.BooleanOptionalAction, default=True)
    p.add_argument("--out-dir", help="also write trials.csv here")
    p.add_argument("--print-solution", action="store_true")
    p.add_argument("--lenient", action="store_true", help="tolerate clause-count mismatch and '%%' trailers")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bench", help="run a campaign and write CSV results")
    p.add_argument("--config", help="JSON experiment config")
    p.add_argument("--out-dir")
    p.add_argument("--manifest", help="instance directory or manifest.csv")
    p.add_argument("--n", type=int, nargs="+")
    p.add_argument("--instances", type=int)
    _solver_args(p)
    p.add_argument("--jobs", type=int)
    p.add_argument("--histogram", action="store_true")
    p.add_argument("--crit-stats", action="store_true")
    p.add_argument("--rates", action="store_true")
    p.add_argument("--stop-on-solution", action=argparse.BooleanOptionalAction, default=None)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("oracle", help="decide satisfiability exactly")
    p.add_argument("cnf")
    p.add_argument("--enumerate-limit", type=int, default=20, help="enumerate all assignments up to this N")
    p.add_argument("--budget", type=int, default=None, help="DPLL node budget")
    p.add_argument("--print-solution", action="store_true")
    p.add_argument("--lenient", action="store_true")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("fit", help="exponential scaling fit from summary.csv")
    p.add_argument("summary")
    p.add_argument("--column", choices=("p_avg", "p_avg_quintile"), default="p_avg")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("rates", help="critical-clause creation rates from rates.csv")
    p.add_argument("rates_csv")
    p.add_argument("--instance", action="append", help="restrict to these instance ids")
    p.set_defaults(func=cmd_rates)

    p = sub.add_parser("external", help="run a third-party DIMACS solver (comparison only)")
    p.add_argument("binary")
    p.add_argument("cnf")
    p.add_argument("--timeout", type=float, default=None)
    p.add_argument("extra", nargs=argparse.REMAINDER)
    p.set_defaults(func=cmd_external)
    return ap


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    log.debug("backend: %s", BACKEND)
    try:
        return args.func(args)
    except (InvalidConfig, DimacsError, FormulaError, FileNotFoundError, ValueError) as exc:
        print(f"docsat: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DocsatError, OSError, subprocess.SubprocessError) as exc:
        print(f"docsat: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
