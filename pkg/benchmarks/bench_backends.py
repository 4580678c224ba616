"""Flip throughput of the compiled and pure-Python trial kernels.

    python benchmarks/bench_backends.py --n 200 --flips 200000

Both backends run the same seeded trials, so the script also checks that
their results agree before reporting flips per second.
"""

import argparse
import time

from docsat import engine
from docsat.engine import TrialConfig, run_restarts
from docsat.generate import GenConfig, generate
from docsat.heuristics import KINDS, HeuristicConfig
from docsat.stats import StatsAccumulator


def timed(f, h, t, backend, instrument):
    acc = StatsAccumulator(f.n_clauses) if instrument else None
    start = time.perf_counter()
    _, results = run_restarts(f, h, t, 1, hooks=acc, backend=backend)
    elapsed = time.perf_counter() - start
    flips = sum(r.flips_used for r in results)
    return flips / elapsed, results


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=200)
    ap.add_argument("--alpha", type=float, default=4.27)
    ap.add_argument("--flips", type=int, default=100_000, help="flip budget per trial")
    ap.add_argument("--trials", type=int, default=3)
    ap.add_argument("--python-flips", type=int, default=20_000,
                    help="smaller budget for the slow pure-Python runs")
    ap.add_argument("--instrument", action="store_true", help="attach a StatsAccumulator")
    ap.add_argument("--kinds", nargs="+", default=list(KINDS), choices=KINDS)
    args = ap.parse_args()

    if engine._ckernel is None:
        raise SystemExit("compiled kernel not built; run `pip install -e . --no-build-isolation`")
    # unsatisfiable-or-hard instance so trials use their whole budget
    f = generate(GenConfig(args.n, args.alpha, seed=17))
    print(f"N={args.n} M={f.n_clauses} trials={args.trials} instrument={args.instrument}")
    print(f"{'heuristic':<20}{'native flips/s':>16}{'python flips/s':>16}{'speedup':>10}")
    for kind in args.kinds:
        h = HeuristicConfig(kind, 0.4 if kind == "docsat" else 0.5, 0.15 if kind == "docsat" else 0.0)
        small = TrialConfig(args.python_flips, args.trials)
        native_small, rn = timed(f, h, small, "native", args.instrument)
        py_rate, rp = timed(f, h, small, "python", args.instrument)
        if rn != rp:
            raise SystemExit(f"{kind}: backends disagree")
        native_rate, _ = timed(f, h, TrialConfig(args.flips, args.trials), "native", args.instrument)
        print(f"{h.name:<20}{native_rate:>16,.0f}{py_rate:>16,.0f}{native_rate / py_rate:>9.0f}x")


if __name__ == "__main__":
    main()
