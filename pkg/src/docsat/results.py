"""CSV result files.

Column schemas are fixed; floats are written with ``repr`` so identical
inputs always give byte-identical files.
"""

from __future__ import annotations

import csv
from pathlib import Path

SCHEMAS = {
    "trials": ("instance_id", "solver", "p_walk", "r_doc", "seed", "trial", "solved",
               "flips_used", "final_energy", "final_tlc"),
    "histogram": ("instance_id", "solver", "energy", "tlc", "count"),
    "crit": ("instance_id", "solver", "energy", "mean_crit", "count"),
    "rates": ("instance_id", "solver", "oversat_to_crit", "unsat_to_crit", "crit_destroyed",
              "nonrandom_flips", "random_flips"),
    "summary": ("n_vars", "solver", "n_instances", "r_sol", "p_avg", "p_avg_stderr",
                "p_avg_quintile", "p_avg_quintile_stderr"),
    "manifest": ("instance_id", "n_vars", "alpha", "seed"),
}


def _fmt(v):
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_results(records, path, schema: str):
    """Write ``records`` (dicts keyed by column or sequences in column order)."""
    columns = SCHEMAS[schema]
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for rec in records:
            row = [rec[c] for c in columns] if isinstance(rec, dict) else list(rec)
            if len(row) != len(columns):
                raise ValueError(f"{schema} row has {len(row)} fields, expected {len(columns)}")
            w.writerow([_fmt(v) for v in row])
    return path


def read_results(path, schema: str | None = None) -> list[dict]:
    with Path(path).open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    if schema is not None and rows and tuple(rows[0].keys()) != SCHEMAS[schema]:
        raise ValueError(f"{path} does not have the {schema} columns")
    return rows


def trial_rows(instance_id, h, seed, results, first_trial=0):
    for i, r in enumerate(results, start=first_trial):
        yield (instance_id, h.name, float(h.p_walk), float(h.r_doc), seed, i, r.solved,
               r.flips_used, r.final_energy, r.final_tlc)


def histogram_rows(instance_id, solver, acc):
    if acc.histogram is None:
        return
    for e, t in zip(*acc.histogram.nonzero()):
        yield (instance_id, solver, int(e), int(t), int(acc.histogram[e, t]))


def crit_rows(instance_id, solver, acc):
    for e, (mean, count) in acc.mean_crit().items():
        yield (instance_id, solver, e, float(mean), count)


def rate_row(instance_id, solver, acc):
    t = acc.transitions
    return (instance_id, solver, *(int(v) for v in t))
