import pytest

from docsat.engine import TrialConfig, run_restarts
from docsat.generate import GenConfig, generate
from docsat.heuristics import HeuristicConfig
from docsat.results import (
    SCHEMAS,
    crit_rows,
    histogram_rows,
    rate_row,
    read_results,
    trial_rows,
    write_results,
)
from docsat.stats import StatsAccumulator


def test_schemas_exact():
    assert ",".join(SCHEMAS["trials"]) == "instance_id,solver,p_walk,r_doc,seed,trial,solved,flips_used,final_energy,final_tlc"
    assert ",".join(SCHEMAS["histogram"]) == "instance_id,solver,energy,tlc,count"
    assert ",".join(SCHEMAS["crit"]) == "instance_id,solver,energy,mean_crit,count"
    assert ",".join(SCHEMAS["rates"]) == (
        "instance_id,solver,oversat_to_crit,unsat_to_crit,crit_destroyed,nonrandom_flips,random_flips")
    assert ",".join(SCHEMAS["summary"]) == (
        "n_vars,solver,n_instances,r_sol,p_avg,p_avg_stderr,p_avg_quintile,p_avg_quintile_stderr")


def test_empty_records_header_only(tmp_path):
    path = write_results([], tmp_path / "t.csv", "trials")
    assert path.read_text() == ",".join(SCHEMAS["trials"]) + "\n"


def test_solved_trial_row(tmp_path, f1):
    h = HeuristicConfig()
    _, results = run_restarts(f1, h, TrialConfig(100, 1), 0)
    path = write_results(trial_rows("f1", h, 0, results), tmp_path / "t.csv", "trials")
    (row,) = read_results(path, "trials")
    assert row["solved"] == "1" and int(row["flips_used"]) <= 100
    assert row["solver"] == "walksat_p0.5" and row["p_walk"] == "0.5"


def test_wrong_width_rejected(tmp_path):
    with pytest.raises(ValueError):
        write_results([("a", "b")], tmp_path / "x.csv", "histogram")


def test_merged_accumulators_write_identically(tmp_path):
    f = generate(GenConfig(40, 4.27, seed=2))
    h = HeuristicConfig("docsat", 0.4, 0.15)
    t = TrialConfig(800, 20)
    seq = StatsAccumulator(f.n_clauses)
    run_restarts(f, h, t, 3, hooks=seq)
    a, b = StatsAccumulator(f.n_clauses), StatsAccumulator(f.n_clauses)
    run_restarts(f, h, t, 3, hooks=a, trials=range(0, 7))
    run_restarts(f, h, t, 3, hooks=b, trials=range(7, 20))
    merged = b.merge(a)
    for schema, rows in (("histogram", histogram_rows), ("crit", crit_rows)):
        p1 = write_results(rows("i", "s", seq), tmp_path / f"{schema}1.csv", schema)
        p2 = write_results(rows("i", "s", merged), tmp_path / f"{schema}2.csv", schema)
        assert p1.read_bytes() == p2.read_bytes()
    assert rate_row("i", "s", seq) == rate_row("i", "s", merged)
