import random

import pytest

from docsat import engine
from docsat.engine import InstrumentationHooks, TrialConfig, run_restarts, run_trial, trial_rng
from docsat.errors import InvalidConfig
from docsat.formula import SearchState
from docsat.generate import GenConfig, generate
from docsat.heuristics import KINDS, HeuristicConfig
from docsat.rng import Xoshiro256
from docsat.stats import StatsAccumulator

from conftest import random_formula

ALL_HEURISTICS = [
    HeuristicConfig("walksat", 0.5),
    HeuristicConfig("docsat", 0.4, 0.15),
    HeuristicConfig("gwsat", 0.5),
    HeuristicConfig("tabu", 0.5, tabu_len=5),
    HeuristicConfig("novelty", p_novelty=0.3),
]

native = pytest.mark.skipif(engine._ckernel is None, reason="compiled kernel not built")


def initial_assignment(seed, n):
    r = Xoshiro256(seed)
    return [bool(r.bit()) for _ in range(n)]


def test_config_validation():
    with pytest.raises(InvalidConfig):
        TrialConfig(-1)
    with pytest.raises(InvalidConfig):
        TrialConfig(10, n_trials=0)


@pytest.mark.parametrize("h", ALL_HEURISTICS, ids=lambda h: h.kind)
def test_f1_always_solved(f1, h):
    for seed in range(100):
        r = run_trial(f1, h, TrialConfig(100), Xoshiro256(seed))
        assert r.solved and r.final_energy == 0 and f1.satisfies(r.solution)


def test_zero_budget(f1):
    for seed in range(40):
        rng = Xoshiro256(seed)
        x0 = initial_assignment(seed, 3)
        r = run_trial(f1, HeuristicConfig(), TrialConfig(0), rng)
        assert r.flips_used == 0
        assert r.solved == f1.satisfies(x0)


@pytest.mark.parametrize("h", ALL_HEURISTICS, ids=lambda h: h.kind)
def test_unsat_never_solved(unsat8, h):
    p, results = run_restarts(unsat8, h, TrialConfig(50, 1000), 9)
    assert p == 0.0
    assert all(r.final_energy >= 1 and r.flips_used == 50 for r in results)


def test_trivially_satisfiable_p_one():
    f = generate(GenConfig(30, 2.0, seed=1, planted=True))
    p, _ = run_restarts(f, HeuristicConfig(), TrialConfig(3000, 1000), 5)
    assert p == 1.0


def test_restarts_deterministic_and_shardable():
    f = generate(GenConfig(40, 4.2, seed=3))
    h = HeuristicConfig("docsat", 0.4, 0.15)
    t = TrialConfig(400, 30)
    _, full = run_restarts(f, h, t, 77)
    _, again = run_restarts(f, h, t, 77)
    assert [r.record() for r in full] == [r.record() for r in again]
    _, tail = run_restarts(f, h, t, 77, trials=range(10, 30))
    _, head = run_restarts(f, h, t, 77, trials=range(0, 10))
    assert [r.record() for r in head + tail] == [r.record() for r in full]
    # reversed execution order gives the same per-trial records
    rev = [run_trial(f, h, t, trial_rng(77, i)) for i in reversed(range(30))][::-1]
    assert [r.record() for r in rev] == [r.record() for r in full]


def test_seed_changes_trajectory_not_p():
    f = generate(GenConfig(50, 4.0, seed=12))
    h = HeuristicConfig("walksat", 0.5)
    t = TrialConfig(300, 400)
    p1, r1 = run_restarts(f, h, t, 1)
    p2, r2 = run_restarts(f, h, t, 2)
    assert [r.record() for r in r1] != [r.record() for r in r2]
    se = (max(p1 * (1 - p1), 0.01) / 400) ** 0.5
    assert abs(p1 - p2) < 5 * se * 2**0.5


class Recorder:
    def __init__(self, f, x):
        self.replica = None
        self.f = f
        self.violations = []
        self.crit_mismatch = []

    def hooks(self):
        return InstrumentationHooks(on_state=self.on_state, on_flip=self.on_flip)

    def on_state(self, e, tlc, crit):
        if self.replica is not None:
            assert (self.replica.energy, self.replica.tlc, self.replica.n_crit) == (e, tlc, crit)

    def on_flip(self, var, trans, random_step):
        s = self.replica
        if s.energy > 0 and not any(var in map(abs, s.formula.clauses[c]) for c in s.unsat):
            self.violations.append(var)
        before = s.n_crit
        s.flip(var)
        if s.n_crit - before != trans[0] + trans[1] - trans[2]:
            self.crit_mismatch.append(var)


@pytest.mark.parametrize("h", ALL_HEURISTICS, ids=lambda h: h.kind)
def test_focused_and_transition_bookkeeping(h):
    f = random_formula(random.Random(5), 30, 125)
    for seed in range(5):
        x0 = initial_assignment(seed, 30)
        rec = Recorder(f, x0)
        rec.replica = SearchState(f, x0)
        run_trial(f, h, TrialConfig(2000), Xoshiro256(seed), hooks=rec.hooks(), backend="python")
        assert rec.violations == [] and rec.crit_mismatch == []


@pytest.mark.parametrize("h", ALL_HEURISTICS, ids=lambda h: h.kind)
@pytest.mark.parametrize("stop", [True, False])
def test_hooks_do_not_change_trajectory(h, stop):
    f = generate(GenConfig(40, 4.1, seed=8))
    t = TrialConfig(1500, stop_on_solution=stop)
    for seed in range(4):
        plain = run_trial(f, h, t, Xoshiro256(seed), backend="python")
        hooked = run_trial(f, h, t, Xoshiro256(seed), backend="python",
                           hooks=InstrumentationHooks(lambda *a: None, lambda *a: None))
        acc = run_trial(f, h, t, Xoshiro256(seed), hooks=StatsAccumulator(f.n_clauses))
        assert plain == hooked == acc


@native
@pytest.mark.parametrize("h", ALL_HEURISTICS, ids=lambda h: h.kind)
@pytest.mark.parametrize("stop", [True, False])
def test_backends_identical(h, stop):
    f = generate(GenConfig(60, 4.2, seed=21))
    t = TrialConfig(3000, 12, stop_on_solution=stop)
    acc_py, acc_c = StatsAccumulator(f.n_clauses, hist_max_energy=20), StatsAccumulator(f.n_clauses, hist_max_energy=20)
    for i in range(t.n_trials):
        a, b = trial_rng(4, i), trial_rng(4, i)
        rp = run_trial(f, h, t, a, hooks=acc_py, backend="python")
        rc = run_trial(f, h, t, b, hooks=acc_c, backend="native")
        assert rp == rc
        assert a.state == b.state
    assert acc_py == acc_c


def test_continue_after_solution_reports_first(f1):
    t = TrialConfig(200, stop_on_solution=False)
    for seed in range(20):
        stop = run_trial(f1, HeuristicConfig(), TrialConfig(200), Xoshiro256(seed))
        acc = StatsAccumulator(f1.n_clauses)
        cont = run_trial(f1, HeuristicConfig(), t, Xoshiro256(seed), hooks=acc)
        assert cont == stop
        # initial state plus one state per flip
        assert acc.histogram.sum() + acc.hist_overflow[0] == 201
        assert acc.transitions[3] + acc.transitions[4] == 200


def test_unknown_backend(f1):
    with pytest.raises(InvalidConfig):
        run_trial(f1, HeuristicConfig(), TrialConfig(1), Xoshiro256(0), backend="gpu")


def test_kinds_cover_all():
    assert {h.kind for h in ALL_HEURISTICS} == set(KINDS)
