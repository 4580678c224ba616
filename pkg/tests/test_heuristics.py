from collections import Counter

import pytest

from docsat.errors import ClauseNotUnsat, InvalidConfig
from docsat.formula import Formula, SearchState
from docsat.heuristics import (
    HeuristicConfig,
    TabuWindow,
    docsat_scores,
    pick_var_docsat,
    pick_var_gwsat,
    pick_var_novelty,
    pick_var_tabu,
    pick_var_walksat,
)
from docsat.rng import Xoshiro256

# chi-square critical value, 2 degrees of freedom, p = 0.001
CHI2_2DOF = 13.816


def chi2_uniform(counts, n, k=3):
    exp = n / k
    return sum((counts.get(i, 0) - exp) ** 2 / exp for i in range(k))


class ScriptedRng:
    """Returns queued values; fails loudly if a draw is not expected."""

    def __init__(self, randoms=(), belows=()):
        self.randoms = list(randoms)
        self.belows = list(belows)

    def random(self):
        return self.randoms.pop(0)

    def below(self, n):
        v = self.belows.pop(0)
        assert 0 <= v < n
        return v

    def choice_index(self, k):
        return 0 if k == 1 else self.below(k)


def state_with_breaks(breaks):
    """Clause 0 = (1, 2, 3) unsatisfied at x = 0; variable i+1 gets breaks[i]."""
    clauses = [(1, 2, 3)]
    nxt = 4
    for v, b in enumerate(breaks, start=1):
        for _ in range(b):
            clauses.append((-v, nxt, nxt + 1))
            nxt += 2
    n = nxt - 1
    s = SearchState(Formula(n, clauses), [False] * n)
    assert [s.breakcount(v) for v in (1, 2, 3)] == list(breaks)
    return s


def test_config_validation():
    with pytest.raises(InvalidConfig):
        HeuristicConfig("walksat", p_walk=1.5)
    with pytest.raises(InvalidConfig):
        HeuristicConfig("docsat", r_doc=-0.1)
    with pytest.raises(InvalidConfig):
        HeuristicConfig("probsat")
    with pytest.raises(InvalidConfig):
        HeuristicConfig("tabu", tabu_len=-1)
    assert HeuristicConfig("docsat", 0.4, 0.15).name == "docsat_p0.4_r0.15"
    assert HeuristicConfig("walksat", label="ws").name == "ws"


def test_walksat_freebie_deterministic():
    s = state_with_breaks((0, 2, 1))
    for seed in range(50):
        ch = pick_var_walksat(s, 0, Xoshiro256(seed), 1.0)
        assert ch == (1, False)


def test_walksat_greedy_unique_argmin():
    s = state_with_breaks((3, 1, 2))
    # u = 0.9 >= p_walk forces the greedy branch
    assert pick_var_walksat(s, 0, ScriptedRng([0.9]), 0.5) == (2, False)


def test_walksat_walk_uniform():
    s = state_with_breaks((1, 1, 1))
    rng = Xoshiro256(11)
    n = 10_000
    counts = Counter(pick_var_walksat(s, 0, rng, 1.0).var - 1 for _ in range(n))
    assert chi2_uniform(counts, n) < CHI2_2DOF


def test_walksat_freebie_tie_uniform():
    s = state_with_breaks((0, 0, 5))
    rng = Xoshiro256(3)
    counts = Counter(pick_var_walksat(s, 0, rng, 0.5).var for _ in range(4000))
    assert set(counts) == {1, 2}
    assert abs(counts[1] - 2000) < 200


def test_clause_not_unsat(f1):
    s = SearchState(f1, [1, 1, 1])
    for picker in (pick_var_walksat, pick_var_gwsat):
        with pytest.raises(ClauseNotUnsat):
            picker(s, 0, Xoshiro256(0), 0.5)
    with pytest.raises(ClauseNotUnsat):
        pick_var_docsat(s, 0, Xoshiro256(0), 0.5, 0.15)
    with pytest.raises(ClauseNotUnsat):
        pick_var_tabu(s, 0, Xoshiro256(0), 0.5, TabuWindow(3))
    with pytest.raises(ClauseNotUnsat):
        pick_var_novelty(s, 0, Xoshiro256(0), 0.5, [-1] * 4)


def test_docsat_f1_negative_score_blocks_walk(f1):
    s = SearchState(f1, [0, 0, 0])
    assert docsat_scores(s, [1, 2, 3], 0.15) == pytest.approx([0.15, -0.15, 0.15])
    for seed in range(100):
        assert pick_var_docsat(s, 0, Xoshiro256(seed), 1.0, 0.15) == (2, False)


def test_docsat_all_positive_walks_uniformly():
    s = state_with_breaks((1, 1, 4))
    # r_doc = 0: scores equal breakcounts, all positive
    rng = Xoshiro256(8)
    n = 10_000
    picks = [pick_var_docsat(s, 0, rng, 1.0, 0.0) for _ in range(n)]
    assert all(p.random_step for p in picks)
    assert chi2_uniform(Counter(p.var - 1 for p in picks), n) < CHI2_2DOF


def test_docsat_zero_score_blocks_walk():
    s = state_with_breaks((1, 2, 2))
    # variable 1: b = 1, T = p - n = 1 - 1 = 0; variables 2, 3: b = 2, T = -1
    # with r_doc = 2 the scores are (1, 0, 0): not all positive
    assert docsat_scores(s, [1, 2, 3], 2.0) == [1.0, 0.0, 0.0]
    for seed in range(30):
        ch = pick_var_docsat(s, 0, Xoshiro256(seed), 1.0, 2.0)
        assert ch.var in (2, 3) and not ch.random_step


def test_docsat_r0_matches_walksat_draw_for_draw():
    for breaks in ((0, 2, 1), (3, 1, 2), (1, 1, 1), (2, 2, 5), (0, 0, 1)):
        s = state_with_breaks(breaks)
        for seed in range(40):
            a, b = Xoshiro256(seed), Xoshiro256(seed)
            ca = pick_var_walksat(s, 0, a, 0.5)
            cb = pick_var_docsat(s, 0, b, 0.5, 0.0)
            assert ca.var == cb.var and a.state == b.state


def test_gwsat_examples(f1):
    s = SearchState(f1, [0, 0, 0])
    rng = Xoshiro256(2)
    counts = Counter(pick_var_gwsat(s, 0, rng, 0.0).var for _ in range(3000))
    assert set(counts) == {1, 2, 3}
    assert all(ch.random_step for ch in (pick_var_gwsat(s, 0, rng, 1.0) for _ in range(50)))
    # b - m = (-1, 0, 2)
    s2 = state_with_breaks((0, 1, 3))
    assert [s2.breakcount(v) - s2.makecount(v) for v in (1, 2, 3)] == [-1, 0, 2]
    assert pick_var_gwsat(s2, 0, ScriptedRng([0.99]), 0.5) == (1, False)


def test_tabu_excludes_and_pushes():
    s = state_with_breaks((0, 1, 2))
    win = TabuWindow(2)
    win.push(1)
    ch = pick_var_tabu(s, 0, ScriptedRng([0.9]), 0.5, win)
    assert ch.var == 2
    assert 2 in win and 1 in win
    win.push(3)
    assert 1 not in win


def test_tabu_all_tabu_uniform_fallback():
    s = state_with_breaks((0, 1, 2))
    rng = Xoshiro256(4)
    n = 9000
    counts = Counter()
    for _ in range(n):
        win = TabuWindow(3)
        for v in (1, 2, 3):
            win.push(v)
        counts[pick_var_tabu(s, 0, rng, 0.0, win).var - 1] += 1
    assert chi2_uniform(counts, n) < CHI2_2DOF


def test_tabu_len_zero_is_walksat():
    s = state_with_breaks((2, 1, 1))
    for seed in range(30):
        a, b = Xoshiro256(seed), Xoshiro256(seed)
        assert pick_var_walksat(s, 0, a, 0.5) == pick_var_tabu(s, 0, b, 0.5, TabuWindow(0))
        assert a.state == b.state


def test_novelty_second_best_when_best_is_newest():
    s = state_with_breaks((0, 1, 2))
    last = [-1, 5, 2, 1] + [-1] * (s.formula.n_vars - 3)
    # best (variable 1) is the most recent flip
    assert pick_var_novelty(s, 0, ScriptedRng([0.1]), 1.0, last).var == 2
    assert pick_var_novelty(s, 0, ScriptedRng([0.1]), 0.0, last).var == 1
    # best is not the newest: no draw at all
    last = [-1, 1, 2, 5] + [-1] * (s.formula.n_vars - 3)
    assert pick_var_novelty(s, 0, ScriptedRng(), 1.0, last).var == 1


def test_novelty_age_breaks_ties():
    s = state_with_breaks((1, 1, 1))
    last = [-1, 4, 2, 3] + [-1] * (s.formula.n_vars - 3)
    assert pick_var_novelty(s, 0, ScriptedRng(), 0.0, last).var == 2
