"""Variable-selection heuristics for focused local search.

Every picker receives an unsatisfied clause index and returns a
:class:`Choice`.  The random-number consumption of each picker is part of
its contract, because the compiled kernel replays it draw for draw:

* walksat, docsat, tabu: one ``random()`` draw up front, then
  ``below(k)`` for a random-walk step or a tie among ``k > 1`` candidates.
* gwsat: one ``random()`` draw, then as above.
* novelty: a ``random()`` draw only when the best variable is the most
  recently flipped one in the clause.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import NamedTuple

from .errors import ClauseNotUnsat, InvalidConfig
from .formula import SearchState
from .rng import Xoshiro256

KINDS = ("walksat", "docsat", "gwsat", "tabu", "novelty")


@dataclass(frozen=True)
class HeuristicConfig:
    kind: str = "walksat"
    p_walk: float = 0.5
    r_doc: float = 0.0
    tabu_len: int = 20
    p_novelty: float = 0.5
    # -1 reproduces the sign of the TLC change as literally printed (debug)
    tlc_sign: int = 1
    label: str | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidConfig(f"unknown heuristic {self.kind!r}; expected one of {KINDS}")
        if not 0.0 <= self.p_walk <= 1.0:
            raise InvalidConfig(f"p_walk={self.p_walk} outside [0, 1]")
        if not 0.0 <= self.p_novelty <= 1.0:
            raise InvalidConfig(f"p_novelty={self.p_novelty} outside [0, 1]")
        if self.r_doc < 0:
            raise InvalidConfig(f"r_doc={self.r_doc} must be nonnegative")
        if self.tabu_len < 0:
            raise InvalidConfig(f"tabu_len={self.tabu_len} must be nonnegative")
        if self.tlc_sign not in (1, -1):
            raise InvalidConfig("tlc_sign must be +1 or -1")

    @property
    def name(self) -> str:
        if self.label:
            return self.label
        if self.kind == "docsat":
            return f"docsat_p{self.p_walk:g}_r{self.r_doc:g}"
        if self.kind == "tabu":
            return f"tabu_p{self.p_walk:g}_t{self.tabu_len}"
        if self.kind == "novelty":
            return f"novelty_p{self.p_novelty:g}"
        return f"{self.kind}_p{self.p_walk:g}"


class Choice(NamedTuple):
    var: int
    random_step: bool


def _clause_vars(s: SearchState, clause: int, check: bool = True):
    if check and s.num_true[clause] != 0:
        raise ClauseNotUnsat(f"clause {clause} is satisfied")
    return [abs(lit) for lit in s.formula.clauses[clause]]


def _argmin_pick(vs, values, rng):
    lo = min(values)
    tied = [v for v, val in zip(vs, values) if val == lo]
    return tied[rng.choice_index(len(tied))]


def _walksat_among(vs, breaks, u, rng, p_walk):
    zeros = [v for v, b in zip(vs, breaks) if b == 0]
    if zeros:
        return Choice(zeros[rng.choice_index(len(zeros))], False)
    if u < p_walk:
        return Choice(vs[rng.below(len(vs))], True)
    return Choice(_argmin_pick(vs, breaks, rng), False)


def pick_var_walksat(s: SearchState, clause: int, rng: Xoshiro256, p_walk: float, *, check: bool = True) -> Choice:
    """Zero-breakcount variables always win; otherwise walk with ``p_walk``
    or take a minimal-breakcount variable."""
    vs = _clause_vars(s, clause, check)
    breaks = [s.breakcount(v) for v in vs]
    u = rng.random()
    return _walksat_among(vs, breaks, u, rng, p_walk)


def docsat_scores(s: SearchState, vs, r_doc: float, tlc_sign: int = 1) -> list[float]:
    return [s.breakcount(v) + r_doc * (tlc_sign * s.tlc_delta(v)) for v in vs]


def pick_var_docsat(
    s: SearchState, clause: int, rng: Xoshiro256, p_walk: float, r_doc: float,
    tlc_sign: int = 1, *, check: bool = True,
) -> Choice:
    """Score each variable as breakcount + r_doc * TLC change.

    A random walk step is only possible when every score is positive;
    otherwise (and with probability ``1 - p_walk``) a minimal-score
    variable is taken.
    """
    vs = _clause_vars(s, clause, check)
    scores = docsat_scores(s, vs, r_doc, tlc_sign)
    u = rng.random()
    if all(sc > 0 for sc in scores) and u < p_walk:
        return Choice(vs[rng.below(3)], True)
    return Choice(_argmin_pick(vs, scores, rng), False)


def pick_var_gwsat(s: SearchState, clause: int, rng: Xoshiro256, p_walk: float, *, check: bool = True) -> Choice:
    vs = _clause_vars(s, clause, check)
    net = [s.breakcount(v) - s.makecount(v) for v in vs]
    u = rng.random()
    if u < p_walk:
        return Choice(vs[rng.below(3)], True)
    return Choice(_argmin_pick(vs, net, rng), False)


class TabuWindow:
    """FIFO window of the last ``length`` flipped variables."""

    def __init__(self, length: int):
        self.length = length
        self._window = deque()
        self._count = {}

    def __contains__(self, v):
        return self._count.get(v, 0) > 0

    def push(self, v):
        if self.length == 0:
            return
        if len(self._window) == self.length:
            old = self._window.popleft()
            self._count[old] -= 1
        self._window.append(v)
        self._count[v] = self._count.get(v, 0) + 1


def pick_var_tabu(
    s: SearchState, clause: int, rng: Xoshiro256, p_walk: float, tabu: TabuWindow, *, check: bool = True
) -> Choice:
    """WalkSAT restricted to variables outside the tabu window.

    If all three are tabu a uniformly random one is taken.  The chosen
    variable is pushed onto the window.
    """
    vs = _clause_vars(s, clause, check)
    allowed = [v for v in vs if v not in tabu]
    u = rng.random()
    if not allowed:
        choice = Choice(vs[rng.below(3)], True)
    else:
        breaks = [s.breakcount(v) for v in allowed]
        choice = _walksat_among(allowed, breaks, u, rng, p_walk)
    tabu.push(choice.var)
    return choice


def pick_var_novelty(
    s: SearchState, clause: int, rng: Xoshiro256, p_novelty: float, last_flip, *, check: bool = True
) -> Choice:
    """Novelty: rank by breakcount - makecount, older flips first on ties.

    ``last_flip[v]`` is the step at which ``v`` was last flipped (-1 if
    never).  If the best variable is the clause's most recently flipped
    one, the second best is taken with probability ``p_novelty``.
    """
    vs = _clause_vars(s, clause, check)
    keyed = sorted(
        ((s.breakcount(v) - s.makecount(v), last_flip[v], i) for i, v in enumerate(vs))
    )
    best, second = vs[keyed[0][2]], vs[keyed[1][2]]
    newest = max(vs, key=lambda v: last_flip[v])
    if last_flip[newest] >= 0 and best == newest:
        if rng.random() < p_novelty:
            return Choice(second, False)
    return Choice(best, False)
