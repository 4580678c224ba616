"""Seeded random 3-SAT instances at fixed clause density.

The default ensemble is uniform random 3-SAT: each clause takes three
distinct variables drawn uniformly (rejection on repeats) and independent
fair-coin polarities.  ``M = floor(alpha * N + 0.5)``.

``protocol="weigt"`` hides a random planted solution instead: every clause
is satisfied by it, with exactly one, two or three true literals with
probabilities ``3*w1``, ``3*w2`` and ``w3 = p0``, where
``w1 = (p0 + 1/2) / 3`` and ``w2 = 1/2 - 2*w1``.  These weights make each
literal true under the planted solution with probability 1/2, so variable
polarities carry no local hint of it.  ``p0`` must lie in ``[0, 1/4]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import BudgetExceeded, InvalidConfig, OracleLimitExceeded, ResampleBudgetExhausted
from .formula import Formula
from .oracle import dpll_sat
from .rng import Xoshiro256, mix

ORACLE_N_LIMIT = 300


@dataclass(frozen=True)
class GenConfig:
    n_vars: int
    alpha: float
    seed: int = 0
    forbid_duplicate_clauses: bool = False
    planted: bool = False
    protocol: str = "uniform"
    p0: float = 0.08
    filter_satisfiable: bool = False
    max_resample: int = 100_000
    max_filter_attempts: int = 1000
    dpll_budget: int | None = 200_000

    @property
    def n_clauses(self) -> int:
        return math.floor(self.alpha * self.n_vars + 0.5)

    def validate(self):
        if self.n_vars < 0 or not self.alpha > 0:
            raise InvalidConfig(f"need n_vars >= 0 and alpha > 0, got {self.n_vars}, {self.alpha}")
        if self.n_clauses > 0 and self.n_vars < 3:
            raise InvalidConfig("3-SAT clauses need at least 3 variables")
        if self.protocol not in ("uniform", "weigt"):
            raise InvalidConfig(f"unknown protocol {self.protocol!r}")
        if self.protocol == "weigt" and not 0.0 <= self.p0 <= 0.25:
            raise InvalidConfig(f"p0={self.p0} outside [0, 1/4]")
        if self.protocol == "weigt" and self.planted:
            raise InvalidConfig("planted and weigt protocols are exclusive")
        if self.filter_satisfiable and self.n_vars > ORACLE_N_LIMIT:
            raise OracleLimitExceeded(
                f"satisfiability filter limited to N <= {ORACLE_N_LIMIT}, got {self.n_vars}"
            )


def _draw_vars(rng, n):
    v1 = rng.below(n) + 1
    v2 = v1
    while v2 == v1:
        v2 = rng.below(n) + 1
    v3 = v1
    while v3 == v1 or v3 == v2:
        v3 = rng.below(n) + 1
    return v1, v2, v3


def _draw_clause(rng, n, planted_x, budget):
    vs = _draw_vars(rng, n)
    for _ in range(budget):
        lits = tuple(v if rng.bit() else -v for v in vs)
        if planted_x is None or any((lit > 0) == planted_x[abs(lit) - 1] for lit in lits):
            return lits
    raise ResampleBudgetExhausted("could not satisfy the planted assignment")


def _draw_hidden_clause(rng, n, hidden_x, p0):
    vs = _draw_vars(rng, n)
    w1 = (p0 + 0.5) / 3
    w2 = 0.5 - 2 * w1
    u = rng.random()
    if u < 3 * w1:
        k = rng.below(3)
        true_at = [i == k for i in range(3)]
    elif u < 3 * w1 + 3 * w2:
        k = rng.below(3)
        true_at = [i != k for i in range(3)]
    else:
        true_at = [True, True, True]
    # literal on v is true under hidden_x iff its polarity equals hidden_x[v]
    return tuple(v if hidden_x[v - 1] == t else -v for v, t in zip(vs, true_at))


def _draw_formula(cfg, rng, planted_x):
    clauses = []
    seen = set()
    resamples = 0
    while len(clauses) < cfg.n_clauses:
        if cfg.protocol == "weigt":
            lits = _draw_hidden_clause(rng, cfg.n_vars, planted_x, cfg.p0)
        else:
            lits = _draw_clause(rng, cfg.n_vars, planted_x, cfg.max_resample)
        if cfg.forbid_duplicate_clauses:
            key = frozenset(lits)
            if key in seen:
                resamples += 1
                if resamples > cfg.max_resample:
                    raise ResampleBudgetExhausted("too many duplicate-clause collisions")
                continue
            seen.add(key)
        clauses.append(lits)
    return Formula(cfg.n_vars, clauses)


def generate(cfg: GenConfig) -> Formula:
    """Deterministic function of ``cfg``.

    ``planted`` draws a hidden assignment first (one bit per variable) and
    redraws the polarities of any clause it violates; ``protocol="weigt"``
    draws the assignment the same way and builds each clause around it.
    ``filter_satisfiable`` redraws whole formulas until DPLL certifies one
    satisfiable; an undecided DPLL run (budget exceeded) counts as a
    rejection.
    """
    cfg.validate()
    rng = Xoshiro256(cfg.seed)
    hidden = cfg.planted or cfg.protocol == "weigt"
    planted_x = [bool(rng.bit()) for _ in range(cfg.n_vars)] if hidden else None
    if not cfg.filter_satisfiable:
        return _draw_formula(cfg, rng, planted_x)
    for _ in range(cfg.max_filter_attempts):
        f = _draw_formula(cfg, rng, planted_x)
        try:
            if dpll_sat(f, cfg.dpll_budget).satisfiable:
                return f
        except BudgetExceeded:
            pass
    raise ResampleBudgetExhausted(f"no certified satisfiable formula in {cfg.max_filter_attempts} draws")


def instance_seed(master_seed: int, n_vars: int, index: int) -> int:
    return mix(master_seed, n_vars, index)


def instance_id(n_vars: int, index: int) -> str:
    return f"w{n_vars}v{index}"


def generate_suite(n_list, alpha, n_instances, master_seed, **options) -> list[tuple[str, Formula]]:
    if n_instances < 0:
        raise InvalidConfig("n_instances must be >= 0")
    suite = []
    for n in n_list:
        for i in range(n_instances):
            cfg = GenConfig(n, alpha, instance_seed(master_seed, n, i), **options)
            suite.append((instance_id(n, i), generate(cfg)))
    return suite
