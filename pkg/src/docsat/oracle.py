"""Ground truth at small N: exhaustive enumeration and a plain DPLL solver.

Neither routine shares code with the search state; enumeration evaluates
clauses with vectorized bit operations over assignment indices, where bit
``k - 1`` of the index is the value of variable ``k``.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field

import numpy as np

from .errors import BudgetExceeded, LimitExceeded
from .formula import Formula

SOLUTION_LIST_LIMIT = 20


@dataclass
class OracleReport:
    satisfiable: bool
    min_energy: int
    solutions: list | None
    # E -> sorted array of TLC values, one per assignment with that energy
    tlc_by_energy: dict = field(default_factory=dict)
    # full per-assignment tables, kept when N <= SOLUTION_LIST_LIMIT
    energy: np.ndarray | None = None
    tlc: np.ndarray | None = None


def index_to_assignment(a: int, n_vars: int) -> tuple:
    return tuple(bool((a >> k) & 1) for k in range(n_vars))


def enumerate_assignments(f: Formula, n_limit: int = 25, chunk_bits: int = 18) -> OracleReport:
    n = f.n_vars
    if n > n_limit:
        raise LimitExceeded(f"{n} variables exceed the enumeration limit {n_limit}")
    total = 1 << n
    keep_tables = n <= SOLUTION_LIST_LIMIT
    energy_all = np.empty(total, dtype=np.int32) if keep_tables else None
    tlc_all = np.empty(total, dtype=np.int32) if keep_tables else None
    by_e: dict[int, list] = {}
    solutions = [] if keep_tables else None
    min_e = None
    chunk = 1 << min(chunk_bits, n)
    for start in range(0, total, chunk):
        a = np.arange(start, min(start + chunk, total), dtype=np.int64)
        e = np.zeros(a.shape, dtype=np.int32)
        t = np.zeros(a.shape, dtype=np.int32)
        for clause in f.clauses:
            nt = np.zeros(a.shape, dtype=np.int32)
            for lit in clause:
                bit = (a >> (abs(lit) - 1)) & 1
                nt += bit if lit > 0 else 1 - bit
            e += nt == 0
            t += nt
        if keep_tables:
            energy_all[start:start + len(a)] = e
            tlc_all[start:start + len(a)] = t
            solutions.extend(index_to_assignment(int(i), n) for i in a[e == 0])
        for ev in np.unique(e):
            by_e.setdefault(int(ev), []).append(t[e == ev])
        cmin = int(e.min())
        min_e = cmin if min_e is None else min(min_e, cmin)
    tlc_by_energy = {ev: np.sort(np.concatenate(parts)) for ev, parts in sorted(by_e.items())}
    return OracleReport(min_e == 0, min_e, solutions, tlc_by_energy, energy_all, tlc_all)


@dataclass
class DpllResult:
    satisfiable: bool
    witness: tuple | None
    nodes: int


class _Dpll:
    def __init__(self, f: Formula, budget):
        self.f = f
        self.budget = budget
        self.nodes = 0
        n = f.n_vars
        self.val = [-1] * (n + 1)
        # occ[lit] for lit in -n..n, stored at offset n
        self.occ = [[] for _ in range(2 * n + 1)]
        for ci, c in enumerate(f.clauses):
            for lit in c:
                self.occ[lit + n].append(ci)
        m = f.n_clauses
        self.n_sat = [0] * m
        self.n_false = [0] * m
        self.n_satisfied = 0
        self.trail = []

    def assign(self, lit):
        """Set ``lit`` true; returns clauses that became unit, or None on conflict."""
        n = self.f.n_vars
        v = abs(lit)
        self.val[v] = 1 if lit > 0 else 0
        self.trail.append(lit)
        for c in self.occ[lit + n]:
            if self.n_sat[c] == 0:
                self.n_satisfied += 1
            self.n_sat[c] += 1
        units = []
        conflict = False
        for c in self.occ[-lit + n]:
            self.n_false[c] += 1
            if self.n_sat[c] == 0:
                if self.n_false[c] == 3:
                    conflict = True
                elif self.n_false[c] == 2:
                    units.append(c)
        return None if conflict else units

    def undo(self, mark):
        n = self.f.n_vars
        while len(self.trail) > mark:
            lit = self.trail.pop()
            self.val[abs(lit)] = -1
            for c in self.occ[lit + n]:
                self.n_sat[c] -= 1
                if self.n_sat[c] == 0:
                    self.n_satisfied -= 1
            for c in self.occ[-lit + n]:
                self.n_false[c] -= 1

    def set_and_propagate(self, lit):
        queue = self.assign(lit)
        if queue is None:
            return False
        while queue:
            c = queue.pop()
            if self.n_sat[c]:
                continue
            free = [l for l in self.f.clauses[c] if self.val[abs(l)] == -1]
            if not free:
                return False
            more = self.assign(free[0])
            if more is None:
                return False
            queue.extend(more)
        return True

    def _weight(self, lit):
        # occurrences in open clauses; binary (one literal already false)
        # clauses count 5x
        n_sat, n_false = self.n_sat, self.n_false
        w = 0
        for c in self.occ[lit + self.f.n_vars]:
            if n_sat[c] == 0:
                w += 5 if n_false[c] else 1
        return w

    def pick(self):
        # most (weighted) occurrences, balanced across both polarities;
        # the heavier polarity is tried first
        best_score, best_lit = -1, 0
        val = self.val
        for v in range(1, self.f.n_vars + 1):
            if val[v] != -1:
                continue
            pos, neg = self._weight(v), self._weight(-v)
            score = pos * neg * 1024 + pos + neg
            if score > best_score:
                best_score = score
                best_lit = v if pos >= neg else -v
        return best_lit

    def solve(self):
        if self.n_satisfied == len(self.f.clauses):
            return True
        self.nodes += 1
        if self.budget is not None and self.nodes > self.budget:
            raise BudgetExceeded(f"DPLL exceeded {self.budget} nodes")
        lit = self.pick()
        for choice in (lit, -lit):
            mark = len(self.trail)
            if self.set_and_propagate(choice) and self.solve():
                return True
            self.undo(mark)
        return False


def dpll_sat(f: Formula, budget: int | None = None) -> DpllResult:
    """Complete DPLL with unit propagation, no learning.

    Raises :class:`BudgetExceeded` after ``budget`` branching nodes, which
    means "unknown", never "unsatisfiable".
    """
    solver = _Dpll(f, budget)
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 4 * f.n_vars + 1000))
    try:
        sat = solver.solve()
    finally:
        sys.setrecursionlimit(limit)
    if not sat:
        return DpllResult(False, None, solver.nodes)
    witness = tuple(solver.val[v] == 1 for v in range(1, f.n_vars + 1))
    if not f.satisfies(witness):
        raise AssertionError("DPLL witness does not satisfy the formula")
    return DpllResult(True, witness, solver.nodes)
