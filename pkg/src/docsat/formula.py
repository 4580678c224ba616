"""3-SAT formulas and the incrementally maintained search state.

Literals are DIMACS-style signed integers: ``k`` is variable ``k`` and
``-k`` its negation, with variables numbered ``1..n_vars``.  Assignments
are sequences of ``n_vars`` booleans (index 0 holds variable 1).
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .errors import (
    LengthMismatch,
    OutOfRangeVariable,
    RepeatedVariableInClause,
    WrongClauseArity,
)


class Formula:
    """Immutable 3-CNF instance with occurrence lists and polarity counts.

    ``pos_occ[k]`` / ``neg_occ[k]`` list the clauses in which variable ``k``
    occurs positively / negatively (index 0 unused).  ``pos_counts`` and
    ``neg_counts`` are the N-vectors of their lengths.
    """

    __slots__ = ("n_vars", "clauses", "pos_occ", "neg_occ", "_arrays")

    def __init__(self, n_vars: int, clauses: Iterable[Sequence[int]]):
        if n_vars < 0:
            raise OutOfRangeVariable(f"negative variable count {n_vars}")
        checked = []
        for ci, clause in enumerate(clauses):
            lits = tuple(int(lit) for lit in clause)
            if len(lits) != 3:
                raise WrongClauseArity(f"clause {ci} has {len(lits)} literals, expected 3")
            for lit in lits:
                if lit == 0 or abs(lit) > n_vars:
                    raise OutOfRangeVariable(f"clause {ci}: literal {lit} outside 1..{n_vars}")
            if len({abs(lit) for lit in lits}) != 3:
                raise RepeatedVariableInClause(f"clause {ci} repeats a variable: {lits}")
            checked.append(lits)
        pos_occ = [[] for _ in range(n_vars + 1)]
        neg_occ = [[] for _ in range(n_vars + 1)]
        for ci, lits in enumerate(checked):
            for lit in lits:
                (pos_occ if lit > 0 else neg_occ)[abs(lit)].append(ci)
        self.n_vars = n_vars
        self.clauses = tuple(checked)
        self.pos_occ = tuple(tuple(o) for o in pos_occ)
        self.neg_occ = tuple(tuple(o) for o in neg_occ)
        self._arrays = None

    @property
    def n_clauses(self) -> int:
        return len(self.clauses)

    @property
    def pos_counts(self) -> tuple[int, ...]:
        return tuple(len(o) for o in self.pos_occ[1:])

    @property
    def neg_counts(self) -> tuple[int, ...]:
        return tuple(len(o) for o in self.neg_occ[1:])

    def occurrences(self, k: int) -> list[tuple[int, bool]]:
        """(clause index, positive?) pairs for variable ``k``."""
        self._check_var(k)
        occ = [(c, True) for c in self.pos_occ[k]] + [(c, False) for c in self.neg_occ[k]]
        return sorted(occ)

    def _check_var(self, k):
        if not 1 <= k <= self.n_vars:
            raise OutOfRangeVariable(f"variable {k} outside 1..{self.n_vars}")

    def energy(self, x: Sequence[bool]) -> int:
        """Number of violated clauses, by direct evaluation."""
        return sum(1 for c in self.clauses if not any((lit > 0) == bool(x[abs(lit) - 1]) for lit in c))

    def tlc(self, x: Sequence[bool]) -> int:
        """Total number of true literals, by direct evaluation."""
        return sum(1 for c in self.clauses for lit in c if (lit > 0) == bool(x[abs(lit) - 1]))

    def satisfies(self, x: Sequence[bool]) -> bool:
        return len(x) == self.n_vars and self.energy(x) == 0

    def arrays(self):
        """Flat int32 arrays consumed by the trial kernels (cached).

        Returns ``(lits, pos_start, pos_idx, neg_start, neg_idx)`` where
        ``lits`` has shape (M, 3) and the occurrence lists are in CSR form
        indexed by variable (row ``k`` spans ``start[k]:start[k+1]``).
        """
        if self._arrays is None:
            lits = np.array(self.clauses, dtype=np.int32).reshape(-1, 3)

            def csr(occ):
                start = np.cumsum([0, 0] + [len(o) for o in occ[1:]]).astype(np.int32)
                flat = [c for o in occ[1:] for c in o]
                return start, np.array(flat, dtype=np.int32)

            ps, pi = csr(self.pos_occ)
            ns, ni = csr(self.neg_occ)
            self._arrays = (lits, ps, pi, ns, ni)
        return self._arrays

    def __eq__(self, other):
        if not isinstance(other, Formula):
            return NotImplemented
        return self.n_vars == other.n_vars and self.clauses == other.clauses

    def __hash__(self):
        return hash((self.n_vars, self.clauses))

    def __repr__(self):
        return f"Formula(n_vars={self.n_vars}, n_clauses={self.n_clauses})"

    def __getstate__(self):
        return (self.n_vars, self.clauses)

    def __setstate__(self, state):
        self.__init__(*state)


def build_formula(n_vars: int, clauses: Iterable[Sequence[int]]) -> Formula:
    return Formula(n_vars, clauses)


def tlc_extremes(f: Formula) -> tuple[list[bool], list[bool]]:
    """Assignments with minimal and maximal total true-literal count.

    The count is a sum of independent per-variable terms, so each variable
    is set on its own: ``x_k = 1`` maximizes iff ``p_k > n_k``.  Variables
    with ``p_k == n_k`` are set to False in both.
    """
    diff = [p - n for p, n in zip(f.pos_counts, f.neg_counts)]
    return [d < 0 for d in diff], [d > 0 for d in diff]


class SearchState:
    """Mutable assignment with per-clause true-literal counts.

    Maintains ``num_true`` per clause, the unsatisfied set as a dense array
    with a position index (O(1) insert, remove and uniform sampling), the
    energy, the total true-literal count and the number of critical
    clauses.  ``flip`` costs O(occurrence degree).
    """

    __slots__ = ("formula", "x", "num_true", "unsat", "_unsat_pos", "tlc", "n_crit")

    def __init__(self, formula: Formula, x: Sequence[bool]):
        if len(x) != formula.n_vars:
            raise LengthMismatch(f"assignment has length {len(x)}, formula has {formula.n_vars} variables")
        self.formula = formula
        # 1-based; slot 0 unused
        self.x = [False] + [bool(v) for v in x]
        m = formula.n_clauses
        self.num_true = [0] * m
        self.unsat = []
        self._unsat_pos = [-1] * m
        xs = self.x
        for ci, c in enumerate(formula.clauses):
            nt = 0
            for lit in c:
                if (lit > 0) == xs[abs(lit)]:
                    nt += 1
            self.num_true[ci] = nt
            if nt == 0:
                self._unsat_pos[ci] = len(self.unsat)
                self.unsat.append(ci)
        self.tlc = sum(self.num_true)
        self.n_crit = self.num_true.count(1)

    @property
    def energy(self) -> int:
        return len(self.unsat)

    @property
    def assignment(self) -> list[bool]:
        return self.x[1:]

    def copy(self) -> "SearchState":
        new = SearchState.__new__(SearchState)
        new.formula = self.formula
        new.x = list(self.x)
        new.num_true = list(self.num_true)
        new.unsat = list(self.unsat)
        new._unsat_pos = list(self._unsat_pos)
        new.tlc = self.tlc
        new.n_crit = self.n_crit
        return new

    def _occ_true_false(self, k):
        f = self.formula
        if not 1 <= k <= f.n_vars:
            raise OutOfRangeVariable(f"variable {k} outside 1..{f.n_vars}")
        if self.x[k]:
            return f.pos_occ[k], f.neg_occ[k]
        return f.neg_occ[k], f.pos_occ[k]

    def flip(self, k: int) -> tuple[int, int, int]:
        """Toggle variable ``k`` in place.

        Returns clause-category transition counts caused by the flip:
        ``(oversat_to_crit, unsat_to_crit, crit_destroyed)``.
        """
        losing, gaining = self._occ_true_false(k)
        num_true = self.num_true
        o2c = u2c = destroyed = 0
        for c in losing:
            nt = num_true[c] - 1
            num_true[c] = nt
            if nt == 1:
                o2c += 1
            elif nt == 0:
                destroyed += 1
                self._unsat_pos[c] = len(self.unsat)
                self.unsat.append(c)
        for c in gaining:
            nt = num_true[c]
            num_true[c] = nt + 1
            if nt == 0:
                u2c += 1
                self._remove_unsat(c)
            elif nt == 1:
                destroyed += 1
        self.x[k] = not self.x[k]
        self.tlc += len(gaining) - len(losing)
        self.n_crit += o2c + u2c - destroyed
        return o2c, u2c, destroyed

    def _remove_unsat(self, c):
        pos = self._unsat_pos[c]
        last = self.unsat.pop()
        if last != c:
            self.unsat[pos] = last
            self._unsat_pos[last] = pos
        self._unsat_pos[c] = -1

    def is_unsat(self, c: int) -> bool:
        return self.num_true[c] == 0

    def breakcount(self, k: int) -> int:
        losing, _ = self._occ_true_false(k)
        nt = self.num_true
        return sum(1 for c in losing if nt[c] == 1)

    def makecount(self, k: int) -> int:
        _, gaining = self._occ_true_false(k)
        nt = self.num_true
        return sum(1 for c in gaining if nt[c] == 0)

    def tlc_delta(self, k: int, printed_sign: bool = False) -> int:
        """Change of the true-literal count if ``k`` were flipped.

        With ``printed_sign`` the negated value ``(p - n)_k * (2 x_k - 1)``
        is returned instead (debug/comparison only).
        """
        losing, gaining = self._occ_true_false(k)
        t = len(gaining) - len(losing)
        return -t if printed_sign else t

    def critical_count(self) -> int:
        return self.n_crit


def init_state(f: Formula, x: Sequence[bool]) -> SearchState:
    return SearchState(f, x)


def flip(s: SearchState, k: int) -> SearchState:
    s.flip(k)
    return s


def breakcount(s: SearchState, k: int) -> int:
    return s.breakcount(k)


def makecount(s: SearchState, k: int) -> int:
    return s.makecount(k)


def tlc_delta(s: SearchState, k: int, printed_sign: bool = False) -> int:
    return s.tlc_delta(k, printed_sign)


def critical_count(s: SearchState) -> int:
    return s.n_crit
