"""Mergeable per-trajectory statistics.

A :class:`StatsAccumulator` can be passed as ``hooks`` to
:func:`docsat.engine.run_trial`; the compiled kernel recognizes it and
records natively without per-flip Python callbacks.
"""

from __future__ import annotations

import numpy as np

from .errors import NoNonrandomFlips

# transition tally slots
O2C, U2C, DESTROYED, NONRANDOM, RANDOM = range(5)


class StatsAccumulator:
    """(E, TLC) histogram, per-energy critical counts and transition tallies.

    Every visited state (the initial one and the state after each flip) is
    recorded.  The histogram keeps rows ``E <= hist_max_energy``; states
    above that are only counted in ``hist_overflow``.  Transition counts
    are tallied on non-random flips only, since the generation rate of
    critical clauses is defined per greedy step; random and non-random
    flips are both counted.
    """

    def __init__(self, n_clauses, histogram=True, crit_stats=True, rates=True, hist_max_energy=64):
        self.n_clauses = n_clauses
        self.hist_max_energy = hist_max_energy
        emax = min(hist_max_energy, n_clauses)
        self.histogram = np.zeros((emax + 1, 3 * n_clauses + 1), dtype=np.int64) if histogram else None
        self.hist_overflow = np.zeros(1, dtype=np.int64) if histogram else None
        self.crit_sum = np.zeros(n_clauses + 1, dtype=np.int64) if crit_stats else None
        self.crit_count = np.zeros(n_clauses + 1, dtype=np.int64) if crit_stats else None
        self.transitions = np.zeros(5, dtype=np.int64) if rates else None
        self.trials = 0
        self.solved = 0

    # hook protocol, used by the pure-Python trial loop
    def on_state(self, energy, tlc, n_crit):
        if self.histogram is not None:
            if energy < self.histogram.shape[0]:
                self.histogram[energy, tlc] += 1
            else:
                self.hist_overflow[0] += 1
        if self.crit_sum is not None:
            self.crit_sum[energy] += n_crit
            self.crit_count[energy] += 1

    def on_flip(self, transitions, random_step):
        if self.transitions is None:
            return
        if random_step:
            self.transitions[RANDOM] += 1
        else:
            self.transitions[NONRANDOM] += 1
            self.transitions[O2C] += transitions[0]
            self.transitions[U2C] += transitions[1]
            self.transitions[DESTROYED] += transitions[2]

    def record_trial(self, result):
        self.trials += 1
        self.solved += bool(result.solved)

    def empty_like(self):
        return StatsAccumulator(
            self.n_clauses,
            histogram=self.histogram is not None,
            crit_stats=self.crit_sum is not None,
            rates=self.transitions is not None,
            hist_max_energy=self.hist_max_energy,
        )

    def __iadd__(self, other: "StatsAccumulator"):
        if other.n_clauses != self.n_clauses or other.hist_max_energy != self.hist_max_energy:
            raise ValueError("cannot merge accumulators with different shapes")
        for name in ("histogram", "hist_overflow", "crit_sum", "crit_count", "transitions"):
            mine, theirs = getattr(self, name), getattr(other, name)
            if (mine is None) != (theirs is None):
                raise ValueError(f"cannot merge: {name} enabled on only one side")
            if mine is not None:
                mine += theirs
        self.trials += other.trials
        self.solved += other.solved
        return self

    def merge(self, other: "StatsAccumulator") -> "StatsAccumulator":
        out = self.empty_like()
        out += self
        out += other
        return out

    def __eq__(self, other):
        if not isinstance(other, StatsAccumulator):
            return NotImplemented
        for name in ("histogram", "hist_overflow", "crit_sum", "crit_count", "transitions"):
            a, b = getattr(self, name), getattr(other, name)
            if (a is None) != (b is None) or (a is not None and not np.array_equal(a, b)):
                return False
        return (self.n_clauses, self.trials, self.solved) == (other.n_clauses, other.trials, other.solved)

    @property
    def p_hat(self) -> float:
        return self.solved / self.trials if self.trials else 0.0

    def mean_crit(self):
        """``{E: (mean critical count, number of states)}`` for visited E."""
        if self.crit_sum is None:
            return {}
        return {
            int(e): (self.crit_sum[e] / self.crit_count[e], int(self.crit_count[e]))
            for e in np.flatnonzero(self.crit_count)
        }

    def tlc_values(self, energy):
        """(tlc array, count array) of recorded states at one energy."""
        if self.histogram is None or energy >= self.histogram.shape[0]:
            return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
        row = self.histogram[energy]
        idx = np.flatnonzero(row)
        return idx, row[idx]

    def mean_tlc(self, energy):
        tlc, cnt = self.tlc_values(energy)
        if cnt.sum() == 0:
            return None
        return float((tlc * cnt).sum() / cnt.sum())

    def gamma_c(self, include_unsat=False) -> float:
        """Critical clauses created from oversatisfied ones per greedy flip
        (optionally also counting those created from unsatisfied ones)."""
        t = self.transitions
        if t is None or t[NONRANDOM] == 0:
            raise NoNonrandomFlips("no non-random flips recorded")
        created = t[O2C] + (t[U2C] if include_unsat else 0)
        return float(created / t[NONRANDOM])
