"""Focused local search: trial loop, restarts and backend selection.

Two interchangeable trial kernels exist.  The compiled one
(``docsat._ckernel``) is used when it imports and the hooks, if any, are a
:class:`StatsAccumulator`; arbitrary callback hooks force the pure-Python
loop.  Both consume the random stream identically, so a seed gives the
same trial on either backend.  Set ``DOCSAT_BACKEND=python`` to disable
the compiled kernel.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import InvalidConfig
from .formula import Formula, SearchState
from .heuristics import (
    KINDS,
    HeuristicConfig,
    TabuWindow,
    pick_var_docsat,
    pick_var_gwsat,
    pick_var_novelty,
    pick_var_tabu,
    pick_var_walksat,
)
from .rng import Xoshiro256, mix
from .stats import StatsAccumulator

try:
    if os.environ.get("DOCSAT_BACKEND", "").lower() == "python":
        raise ImportError("compiled kernel disabled by DOCSAT_BACKEND")
    from . import _ckernel
except ImportError:
    _ckernel = None

BACKEND = "native" if _ckernel is not None else "python"


@dataclass(frozen=True)
class TrialConfig:
    max_flips: int
    n_trials: int = 1
    # continue flipping after a solution when False (uniformly random
    # clause while E == 0); the reported result is the first solution
    stop_on_solution: bool = True

    def __post_init__(self):
        if self.max_flips < 0:
            raise InvalidConfig("max_flips must be >= 0")
        if self.n_trials < 1:
            raise InvalidConfig("n_trials must be >= 1")


@dataclass(frozen=True)
class TrialResult:
    solved: bool
    flips_used: int
    final_energy: int
    final_tlc: int
    solution: Optional[tuple] = None

    def record(self):
        """Comparable tuple without the solution vector."""
        return (self.solved, self.flips_used, self.final_energy, self.final_tlc)


@dataclass
class InstrumentationHooks:
    """Per-step callbacks for the pure-Python loop.

    ``on_state(energy, tlc, n_crit)`` sees the initial state and the state
    after every flip.  ``on_flip(var, (oversat_to_crit, unsat_to_crit,
    crit_destroyed), random_step)`` sees every flip.
    """

    on_state: Optional[Callable[[int, int, int], None]] = None
    on_flip: Optional[Callable[[int, tuple, bool], None]] = None


class _AccumulatorHooks:
    # adapts StatsAccumulator to the callback protocol
    def __init__(self, acc):
        self.on_state = acc.on_state
        self.on_flip = lambda var, trans, rnd: acc.on_flip(trans, rnd)


def _picker(h: HeuristicConfig, n_vars: int):
    if h.kind == "walksat":
        return lambda s, c, rng, chk: pick_var_walksat(s, c, rng, h.p_walk, check=chk)
    if h.kind == "docsat":
        return lambda s, c, rng, chk: pick_var_docsat(s, c, rng, h.p_walk, h.r_doc, h.tlc_sign, check=chk)
    if h.kind == "gwsat":
        return lambda s, c, rng, chk: pick_var_gwsat(s, c, rng, h.p_walk, check=chk)
    if h.kind == "tabu":
        window = TabuWindow(h.tabu_len)
        return lambda s, c, rng, chk: pick_var_tabu(s, c, rng, h.p_walk, window, check=chk)
    last_flip = [-1] * (n_vars + 1)

    def novelty(s, c, rng, chk):
        ch = pick_var_novelty(s, c, rng, h.p_novelty, last_flip, check=chk)
        # step index of this flip; flips so far are counted by the caller
        last_flip[ch.var] = novelty.step
        return ch

    novelty.step = 0
    return novelty


def _run_trial_python(f, h, t, rng, hooks):
    n, m = f.n_vars, f.n_clauses
    x = [rng.bit() for _ in range(n)]
    s = SearchState(f, x)
    pick = _picker(h, n)
    on_state = hooks.on_state if hooks is not None else None
    on_flip = hooks.on_flip if hooks is not None else None
    if on_state:
        on_state(s.energy, s.tlc, s.n_crit)

    first = None
    if s.energy == 0:
        first = TrialResult(True, 0, 0, s.tlc, tuple(s.assignment))
    flips = 0
    if first is None or not t.stop_on_solution:
        while flips < t.max_flips:
            e = s.energy
            if e == 0:
                if m == 0:
                    break
                c = rng.below(m)
            else:
                c = s.unsat[rng.below(e)]
            pick.step = flips
            choice = pick(s, c, rng, e != 0)
            trans = s.flip(choice.var)
            flips += 1
            if on_flip:
                on_flip(choice.var, trans, choice.random_step)
            if on_state:
                on_state(s.energy, s.tlc, s.n_crit)
            if s.energy == 0 and first is None:
                first = TrialResult(True, flips, 0, s.tlc, tuple(s.assignment))
                if t.stop_on_solution:
                    break
    if first is not None:
        return first
    return TrialResult(False, flips, s.energy, s.tlc, None)


_KIND_CODE = {k: i for i, k in enumerate(KINDS)}


def _run_trial_native(f, h, t, rng, acc):
    lits, ps, pi, ns, ni = f.arrays()
    state = np.array(rng.state, dtype=np.uint64)
    args = (None, None, None, None, None)
    if acc is not None:
        args = (acc.histogram, acc.hist_overflow, acc.crit_sum, acc.crit_count, acc.transitions)
    solved, flips, energy, tlc, sol = _ckernel.run_trial(
        lits, ps, pi, ns, ni, f.n_vars,
        _KIND_CODE[h.kind], h.p_walk, h.r_doc, h.tlc_sign, h.tabu_len, h.p_novelty,
        t.max_flips, t.stop_on_solution, state, *args,
    )
    rng.state = [int(w) for w in state]
    solution = tuple(bool(v) for v in sol) if solved else None
    return TrialResult(bool(solved), int(flips), int(energy), int(tlc), solution)


def run_trial(
    f: Formula,
    h: HeuristicConfig,
    t: TrialConfig,
    rng: Xoshiro256,
    hooks=None,
    backend: str | None = None,
) -> TrialResult:
    """Run one trial from a uniformly random assignment drawn from ``rng``.

    Each iteration samples an unsatisfied clause uniformly, picks a
    variable in it with the configured heuristic and flips it, until the
    formula is satisfied or ``t.max_flips`` flips were made.  ``hooks`` is
    an :class:`InstrumentationHooks` or a :class:`StatsAccumulator`; it
    never changes the trajectory.
    """
    backend = backend or BACKEND
    if backend not in ("native", "python"):
        raise InvalidConfig(f"unknown backend {backend!r}")
    native_ok = hooks is None or isinstance(hooks, StatsAccumulator)
    if backend == "native" and _ckernel is not None and native_ok:
        res = _run_trial_native(f, h, t, rng, hooks)
    else:
        adapted = _AccumulatorHooks(hooks) if isinstance(hooks, StatsAccumulator) else hooks
        res = _run_trial_python(f, h, t, rng, adapted)
    if res.solved and not f.satisfies(res.solution):
        raise AssertionError("reported solution does not satisfy the formula")
    if isinstance(hooks, StatsAccumulator):
        hooks.record_trial(res)
    return res


def trial_rng(master_seed: int, trial: int) -> Xoshiro256:
    return Xoshiro256(mix(master_seed, trial))


def run_restarts(
    f: Formula,
    h: HeuristicConfig,
    t: TrialConfig,
    master_seed: int,
    hooks=None,
    trials: range | None = None,
    backend: str | None = None,
) -> tuple[float, list[TrialResult]]:
    """Independent trials, trial ``i`` seeded with ``mix(master_seed, i)``.

    ``trials`` selects a sub-range of ``range(t.n_trials)`` so a campaign
    can be sharded; the success fraction is over the trials run.
    """
    trials = range(t.n_trials) if trials is None else trials
    results = [run_trial(f, h, t, trial_rng(master_seed, i), hooks, backend) for i in trials]
    p_hat = sum(r.solved for r in results) / len(results) if results else 0.0
    return p_hat, results
