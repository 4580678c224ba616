"""Focused stochastic local search for random 3-SAT, with a true-literal-count bias."""

from .dimacs import parse_dimacs, read_dimacs, save_dimacs, write_dimacs
from .engine import BACKEND, InstrumentationHooks, TrialConfig, TrialResult, run_restarts, run_trial
from .errors import *  # noqa: F401,F403
from .formula import (
    Formula,
    SearchState,
    breakcount,
    critical_count,
    flip,
    init_state,
    makecount,
    tlc_delta,
)
from .generate import GenConfig, generate, generate_suite
from .heuristics import (
    HeuristicConfig,
    pick_var_docsat,
    pick_var_gwsat,
    pick_var_novelty,
    pick_var_tabu,
    pick_var_walksat,
)
from .oracle import dpll_sat, enumerate_assignments
from .rng import Xoshiro256
from .stats import StatsAccumulator
from .bench import (
    ExperimentConfig,
    FitResult,
    aggregate_summary,
    classify_instances,
    fit_scaling,
    rate_report,
    run_experiment,
)

__version__ = "0.1.0"
