"""Exact variance-penalized stochastic shortest path solver."""

from .distribution import (
    FrequencyTable,
    MomentPair,
    TerminalDistribution,
    convex_combination,
    frequencies,
    memoryless_moments,
    mixture_moments,
    moments_from_distribution,
    scheduler_moments,
    terminal_distribution,
)
from .endcomponents import classify_ec, find_end_components
from .expectation import Direction, prune_to_optimal, solve_expectation
from .gadget import GadgetInstance, build_gadget, f_bound
from .mdp import Action, Mdp, build_mdp, load_fixture, load_mdp, parse_mdp, serialize_mdp
from .numeric import decimal_approx, format_rational, rational_parse, solve_linear_system
from .schedulers import MemorylessScheduler, WeightBasedScheduler, memoryless, parse_scheduler, serialize_scheduler
from .simulate import SimulationSummary, simulate
from .variance import VarianceMinSolution, min_variance_among_optimal
from .vpe import (
    Objective,
    SaturationConstants,
    Verdict,
    VpeReport,
    frontier,
    maximize_vpe,
    saturation_point,
    threshold,
    unfold,
    vpe_of_scheduler,
)

__all__ = [name for name in dir() if not name.startswith("_")]
