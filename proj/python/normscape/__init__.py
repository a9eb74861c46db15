"""Norm attractors in 2x2 game space: mean-field fitness landscapes and agent-based runs."""

import json

from ._core import (
    ConfigError,
    DegeneratePayoffs,
    Game,
    NoConvergence,
    UtilityModel,
    __version__,
    aggregate_cooperation,
    classify,
    from_canonical,
    gini,
    saltelli_sample,
    sen_welfare,
    sobol_indices,
    solve_qre,
    trait_correlation,
    zero_sumness,
)
from . import _core


def landscape(config=None, threads=0):
    """Fitness landscape for a config dict (CLI schema). Arrays are indexed [u, v]."""
    return _core.landscape(json.dumps(config or {}), threads)


def run_abm(config=None, seed=42, threads=0):
    """Agent-based simulation; one list of per-period metric dicts per replicate."""
    return _core.run_abm(json.dumps(config or {}), seed, threads)


__all__ = [
    "ConfigError",
    "DegeneratePayoffs",
    "Game",
    "NoConvergence",
    "UtilityModel",
    "__version__",
    "aggregate_cooperation",
    "classify",
    "from_canonical",
    "gini",
    "landscape",
    "run_abm",
    "saltelli_sample",
    "sen_welfare",
    "sobol_indices",
    "solve_qre",
    "trait_correlation",
    "zero_sumness",
]
