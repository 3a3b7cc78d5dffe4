"""Centralized numeric tolerances.

All comparison thresholds used across the library live in one record so a
caller can tighten or relax the whole stack coherently instead of hunting
scattered literals.
"""

from dataclasses import dataclass


@dataclass(frozen=True)
class Tolerances:
    """Numeric comparison thresholds.

    Attributes
    ----------
    rel:
        Relative tolerance. Scales with the magnitude of the quantities
        involved; used e.g. for the barrier-membership band, which is
        ``rel * (1 + ||x_A||^2)`` wide in quadratic-form units.
    abs:
        Absolute tolerance for quantities expected to be exactly zero
        (lateral coincidence, height differences, heading norms).
    cond_cap:
        Condition-number ceiling for the small SPD solves in the optimal
        target-point construction; beyond it the result is not trusted.
    """

    rel: float = 1e-9
    abs: float = 1e-12
    cond_cap: float = 1e12


DEFAULT_TOLS = Tolerances()

# Brute-force oracle limits: per-round grid evaluations and search dimension.
ORACLE_EVAL_BUDGET = 21 ** 4
ORACLE_MAX_DIM = 6
