"""Input validation helpers shared by the estimators."""

from __future__ import annotations

import numbers

import numpy as np

from .exceptions import SolverError


def check_vector(x, dim=None, name="x") -> np.ndarray:
    """Return ``x`` as a finite 1-D float array of length ``dim``."""
    arr = np.asarray(x, dtype=float).ravel()
    if dim is not None and arr.size != dim:
        raise ValueError(f"{name} must have {dim} entries, got {arr.size}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_bounds(lower, upper):
    lower = check_vector(lower, name="lower")
    upper = check_vector(upper, lower.size, name="upper")
    if np.any(lower > upper):
        raise ValueError("lower bound exceeds upper bound")
    return lower, upper


def check_positive_int(value, name, minimum=1) -> int:
    if isinstance(value, bool) or not isinstance(value, numbers.Integral) or value < minimum:
        raise SolverError(f"{name} must be an integer >= {minimum}, got {value!r}")
    return int(value)


def check_budget(value) -> int:
    return check_positive_int(value, "budget", minimum=0)


def check_fraction(value, name, low=0.0, high=1.0) -> float:
    if not isinstance(value, numbers.Real) or not (low <= value <= high):
        raise SolverError(f"{name} must lie in [{low}, {high}], got {value!r}")
    return float(value)


def check_rng(random_state) -> np.random.Generator:
    """Deterministic generator from a seed (or pass a Generator through)."""
    if isinstance(random_state, np.random.Generator):
        return random_state
    if random_state is None:
        random_state = 0
    return np.random.default_rng(random_state)
