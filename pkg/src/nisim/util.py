"""Small shared numeric helpers."""

from __future__ import annotations

import math

import numpy as np

CEIL_REL_SLACK = 1e-9


def all_assignments(q: int, h: int) -> np.ndarray:
    """All q^h atom-index tuples, lexicographic, shape (q^h, h)."""
    if h == 0:
        return np.zeros((1, 0), dtype=int)
    grids = np.meshgrid(*[np.arange(q)] * h, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def assignment_weights(probs: np.ndarray, assignments: np.ndarray) -> np.ndarray:
    """Product-measure weight of each assignment row."""
    w = np.ones(assignments.shape[0])
    for j in range(assignments.shape[1]):
        w *= probs[assignments[:, j]]
    return w


def ceil_tolerant(x: float, min_value: int | None = None) -> int:
    """Ceiling with a relative slack of 1e-9 below integer boundaries.

    Parameter formulas here are exact in real arithmetic but land a hair
    above integers in floating point (e.g. a quotient that is exactly 3600
    evaluates to 3600.0000000000005); plain ceil would then overshoot by 1.
    """
    if not math.isfinite(x):
        raise ValueError(f"cannot take the ceiling of {x}")
    v = math.ceil(x - CEIL_REL_SLACK * max(1.0, abs(x)))
    if min_value is not None and v < min_value:
        return min_value
    return v


def wilson_interval(successes: float, n: int, z: float = 1.96) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion (default 95%)."""
    if n <= 0:
        return 0.0, 1.0
    phat = successes / n
    denom = 1.0 + z * z / n
    center = (phat + z * z / (2 * n)) / denom
    half = (z / denom) * math.sqrt(phat * (1 - phat) / n + z * z / (4 * n * n))
    return max(0.0, center - half), min(1.0, center + half)


def log10_from_ln(ln_value: float) -> float:
    return ln_value / math.log(10.0)
