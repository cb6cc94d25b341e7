"""Strategies: one party's function from coordinate tuples to [-1, 1].

A strategy evaluates batches of atom-index rows (shape (m, n), coordinate
0 most significant), which is the common currency for exact enumeration
and Monte Carlo paths.  Dense value tables cover small n; structured
strategies (threshold lifts, randomized roundings) subclass and evaluate
lazily so huge coordinate counts stay cheap.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import InputError, ParameterRangeError
from .spaces import FiniteSpace


class Strategy:
    """Base class: a function on n coordinates of a finite space."""

    space: FiniteSpace
    n: int
    # True when evaluate() consumes fresh randomness, in which case exact
    # enumeration is meaningless and estimators must sample
    is_randomized: bool = False

    def evaluate(self, idx: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _check_idx(self, idx: np.ndarray) -> np.ndarray:
        idx = np.asarray(idx)
        if idx.ndim != 2 or idx.shape[1] != self.n:
            raise InputError(f"index batch must have shape (m, {self.n})")
        return idx


class TableStrategy(Strategy):
    """Dense value table over all q^n coordinate tuples (row-major)."""

    def __init__(self, space: FiniteSpace, n: int, values):
        if n < 0:
            raise ParameterRangeError("coordinate count must be nonnegative")
        v = np.asarray(values, dtype=float).ravel()
        if v.shape[0] != space.q**n:
            raise InputError(f"expected {space.q ** n} values, got {v.shape[0]}")
        self.space = space
        self.n = n
        self.values = v
        self._places = space.q ** np.arange(n - 1, -1, -1) if n else np.zeros(0, int)

    def evaluate(self, idx: np.ndarray) -> np.ndarray:
        idx = self._check_idx(idx)
        if self.n == 0:
            return np.full(idx.shape[0], self.values[0])
        return self.values[idx @ self._places]

    def exact_mean(self) -> float:
        w = np.ones(1)
        for _ in range(self.n):
            w = np.kron(w, self.space.probs)
        return float(w @ self.values)

    def clipped(self) -> "TableStrategy":
        return TableStrategy(self.space, self.n, np.clip(self.values, -1.0, 1.0))

    def scaled(self, factor: float) -> "TableStrategy":
        return TableStrategy(self.space, self.n, self.values * factor)

    def blended(self, alpha: float, center: float) -> "TableStrategy":
        """alpha * f + (1 - alpha) * center."""
        return TableStrategy(
            self.space, self.n, alpha * self.values + (1.0 - alpha) * center
        )

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "space": {
                "atoms": list(self.space.atoms),
                "probs": self.space.probs.tolist(),
            },
            "values": self.values.tolist(),
        }


def constant_strategy(space: FiniteSpace, n: int, value: float) -> TableStrategy:
    return TableStrategy(space, n, np.full(space.q**n, float(value)))


def dictator_strategy(space: FiniteSpace, n: int, coord: int, values) -> TableStrategy:
    """f(x) = values[x_coord]; handy for tests and demos."""
    v = np.asarray(values, dtype=float)
    if v.shape[0] != space.q:
        raise InputError("need one value per atom")
    q = space.q
    table = np.zeros(q**n)
    idx = np.arange(q**n)
    digit = (idx // q ** (n - 1 - coord)) % q
    table[:] = v[digit]
    return TableStrategy(space, n, table)


def strategy_from_json_dict(d: dict) -> TableStrategy:
    """Parse the function JSON format (dense values or sparse coefficients)."""
    for key in ("n", "space"):
        if key not in d:
            raise InputError(f"function JSON is missing key {key!r}")
    sp = d["space"]
    if "atoms" not in sp or "probs" not in sp:
        raise InputError("function JSON space needs 'atoms' and 'probs'")
    space = FiniteSpace(sp["atoms"], sp["probs"])
    n = int(d["n"])
    if "values" in d:
        return TableStrategy(space, n, d["values"])
    if "coeffs" in d:
        from .fourier import FourierPolynomial, build_basis, inverse_transform

        basis = build_basis(space)
        coeffs = {int(k): float(c) for k, c in d["coeffs"].items()}
        top = space.q**n
        if any(k < 0 or k >= top for k in coeffs):
            raise InputError("coefficient key outside the degree-sequence range")
        table = inverse_transform(FourierPolynomial(basis, n, coeffs))
        return TableStrategy(space, n, table.values)
    raise InputError("function JSON needs either 'values' or 'coeffs'")


def strategy_from_json(text: str) -> TableStrategy:
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON: {exc}") from None
    if not isinstance(d, dict):
        raise InputError("function JSON must be an object")
    return strategy_from_json_dict(d)
