"""Finite probability spaces and joint distributions.

Core representations used everywhere else in the package: a finite
probability space with named atoms, a joint distribution over a product
of two such spaces, i.i.d. tensor powers, seeded sampling, total
variation distance, and the empirical 2x2 tables produced by binary
strategy pairs.

Conventions
-----------
* Probabilities are float64.  Construction renormalizes once and records
  the pre-correction residual; input drift beyond ``SUM_TOL`` is an error.
* Atoms with zero probability are dropped at construction; the original
  labels are kept in ``dropped_atoms`` metadata.
* Tensor-power atom labels are the coordinate labels joined with ``"|"``.
  JSON parsing rejects base labels containing the separator.
* All objects are immutable after construction (arrays have the
  writeable flag cleared) and safe to share across threads.
"""

from __future__ import annotations

import json
from typing import Sequence

import numpy as np

from .errors import InputError, ParameterRangeError, ResourceLimitError

SUM_TOL = 1e-12
ATOM_SEPARATOR = "|"
DEFAULT_CELL_CAP = 10**8


def _freeze(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


class FiniteSpace:
    """A finite probability space with ordered, named atoms.

    Every listed atom has strictly positive probability; zero-probability
    atoms passed to the constructor are trimmed and remembered in
    ``dropped_atoms``.
    """

    __slots__ = ("atoms", "probs", "dropped_atoms", "normalization_residual", "_index")

    def __init__(self, atoms: Sequence[str], probs: Sequence[float]):
        atoms = [str(a) for a in atoms]
        p = np.asarray(probs, dtype=float)
        if p.ndim != 1 or len(atoms) != p.shape[0]:
            raise InputError("atoms and probs must be 1-d sequences of equal length")
        if len(atoms) == 0:
            raise InputError("a probability space needs at least one atom")
        if len(set(atoms)) != len(atoms):
            raise InputError("atom labels must be unique")
        if not np.all(np.isfinite(p)):
            raise InputError("probabilities must be finite")
        if np.any(p < 0):
            raise InputError("probabilities must be nonnegative")
        residual = float(p.sum() - 1.0)
        if abs(residual) > SUM_TOL:
            raise InputError(
                f"probabilities sum to {p.sum():.17g}, off by {residual:.3g} (tolerance {SUM_TOL})"
            )
        keep = p > 0.0
        if not keep.any():
            raise InputError("all atoms have zero probability")
        self.dropped_atoms = tuple(a for a, k in zip(atoms, keep) if not k)
        self.atoms = tuple(a for a, k in zip(atoms, keep) if k)
        p = p[keep]
        self.normalization_residual = residual
        self.probs = _freeze(p / p.sum())
        self._index = {a: i for i, a in enumerate(self.atoms)}

    @property
    def q(self) -> int:
        """Number of atoms."""
        return len(self.atoms)

    @property
    def alpha(self) -> float:
        """Minimum atom probability."""
        return float(self.probs.min())

    def index(self, atom: str) -> int:
        try:
            return self._index[atom]
        except KeyError:
            raise InputError(f"unknown atom {atom!r}") from None

    def power_atoms(self, n: int) -> list[str]:
        """Labels of the n-fold product space, separator-joined, row-major."""
        labels = [""]
        for _ in range(n):
            labels = [
                (l + ATOM_SEPARATOR + a) if l else a for l in labels for a in self.atoms
            ]
        return labels

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FiniteSpace)
            and self.atoms == other.atoms
            and np.array_equal(self.probs, other.probs)
        )

    def __hash__(self):
        return hash((self.atoms, self.probs.tobytes()))

    def __repr__(self):
        return f"FiniteSpace({list(self.atoms)!r}, {self.probs.tolist()!r})"


class JointDistribution:
    """A joint probability table over the product of two finite spaces.

    The marginals are derived from the table after trimming rows/columns
    of zero marginal mass, so marginal consistency holds by construction.
    ``alpha`` is the smallest strictly positive table entry.
    """

    __slots__ = ("row_space", "col_space", "table", "normalization_residual")

    def __init__(self, row_atoms: Sequence[str], col_atoms: Sequence[str], table):
        t = np.asarray(table, dtype=float)
        if t.ndim != 2:
            raise InputError("table must be a 2-d matrix")
        if t.shape != (len(row_atoms), len(col_atoms)):
            raise InputError(
                f"table shape {t.shape} does not match {len(row_atoms)} x {len(col_atoms)} atoms"
            )
        if not np.all(np.isfinite(t)):
            raise InputError("table entries must be finite")
        if np.any(t < 0):
            raise InputError("table entries must be nonnegative")
        residual = float(t.sum() - 1.0)
        if abs(residual) > SUM_TOL:
            raise InputError(
                f"table entries sum to {t.sum():.17g}, off by {residual:.3g} (tolerance {SUM_TOL})"
            )
        self.normalization_residual = residual
        t = t / t.sum()
        row_keep = t.sum(axis=1) > 0.0
        col_keep = t.sum(axis=0) > 0.0
        t = t[np.ix_(row_keep, col_keep)]
        t = t / t.sum()
        self.table = _freeze(t)
        self.row_space = FiniteSpace(
            [a for a, k in zip(row_atoms, row_keep) if k], t.sum(axis=1)
        )
        self.col_space = FiniteSpace(
            [a for a, k in zip(col_atoms, col_keep) if k], t.sum(axis=0)
        )

    @property
    def alpha(self) -> float:
        """Smallest strictly positive joint probability."""
        t = self.table
        return float(t[t > 0.0].min())

    @property
    def shape(self) -> tuple[int, int]:
        return self.table.shape

    # -- serialization ------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "row_atoms": list(self.row_space.atoms),
            "col_atoms": list(self.col_space.atoms),
            "probs": [list(row) for row in self.table],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def from_json_dict(cls, d: dict) -> "JointDistribution":
        for key in ("row_atoms", "col_atoms", "probs"):
            if key not in d:
                raise InputError(f"distribution JSON is missing key {key!r}")
        for side in ("row_atoms", "col_atoms"):
            for a in d[side]:
                if ATOM_SEPARATOR in str(a):
                    raise InputError(
                        f"atom label {a!r} contains the reserved separator {ATOM_SEPARATOR!r}"
                    )
        return cls(d["row_atoms"], d["col_atoms"], d["probs"])

    @classmethod
    def from_json(cls, text: str) -> "JointDistribution":
        try:
            d = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError(f"malformed JSON: {exc}") from None
        if not isinstance(d, dict):
            raise InputError("distribution JSON must be an object")
        return cls.from_json_dict(d)

    def __repr__(self):
        return (
            f"JointDistribution({list(self.row_space.atoms)!r}, "
            f"{list(self.col_space.atoms)!r}, shape={self.shape})"
        )


class EmpiricalJoint2x2:
    """Counts or probabilities over the four outcomes of a binary pair.

    Outcome order is ``(+1,+1), (+1,-1), (-1,+1), (-1,-1)``, matching the
    row-major flattening of a 2x2 table with atom order ``["+1", "-1"]``.
    """

    __slots__ = ("probs", "n_samples")

    OUTCOMES = ((1, 1), (1, -1), (-1, 1), (-1, -1))

    def __init__(self, probs: Sequence[float], n_samples: int | None = None):
        p = np.asarray(probs, dtype=float)
        if p.shape != (4,):
            raise InputError("need exactly four outcome probabilities")
        if np.any(p < 0) or not np.all(np.isfinite(p)):
            raise InputError("outcome probabilities must be finite and nonnegative")
        if abs(p.sum() - 1.0) > 1e-9:
            raise InputError(f"outcome probabilities sum to {p.sum():.17g}, not 1")
        self.probs = _freeze(p / p.sum())
        self.n_samples = n_samples

    @classmethod
    def from_counts(cls, counts: Sequence[int]) -> "EmpiricalJoint2x2":
        c = np.asarray(counts, dtype=float)
        if c.shape != (4,):
            raise InputError("need exactly four outcome counts")
        total = c.sum()
        if total <= 0:
            raise InputError("counts must sum to a positive number")
        return cls(c / total, n_samples=int(total))

    @classmethod
    def from_moments(cls, mean_u: float, mean_v: float, corr_uv: float) -> "EmpiricalJoint2x2":
        """Build the table with given E[U], E[V], E[UV] (must be feasible)."""
        p = np.array(
            [
                (1 + mean_u + mean_v + corr_uv) / 4,
                (1 + mean_u - mean_v - corr_uv) / 4,
                (1 - mean_u + mean_v - corr_uv) / 4,
                (1 - mean_u - mean_v + corr_uv) / 4,
            ]
        )
        if np.any(p < -1e-12):
            raise InputError("moments do not define a probability table")
        return cls(np.clip(p, 0.0, None))

    @property
    def table(self) -> np.ndarray:
        return self.probs.reshape(2, 2)

    @property
    def mean_u(self) -> float:
        p = self.probs
        return float(p[0] + p[1] - p[2] - p[3])

    @property
    def mean_v(self) -> float:
        p = self.probs
        return float(p[0] - p[1] + p[2] - p[3])

    @property
    def corr_uv(self) -> float:
        p = self.probs
        return float(p[0] - p[1] - p[2] + p[3])

    def __repr__(self):
        return f"EmpiricalJoint2x2({self.probs.tolist()!r}, n_samples={self.n_samples})"


# -- constructors ------------------------------------------------------


def make_dsbs(rho: float) -> JointDistribution:
    """Binary source with uniform +-1 marginals and E[UV] = rho.

    Diagonal entries are (1+rho)/4, off-diagonal (1-rho)/4.
    """
    if not -1.0 <= rho <= 1.0:
        raise ParameterRangeError(f"correlation must lie in [-1, 1], got {rho}")
    d = (1.0 + rho) / 4.0
    o = (1.0 - rho) / 4.0
    return JointDistribution(["+1", "-1"], ["+1", "-1"], [[d, o], [o, d]])


def uniform_triple() -> JointDistribution:
    """Uniform distribution on {(0,0), (0,1), (1,0)}."""
    third = 1.0 / 3.0
    return JointDistribution(["0", "1"], ["0", "1"], [[third, third], [third, 0.0]])


def tensor_power(
    dist: JointDistribution, n: int, cell_cap: int = DEFAULT_CELL_CAP
) -> JointDistribution:
    """n-fold i.i.d. product of a joint distribution.

    The entry at ((x1..xn), (y1..yn)) is the product of the coordinate
    probabilities; atom labels are separator-joined coordinate labels.
    """
    if n < 1:
        raise ParameterRangeError(f"power must be a positive integer, got {n}")
    qa, qb = dist.shape
    cells = (qa * qb) ** n
    if cells > cell_cap:
        raise ResourceLimitError(
            f"tensor power needs {cells} cells, above the enumeration cap {cell_cap}"
        )
    table = dist.table
    t = table
    for _ in range(n - 1):
        t = np.kron(t, table)
    return JointDistribution(
        dist.row_space.power_atoms(n), dist.col_space.power_atoms(n), t
    )


# -- distances and sampling --------------------------------------------


def _prob_vector(d) -> np.ndarray:
    if isinstance(d, JointDistribution):
        return d.table.ravel()
    if isinstance(d, EmpiricalJoint2x2):
        return d.probs
    a = np.asarray(d, dtype=float)
    return a.ravel()


def tv_distance(p, q) -> float:
    """Total variation distance: half the l1 distance between the tables.

    Accepts joint distributions, empirical 2x2 tables, or raw arrays; the
    two arguments must have the same outcome set.
    """
    if isinstance(p, JointDistribution) and isinstance(q, JointDistribution):
        if (
            p.row_space.atoms != q.row_space.atoms
            or p.col_space.atoms != q.col_space.atoms
        ):
            raise InputError("distributions are over different atom sets")
    pv, qv = _prob_vector(p), _prob_vector(q)
    if pv.shape != qv.shape:
        raise InputError(f"shape mismatch: {pv.shape} vs {qv.shape}")
    return float(0.5 * np.abs(pv - qv).sum())


def sample_joint_indices(
    dist: JointDistribution, n: int, seed=0
) -> tuple[np.ndarray, np.ndarray]:
    """n i.i.d. draws as (row_index, col_index) arrays. Same seed, same draws."""
    if n < 0:
        raise ParameterRangeError(f"sample count must be nonnegative, got {n}")
    rng = np.random.default_rng(seed)
    qa, qb = dist.shape
    flat = rng.choice(qa * qb, size=n, p=dist.table.ravel())
    return flat // qb, flat % qb


def sample_joint(dist: JointDistribution, n: int, seed=0) -> list[tuple[str, str]]:
    """n i.i.d. draws as (row_atom, col_atom) label pairs."""
    ri, ci = sample_joint_indices(dist, n, seed)
    ra, ca = dist.row_space.atoms, dist.col_space.atoms
    return [(ra[i], ca[j]) for i, j in zip(ri, ci)]


def empirical_table(dist: JointDistribution, n: int, seed=0) -> np.ndarray:
    """Empirical joint frequency matrix from n samples (n must be positive).

    Returned as a raw matrix (same shape as ``dist.table``) so it can be
    compared against the truth even when some cells were never hit.
    """
    ri, ci = sample_joint_indices(dist, n, seed)
    qa, qb = dist.shape
    counts = np.bincount(ri * qb + ci, minlength=qa * qb).reshape(qa, qb)
    return counts / counts.sum()
