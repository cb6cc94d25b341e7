"""Fourier analysis on finite product probability spaces.

Functions f in L2(A^n, mu^n) are represented two ways: as dense value
tables (row-major over atom-index tuples, coordinate 0 most significant)
and as sparse coefficient maps over degree sequences sigma in Z_q^n,
relative to a fixed orthonormal basis with the constant function first.
Degree sequences are encoded as base-q integers for canonical map keys.

Coordinates are 0-based throughout.

The noise operator is implemented spectrally (coefficient multiplier
gamma^|sigma|); the Markov-kernel route is provided separately so tests
can check the equivalence rather than rely on it.
"""

from __future__ import annotations

import math
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import InputError, ParameterRangeError, ResourceLimitError
from .spaces import FiniteSpace

ORTHONORMALITY_TOL = 1e-10
GS_RESIDUAL_TOL = 1e-12
COEFF_DROP_TOL = 1e-14
DENSE_CELL_CAP = 10**8


# -- basis --------------------------------------------------------------


class OrthonormalBasis:
    """Orthonormal basis of L2(A, mu) with the constant function first.

    ``chars[j]`` is the j-th basis function as a vector over atoms.
    """

    __slots__ = ("space", "chars")

    def __init__(self, space: FiniteSpace, chars: np.ndarray):
        self.space = space
        chars = np.asarray(chars, dtype=float)
        if chars.shape != (space.q, space.q):
            raise InputError("need exactly q basis functions over q atoms")
        gram = (chars * space.probs) @ chars.T
        if not np.allclose(gram, np.eye(space.q), atol=ORTHONORMALITY_TOL):
            raise InputError("basis functions are not orthonormal under mu")
        if not np.allclose(chars[0], 1.0, atol=ORTHONORMALITY_TOL):
            raise InputError("the first basis function must be identically 1")
        chars.setflags(write=False)
        self.chars = chars

    @property
    def q(self) -> int:
        return self.space.q


def build_basis(space: FiniteSpace) -> OrthonormalBasis:
    """Gram-Schmidt over {1, indicators in atom order}, skipping dependents.

    Deterministic: candidate order is fixed, and a candidate is skipped
    when its residual norm after projection falls below 1e-12.
    """
    q = space.q
    mu = space.probs
    candidates = [np.ones(q)]
    for a in range(q):
        e = np.zeros(q)
        e[a] = 1.0
        candidates.append(e)
    chars: list[np.ndarray] = []
    for cand in candidates:
        v = cand.astype(float)
        for c in chars:
            v = v - float(mu @ (v * c)) * c
        norm = math.sqrt(float(mu @ v**2))
        if norm < GS_RESIDUAL_TOL:
            continue
        chars.append(v / norm)
        if len(chars) == q:
            break
    return OrthonormalBasis(space, np.array(chars))


# -- value tables --------------------------------------------------------


class ValueTable:
    """Dense values of a function on A^n, row-major in atom order."""

    __slots__ = ("space", "n", "values")

    def __init__(self, space: FiniteSpace, n: int, values):
        if n < 0:
            raise ParameterRangeError("coordinate count must be nonnegative")
        v = np.asarray(values, dtype=float).ravel()
        if v.shape[0] != space.q**n:
            raise InputError(f"expected {space.q ** n} values, got {v.shape[0]}")
        self.space = space
        self.n = n
        self.values = v

    def weights(self) -> np.ndarray:
        """Product-measure weights, aligned with the value order."""
        w = np.ones(1)
        for _ in range(self.n):
            w = np.kron(w, self.space.probs)
        return w

    def mean(self) -> float:
        return float(self.weights() @ self.values)

    def norm(self, p: float) -> float:
        """lp norm under the product measure (p = inf gives the max on the support)."""
        if p == math.inf:
            return float(np.abs(self.values).max())
        return float((self.weights() @ np.abs(self.values) ** p) ** (1.0 / p))


# -- degree-sequence encoding -------------------------------------------


def sigma_encode(sigma: Sequence[int], q: int) -> int:
    key = 0
    for s in sigma:
        key = key * q + int(s)
    return key


def sigma_decode(key: int, q: int, n: int) -> tuple[int, ...]:
    digits = []
    for _ in range(n):
        key, r = divmod(key, q)
        digits.append(r)
    return tuple(reversed(digits))


def sigma_degree(key: int, q: int, n: int) -> int:
    deg = 0
    for _ in range(n):
        key, r = divmod(key, q)
        if r:
            deg += 1
    return deg


# -- polynomials ---------------------------------------------------------


class FourierPolynomial:
    """Sparse coefficient table of a function in L2(A^n, mu^n)."""

    __slots__ = ("basis", "n", "coeffs")

    def __init__(self, basis: OrthonormalBasis, n: int, coeffs: Mapping[int, float]):
        self.basis = basis
        self.n = n
        self.coeffs = {
            int(k): float(c) for k, c in coeffs.items() if abs(c) > COEFF_DROP_TOL
        }

    @property
    def q(self) -> int:
        return self.basis.q

    def degree_of(self, key: int) -> int:
        return sigma_degree(key, self.q, self.n)

    def degree(self) -> int:
        return max((self.degree_of(k) for k in self.coeffs), default=0)

    def mean(self) -> float:
        return self.coeffs.get(0, 0.0)

    def variance(self) -> float:
        return sum(c * c for k, c in self.coeffs.items() if k != 0)

    def energy(self) -> float:
        """Sum of squared coefficients (equals E[f^2] by Parseval)."""
        return sum(c * c for c in self.coeffs.values())

    def l2_norm(self) -> float:
        return math.sqrt(self.energy())

    def coefficient(self, sigma: Sequence[int]) -> float:
        return self.coeffs.get(sigma_encode(sigma, self.q), 0.0)


def transform(table: ValueTable, basis: OrthonormalBasis | None = None) -> FourierPolynomial:
    """Coefficients f_hat(sigma) = <f, X_sigma> under the product measure."""
    if basis is None:
        basis = build_basis(table.space)
    if basis.space != table.space:
        raise InputError("basis and value table live on different spaces")
    q, n = basis.q, table.n
    if n == 0:
        return FourierPolynomial(basis, 0, {0: float(table.values[0])})
    arr = table.values.reshape((q,) * n)
    b = basis.chars * table.space.probs  # b[j, a] = mu(a) X_j(a)
    for _ in range(n):
        arr = np.tensordot(arr, b, axes=([0], [1]))
    flat = arr.ravel()
    nz = np.nonzero(np.abs(flat) > COEFF_DROP_TOL)[0]
    return FourierPolynomial(basis, n, {int(k): float(flat[k]) for k in nz})


def inverse_transform(poly: FourierPolynomial) -> ValueTable:
    """Pointwise values f(x) = sum_sigma f_hat(sigma) X_sigma(x)."""
    q, n = poly.q, poly.n
    cells = q**n
    if cells > DENSE_CELL_CAP:
        raise ResourceLimitError(
            f"dense table needs {cells} cells, above the cap {DENSE_CELL_CAP}"
        )
    if n == 0:
        return ValueTable(poly.basis.space, 0, [poly.coeffs.get(0, 0.0)])
    arr = np.zeros(cells)
    for k, c in poly.coeffs.items():
        arr[k] = c
    arr = arr.reshape((q,) * n)
    for _ in range(n):
        arr = np.tensordot(arr, poly.basis.chars, axes=([0], [0]))
    return ValueTable(poly.basis.space, n, arr.ravel())


# -- spectral functionals -------------------------------------------------


def influence(poly: FourierPolynomial, i: int) -> float:
    """Fourier mass on degree sequences with a nonzero entry at coordinate i."""
    if not 0 <= i < poly.n:
        raise ParameterRangeError(f"coordinate {i} outside [0, {poly.n})")
    q, n = poly.q, poly.n
    place = q ** (n - 1 - i)
    return sum(c * c for k, c in poly.coeffs.items() if (k // place) % q != 0)


def influences(poly: FourierPolynomial) -> np.ndarray:
    """All n coordinate influences at once."""
    out = np.zeros(poly.n)
    q, n = poly.q, poly.n
    for k, c in poly.coeffs.items():
        c2 = c * c
        key = k
        for i in range(n - 1, -1, -1):
            key, r = divmod(key, q)
            if r:
                out[i] += c2
    return out


def total_influence(poly: FourierPolynomial) -> float:
    """Sum over sigma of |sigma| * f_hat(sigma)^2."""
    return sum(poly.degree_of(k) * c * c for k, c in poly.coeffs.items())


def degree_tail_mass(poly: FourierPolynomial, d: int) -> float:
    """Fourier mass strictly above degree d."""
    if d < 0:
        raise ParameterRangeError("degree cutoff must be nonnegative")
    return sum(c * c for k, c in poly.coeffs.items() if poly.degree_of(k) > d)


def truncate_degree(poly: FourierPolynomial, d: int) -> FourierPolynomial:
    """Keep coefficients with |sigma| <= d."""
    if d < 0:
        raise ParameterRangeError("degree cutoff must be nonnegative")
    kept = {k: c for k, c in poly.coeffs.items() if poly.degree_of(k) <= d}
    return FourierPolynomial(poly.basis, poly.n, kept)


def noise_operator(poly: FourierPolynomial, gamma: float) -> FourierPolynomial:
    """Coefficient-wise multiplier gamma^|sigma|; the mean is untouched."""
    if not 0.0 <= gamma <= 1.0:
        raise ParameterRangeError(f"noise rate must lie in [0, 1], got {gamma}")
    out = {k: c * gamma ** poly.degree_of(k) for k, c in poly.coeffs.items()}
    return FourierPolynomial(poly.basis, poly.n, out)


def noise_operator_kernel(table: ValueTable, gamma: float) -> ValueTable:
    """Markov-kernel form of the noise operator, applied to a value table.

    Each coordinate is kept with probability gamma and resampled from mu
    otherwise.  Spectrally equivalent to ``noise_operator``; kept as the
    independent route for tests.
    """
    if not 0.0 <= gamma <= 1.0:
        raise ParameterRangeError(f"noise rate must lie in [0, 1], got {gamma}")
    q, n = table.space.q, table.n
    mu = table.space.probs
    kernel = gamma * np.eye(q) + (1.0 - gamma) * np.tile(mu, (q, 1))
    arr = table.values.reshape((q,) * n) if n else table.values.copy()
    for _ in range(n):
        arr = np.tensordot(arr, kernel, axes=([0], [1]))
    return ValueTable(table.space, n, np.asarray(arr).ravel())


def restrict(
    poly: FourierPolynomial, coords: Iterable[int], assignment: Sequence
) -> FourierPolynomial:
    """Fix the coordinates in ``coords`` to ``assignment`` (atoms or indices).

    Coefficients collapse as
    P_xi_hat(sigma_T) = sum over sigma_H of P_hat(sigma_H o sigma_T) X_sigma_H(xi);
    the result is re-indexed over the surviving coordinates in order.
    """
    H = sorted(set(int(i) for i in coords))
    if any(i < 0 or i >= poly.n for i in H):
        raise ParameterRangeError(f"restricted coordinates must lie in [0, {poly.n})")
    assignment = list(assignment)
    if len(assignment) != len(H):
        raise InputError(f"need {len(H)} assigned atoms, got {len(assignment)}")
    space = poly.basis.space
    xi = [
        a if isinstance(a, (int, np.integer)) else space.index(a) for a in assignment
    ]
    for a in xi:
        if not 0 <= a < space.q:
            raise InputError(f"atom index {a} outside the space")
    q, n = poly.q, poly.n
    in_H = [False] * n
    for i in H:
        in_H[i] = True
    chars = poly.basis.chars
    out: dict[int, float] = {}
    for k, c in poly.coeffs.items():
        sigma = sigma_decode(k, q, n)
        factor = 1.0
        new_key = 0
        pos = 0
        for i, s in enumerate(sigma):
            if in_H[i]:
                factor *= chars[s, xi[pos]]
                pos += 1
            else:
                new_key = new_key * q + s
        if factor != 0.0:
            out[new_key] = out.get(new_key, 0.0) + c * factor
    return FourierPolynomial(poly.basis, n - len(H), out)


# -- hypercontractivity ----------------------------------------------------


def hypercontractivity_constant(alpha: float, p: float) -> float:
    """C_p(alpha) = (A^{1/p'} - A^{-1/p'}) / (A^{1/p} - A^{-1/p}), A = (1-alpha)/alpha.

    alpha above 1/2 is clamped to 1/2, where the limit value is p - 1.
    """
    if p < 2:
        raise ParameterRangeError(f"norm order must be at least 2, got {p}")
    if not 0.0 < alpha <= 1.0:
        raise ParameterRangeError(f"minimum atom probability must lie in (0, 1], got {alpha}")
    alpha = min(alpha, 0.5)
    if alpha == 0.5:
        return p - 1.0
    A = (1.0 - alpha) / alpha
    pp = p / (p - 1.0)
    return (A ** (1.0 / pp) - A ** (-1.0 / pp)) / (A ** (1.0 / p) - A ** (-1.0 / p))


def hypercontractive_norm_bound(poly: FourierPolynomial, norm_order: float) -> float:
    """Upper bound C_p(alpha)^{d/2} * ||f||_2 on the lp norm of a degree-d polynomial."""
    c = hypercontractivity_constant(poly.basis.space.alpha, norm_order)
    return c ** (poly.degree() / 2.0) * poly.l2_norm()


def concentration_bound(d: int, alpha: float, t: float) -> float:
    """Tail bound exp(-c t^{2/d}) with c = alpha*d/e, valid for t > e^{d/2}."""
    if d < 1:
        raise ParameterRangeError("degree must be at least 1")
    c = alpha * d / math.e
    return math.exp(-c * t ** (2.0 / d))
