"""Decision layer: sample-count chain, discretized search, and verdicts.

``n0_chain`` wires the parameter recipes end to end: a gap budget delta
splits into three equal loss budgets (smoothing, correlation transfer,
Gaussian simulation); the correlation-transfer budget dictates an
influence threshold tau, tau dictates a tail budget eta, eta and the
smoothing budget dictate a degree cutoff d, d and tau dictate the
restricted-coordinate budget h, and the simulation budget dictates the
witness-sum sample count w.  The final bound is n0 = h + w.  The chain is
evaluated in log space because realistic inputs push tau and h far
outside float range.

``brute_force_bmip`` searches grid-valued strategy pairs on a tensor
power for near-balanced means and large inner product; ``decide_gap_nis``
wraps it with the reduction thresholds, a sound maximal-correlation
ceiling test, and honest labeling of bounded-depth rejections.
``decide_2x2`` extends to arbitrary binary targets via the Case I/II
moment split, reusing the maximization machinery with the second party
negated in Case II.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError, NisimError, ParameterRangeError, ResourceLimitError
from .gaussian import berry_esseen_sample_count
from .maxcorr import maximal_correlation
from .regularity import (
    RegularityParams,
    SmoothingParams,
    regularity_params,
    smoothing_params_from_log_eta,
)
from .spaces import EmpiricalJoint2x2, JointDistribution, make_dsbs, tensor_power
from .strategies import Strategy, TableStrategy
from .rounding import estimate_strategy_stats
from .util import all_assignments, ceil_tolerant, log10_from_ln

DEFAULT_WORK_CAP = 10**8
SIDE_MEM_CAP = 5 * 10**7
TABLE_CELL_CAP = 10**6
BLOCK_CELLS = 2 * 10**7
ACCEPT_TOL = 1e-12


# -- parameter chain ---------------------------------------------------------


@dataclass(frozen=True)
class ChainConstants:
    C_smooth: float = 1.0
    C_tau: float = 1.0
    C_be: float = 1.0

    def as_dict(self) -> dict:
        return {"C_smooth": self.C_smooth, "C_tau": self.C_tau, "C_be": self.C_be}


@dataclass(frozen=True)
class ParameterChain:
    """All chained constants, with log-space magnitudes where floats give out."""

    delta: float
    rho: float
    alpha: float
    lam: float
    gamma_budget: float
    zeta: float
    k_tau: int
    ln_tau: float
    tau: float
    ln_eta: float
    smoothing: SmoothingParams
    d: int
    reg_row: RegularityParams
    reg_col: RegularityParams
    h_log10: float
    h_int: int | None
    w: int
    n0_log10: float
    n0_int: int | None
    constants: ChainConstants

    def as_dict(self) -> dict:
        return {
            "delta": self.delta,
            "rho": self.rho,
            "alpha": self.alpha,
            "lambda": self.lam,
            "gamma_budget": self.gamma_budget,
            "zeta": self.zeta,
            "tau_exponent": self.k_tau,
            "tau": self.tau,
            "log10_tau": log10_from_ln(self.ln_tau),
            "log10_eta": log10_from_ln(self.ln_eta),
            "gamma_noise": self.smoothing.gamma,
            "mossel_condition_met": self.smoothing.mossel_condition_met,
            "d": self.d,
            "beta_regime_clamped": self.reg_row.beta_regime_clamped
            or self.reg_col.beta_regime_clamped,
            "h_log10": self.h_log10,
            "h": self.h_int,
            "w": self.w,
            "n0_log10": self.n0_log10,
            "n0": self.n0_int,
            "constants": self.constants.as_dict(),
            "note": "constants default to 1, so n0 is a lower estimate of the bound",
        }


def n0_chain(
    dist: JointDistribution, delta: float, constants: ChainConstants | None = None
) -> ParameterChain:
    """Evaluate the full sample-count chain for a source and gap budget."""
    if constants is None:
        constants = ChainConstants()
    if not 0.0 < delta < 1.0:
        raise ParameterRangeError(f"gap budget must lie in (0, 1), got {delta}")
    report = maximal_correlation(dist)
    rho = report.rho
    if rho >= 1.0 - 1e-12:
        raise ParameterRangeError(
            "chain undefined at maximal correlation 1 (perfectly correlated component)"
        )
    alpha = dist.alpha
    lam = gb = zeta = delta / 3.0

    k_raw = constants.C_tau * math.log(1.0 / gb) * math.log(1.0 / alpha) / ((1.0 - rho) * gb)
    k_tau = ceil_tolerant(k_raw, min_value=1)
    ln_tau = k_tau * math.log(gb)
    tau = math.exp(ln_tau) if ln_tau > -700 else 0.0
    ln_eta = 2.0 * ln_tau - math.log(16.0)

    smoothing = smoothing_params_from_log_eta(rho, lam, ln_eta, constants.C_smooth)
    d = smoothing.d

    alpha_row = min(dist.row_space.alpha, 0.5)
    alpha_col = min(dist.col_space.alpha, 0.5)
    reg_row = regularity_params(d, tau, alpha_row, ln_tau=ln_tau)
    reg_col = regularity_params(d, tau, alpha_col, ln_tau=ln_tau)

    ln_h_row = math.log(d) + reg_row.ln_inv_beta
    ln_h_col = math.log(d) + reg_col.ln_inv_beta
    ln_h = np.logaddexp(ln_h_row, ln_h_col)
    if ln_h < 42 * math.log(2):
        h_int: int | None = ceil_tolerant(d * math.exp(reg_row.ln_inv_beta)) + ceil_tolerant(
            d * math.exp(reg_col.ln_inv_beta)
        )
        ln_h = math.log(h_int)
    else:
        h_int = None

    w = berry_esseen_sample_count(rho, alpha, zeta, constants.C_be)
    ln_n0 = float(np.logaddexp(ln_h, math.log(w)))
    n0_int = h_int + w if h_int is not None else None

    return ParameterChain(
        delta=delta,
        rho=rho,
        alpha=alpha,
        lam=lam,
        gamma_budget=gb,
        zeta=zeta,
        k_tau=k_tau,
        ln_tau=ln_tau,
        tau=tau,
        ln_eta=ln_eta,
        smoothing=smoothing,
        d=d,
        reg_row=reg_row,
        reg_col=reg_col,
        h_log10=log10_from_ln(float(ln_h)),
        h_int=h_int,
        w=w,
        n0_log10=log10_from_ln(ln_n0),
        n0_int=n0_int,
        constants=constants,
    )


# -- range discretization -------------------------------------------------------


def discretize_range(delta: float) -> np.ndarray:
    """Symmetric value grid {k * delta^2/10 : |k| < 10/delta^2}, strictly inside (-1, 1)."""
    if not 0.0 < delta <= 1.0:
        raise ParameterRangeError(f"gap budget must lie in (0, 1], got {delta}")
    spacing = delta * delta / 10.0
    k_max = int(math.floor(10.0 / (delta * delta) - 1e-9))
    return spacing * np.arange(-k_max, k_max + 1)


# -- targets and verdicts ---------------------------------------------------------


@dataclass(frozen=True)
class Target2x2:
    """A 2x2 target over +-1 outcomes with its moment summary and case tag."""

    joint: EmpiricalJoint2x2

    @property
    def mean_u(self) -> float:
        return self.joint.mean_u

    @property
    def mean_v(self) -> float:
        return self.joint.mean_v

    @property
    def corr_uv(self) -> float:
        return self.joint.corr_uv

    @property
    def case(self) -> str:
        return "I" if self.corr_uv >= self.mean_u * self.mean_v else "II"

    @classmethod
    def from_dsbs(cls, rho: float) -> "Target2x2":
        d = make_dsbs(rho)
        # rebuild the full 2x2 table even when support trimming dropped cells
        t = np.zeros(4)
        lookup = {("+1", "+1"): 0, ("+1", "-1"): 1, ("-1", "+1"): 2, ("-1", "-1"): 3}
        for i, ra in enumerate(d.row_space.atoms):
            for j, ca in enumerate(d.col_space.atoms):
                t[lookup[(ra, ca)]] = d.table[i, j]
        return cls(EmpiricalJoint2x2(t))

    @classmethod
    def from_table(cls, table) -> "Target2x2":
        t = np.asarray(table, dtype=float)
        if t.shape == (2, 2):
            t = t.ravel()
        return cls(EmpiricalJoint2x2(t))

    def as_dict(self) -> dict:
        return {
            "probs": self.joint.table.tolist(),
            "mean_u": self.mean_u,
            "mean_v": self.mean_v,
            "corr_uv": self.corr_uv,
            "case": self.case,
        }


@dataclass
class Verdict:
    decision: str
    sound: bool
    reason: str
    thresholds: dict
    caveat: str = ""
    n_used: int | None = None
    witness_f: TableStrategy | None = None
    witness_g: TableStrategy | None = None
    achieved: dict | None = None
    search_max: float | None = None
    n0_report: dict | None = None

    @property
    def accepted(self) -> bool:
        return self.decision == "ACCEPT"

    def as_dict(self) -> dict:
        out = {
            "decision": self.decision,
            "sound": self.sound,
            "reason": self.reason,
            "thresholds": self.thresholds,
            "caveat": self.caveat,
            "n_used": self.n_used,
            "achieved": self.achieved,
            "search_max": self.search_max,
        }
        if self.witness_f is not None:
            out["witness"] = {
                "f": self.witness_f.values.tolist(),
                "g": self.witness_g.values.tolist(),
            }
        else:
            out["witness"] = None
        if self.n0_report is not None:
            out["n0"] = self.n0_report
        return out


# -- brute-force search -----------------------------------------------------------


@dataclass(frozen=True)
class BmipResult:
    accept: bool
    best_value: float
    f_values: np.ndarray | None
    g_values: np.ndarray | None
    mean_f: float | None
    mean_g: float | None
    thresholds: dict
    feasible_pairs: bool
    mode: str = "enumeration"


def _tensor_weights(dist: JointDistribution, n: int):
    qa, qb = dist.shape
    cells = (qa * qb) ** n
    if cells > TABLE_CELL_CAP:
        raise ResourceLimitError(
            f"tensor table needs {cells} cells, above the search cap {TABLE_CELL_CAP}"
        )
    W = dist.table
    for _ in range(n - 1):
        W = np.kron(W, dist.table)
    wa = np.ones(1)
    wb = np.ones(1)
    for _ in range(n):
        wa = np.kron(wa, dist.row_space.probs)
        wb = np.kron(wb, dist.col_space.probs)
    return W, wa, wb


def _grid_assignments(grid: np.ndarray, k: int) -> np.ndarray:
    """All |grid|^k value rows, lexicographic in the given grid order."""
    if len(grid) ** k * k > SIDE_MEM_CAP:
        raise ResourceLimitError(
            f"{len(grid) ** k} grid assignments of width {k} exceed the memory cap"
        )
    grids = np.meshgrid(*[grid] * k, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def brute_force_bmip(
    dist: JointDistribution,
    n: int,
    rho_target: float,
    delta: float,
    mean_caps: tuple[float, float],
    grid: np.ndarray | None = None,
    mean_centers: tuple[float, float] = (0.0, 0.0),
    mean_slack: float | None = None,
    corr_slack: float | None = None,
    work_cap: int = DEFAULT_WORK_CAP,
    branch_and_bound: bool = False,
) -> BmipResult:
    """Maximize E[f g] over grid-valued strategy pairs with near-capped means.

    Accepts when the best mean-feasible pair reaches rho_target - corr_slack.
    Default slacks absorb the grid rounding error: mean slack delta^2/5 and
    correlation slack delta^2/4.  Deterministic: lexicographic enumeration,
    first maximum kept.
    """
    if n < 1:
        raise ParameterRangeError(f"power must be positive, got {n}")
    if grid is None:
        grid = discretize_range(delta)
    grid = np.asarray(grid, dtype=float)
    if mean_slack is None:
        mean_slack = delta * delta / 5.0
    if corr_slack is None:
        corr_slack = delta * delta / 4.0
    cap_f, cap_g = mean_caps
    center_f, center_g = mean_centers
    W, wa, wb = _tensor_weights(dist, n)
    ka, kb = W.shape

    thresholds = {
        "rho_target": rho_target,
        "corr_slack": corr_slack,
        "mean_cap_f": cap_f,
        "mean_cap_g": cap_g,
        "mean_center_f": center_f,
        "mean_center_g": center_g,
        "mean_slack": mean_slack,
        "grid_size": int(len(grid)),
        "accept_floor": rho_target - corr_slack,
    }

    pairs = float(len(grid)) ** (ka + kb)
    if pairs > work_cap and not branch_and_bound:
        raise ResourceLimitError(
            f"{pairs:.3g} grid pairs exceed the work cap {work_cap}; "
            "enable branch_and_bound or coarsen the grid"
        )

    G = _grid_assignments(grid, kb)
    feas_g = np.abs(G @ wb - center_g) <= cap_g + mean_slack + ACCEPT_TOL
    G = G[feas_g]
    if len(G) == 0:
        return BmipResult(False, -math.inf, None, None, None, None, thresholds, False)

    if pairs <= work_cap:
        F = _grid_assignments(grid, ka)
        feas_f = np.abs(F @ wa - center_f) <= cap_f + mean_slack + ACCEPT_TOL
        F = F[feas_f]
        if len(F) == 0:
            return BmipResult(False, -math.inf, None, None, None, None, thresholds, False)
        C = F @ W  # (Nf, kb)
        GT = np.ascontiguousarray(G.T)
        best_val = -math.inf
        best_i = best_j = -1
        block = max(1, BLOCK_CELLS // max(1, len(G)))
        for start in range(0, len(F), block):
            vals = C[start : start + block] @ GT
            i, j = np.unravel_index(np.argmax(vals), vals.shape)
            v = float(vals[i, j])
            if v > best_val:
                best_val = v
                best_i, best_j = start + int(i), int(j)
        fv, gv = F[best_i], G[best_j]
    else:
        best_val, fv, gv = _bnb_f_search(
            W, wa, grid, G, center_f, cap_f + mean_slack + ACCEPT_TOL
        )
        if fv is None:
            return BmipResult(False, -math.inf, None, None, None, None, thresholds, False)

    accept = best_val >= rho_target - corr_slack - ACCEPT_TOL
    mode = "enumeration" if pairs <= work_cap else "branch_and_bound"
    return BmipResult(
        accept,
        float(best_val),
        fv.copy(),
        gv.copy(),
        float(fv @ wa),
        float(gv @ wb),
        thresholds,
        True,
        mode,
    )


def _bnb_f_search(W, wa, grid, G_feas, center_f, mean_window):
    """Depth-first search over f assignments with box-bound pruning.

    The g side is pre-filtered and fully vectorized at each leaf; pruning
    uses the mean-feasibility interval and the bilinear bound with the g
    mean constraint dropped.
    """
    ka, kb = W.shape
    vmax = float(np.abs(grid).max())
    gmax = float(np.abs(G_feas).max()) if len(G_feas) else 0.0
    # suffix sums of W rows and marginal weights, for bounds on unassigned coords
    suffix_W = np.vstack([W[i:].sum(axis=0) for i in range(ka)] + [np.zeros(kb)])
    suffix_wa = np.concatenate([np.cumsum(wa[::-1])[::-1], [0.0]])

    best = {"val": -math.inf, "f": None, "g": None}
    f_partial = np.zeros(ka)

    def recurse(i, w_vec, mean_acc):
        free_mean = vmax * suffix_wa[i]
        if abs(mean_acc - center_f) > mean_window + free_mean:
            return
        w_lo = w_vec - vmax * suffix_W[i]
        w_hi = w_vec + vmax * suffix_W[i]
        ub = gmax * np.maximum(np.abs(w_lo), np.abs(w_hi)).sum()
        if ub <= best["val"]:
            return
        if i == ka:
            if abs(mean_acc - center_f) > mean_window:
                return
            vals = G_feas @ w_vec
            j = int(np.argmax(vals))
            if vals[j] > best["val"]:
                best["val"] = float(vals[j])
                best["f"] = f_partial.copy()
                best["g"] = G_feas[j].copy()
            return
        for v in grid:
            f_partial[i] = v
            recurse(i + 1, w_vec + v * W[i], mean_acc + v * wa[i])
        f_partial[i] = 0.0

    recurse(0, np.zeros(kb), 0.0)
    return best["val"], best["f"], best["g"]


# -- independent oracle ------------------------------------------------------------


@dataclass(frozen=True)
class OracleResult:
    value: float
    f_values: np.ndarray
    g_values: np.ndarray
    upper_bound: float
    heuristic: bool = True


def _box_lp_max(w: np.ndarray, m: np.ndarray, cap: float, center: float = 0.0):
    """Maximize w.g over the box [-1,1]^k with |m.g - center| <= cap."""
    from scipy.optimize import linprog

    k = len(w)
    res = linprog(
        -w,
        A_ub=np.vstack([m, -m]),
        b_ub=np.array([center + cap, cap - center]),
        bounds=[(-1.0, 1.0)] * k,
        method="highs",
    )
    if not res.success:
        raise NisimError(f"box LP failed: {res.message}")
    return res.x, float(w @ res.x)


def oracle_max_balanced_ip(
    dist: JointDistribution,
    n: int,
    mean_caps: tuple[float, float],
    mean_centers: tuple[float, float] = (0.0, 0.0),
    n_random_starts: int = 32,
    seed=0,
    vertex_start_cap: int = 12,
    max_rounds: int = 60,
) -> OracleResult:
    """Alternating maximization of E[f g] over [-1,1]-valued pairs with capped means.

    With one side fixed the other side is an exact box LP; alternation from
    random and vertex starts certifies a lower bound only (flagged
    heuristic), reported with a rigorous upper bound.
    """
    W, wa, wb = _tensor_weights(dist, n)
    ka, kb = W.shape
    if ka > 64 or kb > 64:
        raise ResourceLimitError(f"oracle supports at most 64 variables per side, got {ka}x{kb}")
    cap_f, cap_g = mean_caps
    center_f, center_g = mean_centers
    rng = np.random.default_rng(seed)

    starts = []
    if 2**ka <= 2**vertex_start_cap:
        vertices = all_assignments(2, ka) * 2.0 - 1.0
        starts.extend(vertices)
    starts.extend(rng.uniform(-1.0, 1.0, size=(n_random_starts, ka)))

    best_val = -math.inf
    best_f = np.zeros(ka)
    best_g = np.zeros(kb)
    for f0 in starts:
        f = f0.astype(float)
        val = -math.inf
        for _ in range(max_rounds):
            g, _ = _box_lp_max(f @ W, wb, cap_g, center_g)
            f, _ = _box_lp_max(W @ g, wa, cap_f, center_f)
            new_val = float(f @ W @ g)
            if new_val <= val + 1e-12:
                val = max(val, new_val)
                break
            val = new_val
        if val > best_val + 1e-12:
            best_val, best_f, best_g = val, f.copy(), g.copy()

    rho0 = maximal_correlation(dist).rho
    win_a = (max(-1.0, center_f - cap_f), min(1.0, center_f + cap_f))
    win_b = (max(-1.0, center_g - cap_g), min(1.0, center_g + cap_g))
    upper = _correlation_ceiling(rho0, win_a, win_b)
    if 2**ka <= 2**vertex_start_cap:
        vert_ub = -math.inf
        for f_v in all_assignments(2, ka) * 2.0 - 1.0:
            _, v = _box_lp_max(f_v @ W, wb, cap_g, center_g)
            vert_ub = max(vert_ub, v)
        upper = min(upper, vert_ub)
    return OracleResult(best_val, best_f, best_g, float(upper), heuristic=True)


# -- randomized rounding -------------------------------------------------------------


class RngRoundedStrategy(Strategy):
    """+-1 strategy rounding a [-1,1]-valued one with an explicit seeded RNG.

    E[output | x] = f(x).  The generator is owned by the instance, so the
    outputs are deterministic for a fixed construction seed and call
    sequence.
    """

    is_randomized = True

    def __init__(self, base: Strategy, seed=0):
        self.base = base
        self.space = base.space
        self.n = base.n
        self._rng = np.random.default_rng(seed)

    def evaluate(self, idx: np.ndarray) -> np.ndarray:
        v = np.clip(self.base.evaluate(idx), -1.0, 1.0)
        u = self._rng.random(v.shape[0])
        return np.where(u < (1.0 + v) / 2.0, 1.0, -1.0)


class SourceRoundedStrategy(Strategy):
    """+-1 strategy rounding f with coins extracted from extra source coordinates.

    The strategy reads n + 2k coordinates; its own coin block is either the
    first or second k extras, so a pair using opposite blocks has exactly
    independent coins.  The extracted coin is the product-measure CDF of
    the block, uniform to within resolution (max atom prob)^k.
    """

    def __init__(self, base: Strategy, k_extra: int, block: str = "first"):
        if k_extra < 1:
            raise ParameterRangeError("need at least one extra coordinate")
        if block not in ("first", "second"):
            raise InputError("block must be 'first' or 'second'")
        self.base = base
        self.space = base.space
        self.k_extra = k_extra
        self.block = block
        self.n = base.n + 2 * k_extra
        p = base.space.probs
        self.resolution = float(p.max()) ** k_extra
        self._cum = np.concatenate([[0.0], np.cumsum(p)[:-1]])

    def coin(self, extra_idx: np.ndarray) -> np.ndarray:
        u = np.zeros(extra_idx.shape[0])
        scale = np.ones(extra_idx.shape[0])
        p = self.space.probs
        for j in range(self.k_extra):
            col = extra_idx[:, j]
            u = u + self._cum[col] * scale
            scale = scale * p[col]
        return u + 0.5 * scale

    def evaluate(self, idx: np.ndarray) -> np.ndarray:
        idx = self._check_idx(idx)
        nb = self.base.n
        v = np.clip(self.base.evaluate(idx[:, :nb]), -1.0, 1.0)
        lo = nb if self.block == "first" else nb + self.k_extra
        u = self.coin(idx[:, lo : lo + self.k_extra])
        return np.where(u < (1.0 + v) / 2.0, 1.0, -1.0)


def randomized_round(
    f: Strategy,
    seed=0,
    mode: str = "rng",
    extra_coords: int = 0,
    block: str = "first",
    resolution: float = 1e-6,
) -> Strategy:
    """Round a [-1,1]-valued strategy to +-1 with E[output | x] = f(x).

    ``mode="rng"`` uses an explicit seeded generator.  ``mode="source"``
    consumes ``extra_coords`` designated extra source coordinates per coin
    block (the strategy then reads n + 2*extra_coords coordinates and uses
    the first or second block); raises when the block cannot reach the
    requested coin resolution, reporting what is achievable.
    """
    if mode == "rng":
        return RngRoundedStrategy(f, seed)
    if mode != "source":
        raise InputError(f"unknown mode {mode!r}; use 'rng' or 'source'")
    strat = SourceRoundedStrategy(f, extra_coords, block)
    if strat.resolution > resolution:
        raise ParameterRangeError(
            f"{extra_coords} extra coordinates reach coin resolution "
            f"{strat.resolution:.3g}, coarser than the requested {resolution:.3g}"
        )
    return strat


def round_pair(f: Strategy, g: Strategy, mode: str = "rng", seed=0, extra_coords: int = 0,
               resolution: float = 1e-6) -> tuple[Strategy, Strategy]:
    """Round both parties with independent coins (disjoint seeds or blocks)."""
    if mode == "rng":
        ss = np.random.SeedSequence(seed).spawn(2)
        return RngRoundedStrategy(f, ss[0]), RngRoundedStrategy(g, ss[1])
    return (
        randomized_round(f, mode="source", extra_coords=extra_coords,
                         block="first", resolution=resolution),
        randomized_round(g, mode="source", extra_coords=extra_coords,
                         block="second", resolution=resolution),
    )


# -- gap decisions ---------------------------------------------------------------


def _correlation_ceiling(rho0: float, win_a: tuple[float, float], win_b: tuple[float, float]) -> float:
    """Rigorous upper bound on E[fg] when the means are confined to windows."""
    corners = [a * b for a in win_a for b in win_b]
    a_min = 0.0 if win_a[0] <= 0.0 <= win_a[1] else min(abs(win_a[0]), abs(win_a[1]))
    b_min = 0.0 if win_b[0] <= 0.0 <= win_b[1] else min(abs(win_b[0]), abs(win_b[1]))
    return max(corners) + rho0 * math.sqrt((1 - a_min**2) * (1 - b_min**2))


def _calibrate_pair(
    fv: np.ndarray,
    gv: np.ndarray,
    dist: JointDistribution,
    n: int,
    centers: tuple[float, float],
    target_corr: float,
) -> tuple[np.ndarray, np.ndarray]:
    """Blend the pair toward the constant-mean pair until E[fg] <= target_corr.

    Blending f -> a f + (1-a) c_f (same a on both sides) moves the
    correlation continuously from the search value down to c_f * c_g, so a
    root exists whenever the search overshot; means only tighten.
    """
    W, wa, wb = _tensor_weights(dist, n)
    cu, cv = centers
    C = float(fv @ W @ gv)
    if C <= target_corr:
        return fv, gv
    ef, eg = float(fv @ wa), float(gv @ wb)
    A = C - cu * eg - cv * ef + cu * cv
    B = cu * eg + cv * ef - 2.0 * cu * cv
    Cc = cu * cv - target_corr
    roots = np.roots([A, B, Cc]) if abs(A) > 1e-15 else (
        np.array([-Cc / B]) if abs(B) > 1e-15 else np.array([])
    )
    candidates = [float(r.real) for r in np.atleast_1d(roots)
                  if abs(r.imag) < 1e-12 and -1e-12 <= r.real <= 1.0 + 1e-12]
    if not candidates:
        return fv, gv
    a = min(1.0, max(0.0, max(candidates)))
    return a * fv + (1 - a) * cu, a * gv + (1 - a) * cv


def _snap_to_grid(values: np.ndarray, grid: np.ndarray) -> np.ndarray:
    """Nearest grid value, ties toward the lower one (deterministic)."""
    gs = np.sort(np.asarray(grid, dtype=float))
    pos = np.clip(np.searchsorted(gs, values), 1, len(gs) - 1)
    lo, hi = gs[pos - 1], gs[pos]
    return np.where(values - lo <= hi - values, lo, hi)


def _oracle_probe(
    dist, n, rho_target, delta, mean_caps, grid, centers, mean_slack, corr_slack, seed=0
) -> BmipResult:
    """Cap-limited fallback: snap the alternating oracle's witness to the grid.

    An ACCEPT from the probe is fully verified (grid-valued witness,
    thresholds re-checked exactly); a non-accept carries no guarantee
    beyond the depths the oracle explored.
    """
    if grid is None:
        grid = discretize_range(delta)
    oracle = oracle_max_balanced_ip(dist, n, mean_caps, centers, seed=seed)
    W, wa, wb = _tensor_weights(dist, n)
    fv = _snap_to_grid(oracle.f_values, grid)
    gv = _snap_to_grid(oracle.g_values, grid)
    mean_f, mean_g = float(fv @ wa), float(gv @ wb)
    corr = float(fv @ W @ gv)
    cap_f, cap_g = mean_caps
    feasible = (
        abs(mean_f - centers[0]) <= cap_f + mean_slack + ACCEPT_TOL
        and abs(mean_g - centers[1]) <= cap_g + mean_slack + ACCEPT_TOL
    )
    thresholds = {
        "rho_target": rho_target,
        "corr_slack": corr_slack,
        "mean_cap_f": cap_f,
        "mean_cap_g": cap_g,
        "mean_center_f": centers[0],
        "mean_center_g": centers[1],
        "mean_slack": mean_slack,
        "grid_size": int(len(grid)),
        "accept_floor": rho_target - corr_slack,
        "oracle_upper_bound": oracle.upper_bound,
    }
    if not feasible:
        return BmipResult(
            False, -math.inf, None, None, None, None, thresholds, False, "oracle_probe"
        )
    accept = corr >= rho_target - corr_slack - ACCEPT_TOL
    return BmipResult(
        accept, corr, fv, gv, mean_f, mean_g, thresholds, True, "oracle_probe"
    )


def _search_one_level(
    dist, n, rho_target, delta, mean_caps, grid, centers,
    mean_slack, corr_slack, work_cap, branch_and_bound,
) -> BmipResult:
    """Full grid search when it fits the caps, oracle probe otherwise."""
    try:
        return brute_force_bmip(
            dist, n, rho_target, delta, mean_caps,
            grid=grid, mean_centers=centers, mean_slack=mean_slack,
            corr_slack=corr_slack, work_cap=work_cap,
            branch_and_bound=branch_and_bound,
        )
    except ResourceLimitError:
        return _oracle_probe(
            dist, n, rho_target, delta, mean_caps, grid, centers,
            mean_slack, corr_slack,
        )


def _search_thresholds(delta: float) -> dict:
    return {
        "mean_cap": 8.0 * delta / 3.0,
        "mean_slack": delta * delta / 5.0,
        "corr_margin": 3.0 * delta,
        "corr_slack": delta * delta / 4.0,
    }


def _n0_report(dist: JointDistribution, delta: float, constants: ChainConstants) -> dict:
    try:
        return n0_chain(dist, delta, constants).as_dict()
    except (ParameterRangeError, InputError) as exc:
        return {"error": str(exc)}


def _verify_accept(
    fv, gv, dist, n, thresholds, centers, accept_floor_value
) -> tuple[TableStrategy, TableStrategy, dict]:
    """Re-evaluate a witness exactly and hard-assert it meets its thresholds."""
    f = TableStrategy(dist.row_space, n, fv)
    g = TableStrategy(dist.col_space, n, gv)
    stats = estimate_strategy_stats(f, g, dist, mode="exact")
    cap = thresholds["mean_cap"] + thresholds["mean_slack"]
    if abs(stats.mean_f - centers[0]) > cap + 1e-9 or abs(stats.mean_g - centers[1]) > cap + 1e-9:
        raise AssertionError("accepted witness violates its mean caps on re-evaluation")
    if stats.corr_fg < accept_floor_value - 1e-9:
        raise AssertionError("accepted witness violates its correlation floor on re-evaluation")
    achieved = {"mean_f": stats.mean_f, "mean_g": stats.mean_g, "corr_fg": stats.corr_fg}
    return f, g, achieved




def decide_gap_nis(
    dist: JointDistribution,
    rho: float,
    delta: float,
    n_search: int,
    constants: ChainConstants | None = None,
    grid: np.ndarray | None = None,
    work_cap: int = DEFAULT_WORK_CAP,
    branch_and_bound: bool = False,
    report_n0: bool = False,
) -> Verdict:
    """Decide whether the source can reach a balanced target correlation rho.

    ACCEPT verdicts carry an exactly re-verified witness pair, calibrated so
    randomized rounding lands within total variation 8*delta of the target.
    A REJECT is sound when the maximal-correlation ceiling rules out every
    n; otherwise it is a bounded-depth rejection, labeled as such, since
    the guarantee of the parameter chain applies only at n = n0.
    """
    if constants is None:
        constants = ChainConstants()
    if not 0.0 <= rho <= 1.0:
        raise ParameterRangeError(f"target correlation must lie in [0, 1], got {rho}")
    if not 0.0 < delta < 1.0:
        raise ParameterRangeError(f"gap budget must lie in (0, 1), got {delta}")
    if n_search < 1:
        raise ParameterRangeError(f"search depth must be positive, got {n_search}")
    th = _search_thresholds(delta)
    cap = th["mean_cap"] + th["mean_slack"]
    accept_floor = rho - th["corr_margin"] - th["corr_slack"]
    rho0 = maximal_correlation(dist).rho

    ceiling = _correlation_ceiling(rho0, (-cap, cap), (-cap, cap))
    thresholds = dict(th, rho_target=rho, accept_floor=accept_floor, ceiling=ceiling)
    if ceiling < accept_floor - ACCEPT_TOL:
        return Verdict(
            decision="REJECT",
            sound=True,
            reason="maximal-correlation-ceiling",
            thresholds=thresholds,
            caveat=(
                f"sound at every n: any pair with means within {cap:.6g} has "
                f"E[fg] <= {ceiling:.6g} < {accept_floor:.6g}"
            ),
            n0_report=_n0_report(dist, delta, constants) if report_n0 else None,
        )

    probe_used = False
    for n in range(1, n_search + 1):
        result = _search_one_level(
            dist, n, rho - th["corr_margin"], delta,
            (th["mean_cap"], th["mean_cap"]), grid, (0.0, 0.0),
            th["mean_slack"], th["corr_slack"], work_cap, branch_and_bound,
        )
        probe_used = probe_used or result.mode == "oracle_probe"
        if result.accept:
            fv, gv = _calibrate_pair(
                result.f_values, result.g_values, dist, n, (0.0, 0.0), rho
            )
            f, g, achieved = _verify_accept(
                fv, gv, dist, n, th, (0.0, 0.0), min(result.best_value, rho) - 1e-9
            )
            return Verdict(
                decision="ACCEPT",
                sound=True,
                reason="witness-found",
                thresholds=dict(thresholds, search_mode=result.mode),
                n_used=n,
                witness_f=f,
                witness_g=g,
                achieved=achieved,
                search_max=result.best_value,
                n0_report=_n0_report(dist, delta, constants) if report_n0 else None,
            )

    caveat = (
        f"bounded-depth rejection: searched n <= {n_search}; "
        "the rejection guarantee requires searching n = n0"
    )
    if probe_used:
        caveat += " (grid exceeded the work cap at some depths; oracle probe only)"
    return Verdict(
        decision="REJECT",
        sound=False,
        reason="bounded-depth",
        thresholds=thresholds,
        caveat=caveat,
        n_used=n_search,
        n0_report=_n0_report(dist, delta, constants) if report_n0 else None,
    )


def decide_2x2(
    dist: JointDistribution,
    target: Target2x2,
    delta: float,
    n_search: int,
    constants: ChainConstants | None = None,
    grid: np.ndarray | None = None,
    work_cap: int = DEFAULT_WORK_CAP,
    branch_and_bound: bool = False,
    report_n0: bool = False,
) -> Verdict:
    """Decide reachability of an arbitrary 2x2 binary target.

    Case I (E[UV] >= E[U]E[V]) maximizes the correlation with both means
    pinned near the target's; Case II runs the same machinery with the
    second party negated (the antipodal threshold form) and flips the
    returned witness back.
    """
    if constants is None:
        constants = ChainConstants()
    if not 0.0 < delta < 1.0:
        raise ParameterRangeError(f"gap budget must lie in (0, 1), got {delta}")
    if n_search < 1:
        raise ParameterRangeError(f"search depth must be positive, got {n_search}")
    eu, ev, euv = target.mean_u, target.mean_v, target.corr_uv
    case = target.case
    flip = case == "II"
    centers = (eu, -ev if flip else ev)
    rho_t = -euv if flip else euv

    th = _search_thresholds(delta)
    cap = th["mean_cap"] + th["mean_slack"]
    accept_floor = rho_t - th["corr_margin"] - th["corr_slack"]
    rho0 = maximal_correlation(dist).rho
    win_a = (max(-1.0, centers[0] - cap), min(1.0, centers[0] + cap))
    win_b = (max(-1.0, centers[1] - cap), min(1.0, centers[1] + cap))
    ceiling = _correlation_ceiling(rho0, win_a, win_b)
    thresholds = dict(
        th, target=target.as_dict(), case=case, accept_floor=accept_floor, ceiling=ceiling
    )

    if ceiling < accept_floor - ACCEPT_TOL:
        return Verdict(
            decision="REJECT",
            sound=True,
            reason="maximal-correlation-ceiling",
            thresholds=thresholds,
            caveat=(
                f"sound at every n (case {case}): means near the target admit "
                f"at most E[fg] = {ceiling:.6g} < {accept_floor:.6g}"
            ),
            n0_report=_n0_report(dist, delta, constants) if report_n0 else None,
        )

    probe_used = False
    for n in range(1, n_search + 1):
        result = _search_one_level(
            dist, n, rho_t - th["corr_margin"], delta,
            (th["mean_cap"], th["mean_cap"]), grid, centers,
            th["mean_slack"], th["corr_slack"], work_cap, branch_and_bound,
        )
        probe_used = probe_used or result.mode == "oracle_probe"
        if result.accept:
            fv, gv = _calibrate_pair(
                result.f_values, result.g_values, dist, n, centers, rho_t
            )
            f, g, achieved = _verify_accept(
                fv, gv, dist, n, th, centers, min(result.best_value, rho_t) - 1e-9
            )
            if flip:
                g = TableStrategy(dist.col_space, n, -g.values)
                achieved = {
                    "mean_f": achieved["mean_f"],
                    "mean_g": -achieved["mean_g"],
                    "corr_fg": -achieved["corr_fg"],
                }
            return Verdict(
                decision="ACCEPT",
                sound=True,
                reason="witness-found",
                thresholds=dict(thresholds, search_mode=result.mode),
                n_used=n,
                witness_f=f,
                witness_g=g,
                achieved=achieved,
                search_max=(-result.best_value if flip else result.best_value),
                n0_report=_n0_report(dist, delta, constants) if report_n0 else None,
            )

    caveat = (
        f"bounded-depth rejection (case {case}): searched n <= {n_search}; "
        "the rejection guarantee requires searching n = n0"
    )
    if probe_used:
        caveat += " (grid exceeded the work cap at some depths; oracle probe only)"
    return Verdict(
        decision="REJECT",
        sound=False,
        reason="bounded-depth",
        thresholds=thresholds,
        caveat=caveat,
        n_used=n_search,
        n0_report=_n0_report(dist, delta, constants) if report_n0 else None,
    )
