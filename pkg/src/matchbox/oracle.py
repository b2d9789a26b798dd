"""Brute-force value iteration over the transition possibility set.

Only the economy primitives are used here: the reduced-form utility and
the bounds of Omega. V is carried on a uniform grid on [0, x_max] and
interpolated linearly. Because u(x, .) is the minimum of two affine maps
of x', the candidate set {grid nodes in Gamma(x)} + {both ends of Gamma(x)}
+ {kink of u} contains a maximizer of the interpolated problem.

The per-node maximum over grid nodes is a pair of range-maximum queries
(one on each side of the kink) answered with a sparse table, so a sweep
costs O(n log n) and is fully vectorized. Every sweep reads only the
previous iterate, so results do not depend on evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import model
from .errors import ConvergenceError, RegimeError, ValidationError
from .model import Economy


@dataclass(frozen=True)
class OracleConfig:
    x_max: float
    n_grid: int = 4001
    tol_vi: float = 1e-10
    max_iter: int = 20000

    def __post_init__(self):
        if not (np.isfinite(self.x_max) and self.x_max > 0):
            raise ValidationError("x_max", "must be finite and > 0")
        if int(self.n_grid) != self.n_grid or self.n_grid < 101:
            raise ValidationError("n_grid", "must be an integer >= 101")
        if not self.tol_vi > 0:
            raise ValidationError("tol_vi", "must be > 0")
        if int(self.max_iter) != self.max_iter or self.max_iter < 1:
            raise ValidationError("max_iter", "must be an integer >= 1")

    @classmethod
    def for_economy(cls, e: Economy, n_grid: int = 4001, tol_vi: float = 1e-10,
                    max_iter: int = 20000, factor: float = 2.0) -> "OracleConfig":
        return cls(factor * required_span(e), n_grid, tol_vi, max_iter)


def required_span(e: Economy) -> float:
    """Largest stock the characterized policies need to see on the grid."""
    marks = [e.a_C, e.a_I]
    if e.d < 1:
        marks.append(e.a_C / (1 - e.d))
    if e.b + e.d * (e.a_C - e.a_I) > 0:
        marks.append(model.golden_stock(e))
    return max(marks)


@dataclass
class OracleResult:
    grid: np.ndarray
    value: np.ndarray
    policy: np.ndarray
    iterations: int
    final_delta: float
    deltas: list = field(default_factory=list)
    boundary_hits: int = 0

    @property
    def cell(self) -> float:
        return float(self.grid[1] - self.grid[0])


class _RangeMax:
    """Sparse table answering max/argmax over index ranges [lo, hi]."""

    def __init__(self, values: np.ndarray):
        self.vals = [values]
        self.args = [np.arange(values.size)]
        span = 1
        while 2 * span <= values.size:
            v, a = self.vals[-1], self.args[-1]
            left, right = v[:-span], v[span:]
            take_right = right > left
            self.vals.append(np.where(take_right, right, left))
            self.args.append(np.where(take_right, a[span:], a[:-span]))
            span *= 2

    def query(self, lo: np.ndarray, hi: np.ndarray):
        out_v = np.full(lo.shape, -np.inf)
        out_a = np.zeros(lo.shape, dtype=int)
        ok = hi >= lo
        if not np.any(ok):
            return out_v, out_a
        l, h = lo[ok], hi[ok]
        level = np.floor(np.log2(h - l + 1)).astype(int)
        v1 = np.empty(l.size)
        v2 = np.empty(l.size)
        a1 = np.empty(l.size, dtype=int)
        a2 = np.empty(l.size, dtype=int)
        for k in np.unique(level):
            m = level == k
            r = h[m] - (1 << k) + 1
            v1[m], a1[m] = self.vals[k][l[m]], self.args[k][l[m]]
            v2[m], a2[m] = self.vals[k][r], self.args[k][r]
        take_right = v2 > v1
        out_v[ok] = np.where(take_right, v2, v1)
        out_a[ok] = np.where(take_right, a2, a1)
        return out_v, out_a


class _Bellman:
    """Precomputed action sets for one economy on one grid."""

    def __init__(self, e: Economy, grid: np.ndarray):
        self.e, self.grid = e, grid
        x_max = grid[-1]
        lo, hi = model.transition_bounds(e, grid)
        self.hi_raw = hi
        self.lo, self.hi = lo, np.minimum(hi, x_max)
        c_cap, s_cap, c_lab, s_lab = model.constraint_lines(e, grid)
        k = model.kink(e, grid)
        if k is None or s_cap == s_lab:
            # parallel constraints: u = min(c) - s x' everywhere
            self.kink = np.full(grid.shape, np.inf)
            self.s_below = self.s_above = s_cap
            self.c_below = self.c_above = np.minimum(c_cap, c_lab)
        else:
            self.kink = k
            # left of the crossing the flatter line binds, right of it the steeper one
            if s_cap < s_lab:
                self.s_below, self.c_below, self.s_above, self.c_above = s_cap, c_cap, s_lab, c_lab
            else:
                self.s_below, self.c_below, self.s_above, self.c_above = s_lab, c_lab, s_cap, c_cap
        self.j_lo = np.searchsorted(grid, self.lo, side="left")
        self.j_hi = np.searchsorted(grid, self.hi, side="right") - 1
        j_k = np.searchsorted(grid, self.kink, side="right") - 1
        self.below = (self.j_lo, np.minimum(j_k, self.j_hi))
        self.above = (np.maximum(j_k + 1, self.j_lo), self.j_hi)
        inside = (self.kink >= self.lo) & (self.kink <= self.hi)
        self.exact = [self.lo, self.hi, np.where(inside, self.kink, self.lo)]
        self.u_exact = [model.utility(e, grid, c) for c in self.exact]

    def step(self, v: np.ndarray):
        delta, grid = self.e.delta, self.grid
        best_v = np.full(grid.shape, -np.inf)
        best_x = np.zeros(grid.shape)
        for s, c, (lo, hi) in ((self.s_below, self.c_below, self.below),
                                (self.s_above, self.c_above, self.above)):
            table = _RangeMax(delta * v - s * grid)
            val, arg = table.query(lo, hi)
            val = val + c
            better = val > best_v
            best_v = np.where(better, val, best_v)
            best_x = np.where(better, grid[arg], best_x)
        for cand, u in zip(self.exact, self.u_exact):
            val = u + delta * np.interp(cand, grid, v)
            better = val > best_v
            best_v = np.where(better, val, best_v)
            best_x = np.where(better, cand, best_x)
        return best_v, best_x


def value_iteration(e: Economy, cfg: OracleConfig) -> OracleResult:
    """Jacobi value iteration from V = 0 until the sup-norm change is <= tol_vi."""
    need = 1.5 * required_span(e)
    if cfg.x_max < need * (1 - 1e-12):
        raise ValidationError("x_max", f"must be >= {need!r} for this economy")
    grid = np.linspace(0.0, cfg.x_max, int(cfg.n_grid))
    op = _Bellman(e, grid)
    v = np.zeros_like(grid)
    deltas = []
    for it in range(1, int(cfg.max_iter) + 1):
        new_v, pol = op.step(v)
        change = float(np.max(np.abs(new_v - v)))
        deltas.append(change)
        v = new_v
        if change <= cfg.tol_vi:
            break
    else:
        raise ConvergenceError(
            f"value iteration stopped after {cfg.max_iter} sweeps with change {deltas[-1]!r}"
        )
    hits = int(np.sum((pol >= grid[-1]) & (op.hi_raw > grid[-1])))
    return OracleResult(grid, v, pol, it, deltas[-1], deltas, hits)


def stationarity_check(e: Economy, o: OracleResult) -> bool:
    """Whether the oracle keeps the golden-rule stock in place (delta-normal economies only)."""
    if not model.is_delta_normal(e):
        raise RegimeError("stationarity check needs delta > 1/theta")
    xhat = model.golden_stock(e)
    i = int(np.argmin(np.abs(o.grid - xhat)))
    return bool(abs(o.policy[i] - xhat) <= o.cell * (1 + 1e-9))
