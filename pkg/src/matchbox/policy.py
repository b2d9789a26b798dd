"""Closed-form optimal policies and value functions.

A policy is stored as a list of pieces over half-open capital intervals
(lo, hi]; on each piece the optimal next-period stocks form the interval
[lower(x), upper(x)] with ``lower`` and ``upper`` affine. Function-valued
policies have lower == upper on every piece. Correspondences whose bounds
are a min/max of affine maps are split at the crossing points so that each
stored piece carries a single affine map per side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import model
from .errors import InfeasibleError, UnsupportedRegimeError
from .model import Economy
from .thresholds import Regime, classify, x_n

SELECTIONS = ("upper", "lower", "turnpike")


@dataclass(frozen=True)
class Affine:
    alpha: float
    beta: float

    def __call__(self, x):
        return self.alpha + self.beta * x


@dataclass(frozen=True)
class Piece:
    lo: float
    hi: float
    lower: Affine
    upper: Affine


@dataclass(frozen=True)
class PolicyCorrespondence:
    pieces: tuple
    selection_default: str = "upper"
    source: str = ""

    @property
    def is_function(self) -> bool:
        return all(p.lower == p.upper for p in self.pieces)

    def _index(self, x):
        his = np.array([p.hi for p in self.pieces])
        return np.searchsorted(his, x, side="left")

    def bounds(self, xs):
        """Vectorized ``policy_eval``: arrays of lower and upper optimal next stocks."""
        xs = np.asarray(xs, dtype=float)
        idx = self._index(xs)
        lo = np.empty_like(xs)
        hi = np.empty_like(xs)
        for k, piece in enumerate(self.pieces):
            mask = idx == k
            if np.any(mask):
                lo[mask] = piece.lower(xs[mask])
                hi[mask] = piece.upper(xs[mask])
        return lo, hi

    def select(self, x: float, rule: Optional[str] = None) -> float:
        rule = rule or self.selection_default
        if rule == "turnpike":
            if self.source != "knife-edge-inv-theta-investment":
                raise ValueError("the turnpike selection exists only for the 1/theta knife edge with a_C < a_I")
            rule = "upper"
        lo, hi = policy_eval(self, x)
        if rule == "upper":
            return hi
        if rule == "lower":
            return lo
        raise ValueError(f"unknown selection rule {rule!r}; expected one of {SELECTIONS}")


def policy_eval(p: PolicyCorrespondence, x: float):
    """Interval of optimal next-period stocks at ``x > 0``."""
    if not x > 0:
        raise ValueError("policy_eval needs x > 0")
    piece = p.pieces[int(p._index(x))]
    return float(piece.lower(x)), float(piece.upper(x))


def _probe(a, c):
    return a + 1.0 if math.isinf(c) else 0.5 * (a + c)


def _crossings(maps, lo, hi):
    cuts = []
    for i, f in enumerate(maps):
        for g in maps[i + 1 :]:
            if f.beta != g.beta:
                xc = (g.alpha - f.alpha) / (f.beta - g.beta)
                if lo < xc < hi:
                    cuts.append(xc)
    return cuts


def _envelope_pieces(lo, hi, lowers, uppers, lower_op=max, upper_op=min):
    """Split (lo, hi] so that the lower/upper envelopes are single affine maps."""
    cuts = sorted(set(_crossings(lowers, lo, hi) + _crossings(uppers, lo, hi)))
    edges = [lo] + cuts + [hi]
    out = []
    for a, c in zip(edges[:-1], edges[1:]):
        x = _probe(a, c)
        lower = lower_op(lowers, key=lambda f: f(x))
        upper = upper_op(uppers, key=lambda f: f(x))
        if out and out[-1].lower == lower and out[-1].upper == upper:
            out[-1] = Piece(out[-1].lo, c, lower, upper)
        else:
            out.append(Piece(a, c, lower, upper))
    return out


def _single(lo, hi, f):
    return [Piece(lo, hi, f, f)]


def _const(c):
    return Affine(c, 0.0)


def _lines(e: Economy):
    od = Affine(0.0, 1 - e.d)
    mv = None
    z = model.zeta(e)
    if z is not None:
        mv = Affine(e.a_C * e.b / (e.a_C - e.a_I), -z)
    return od, mv


def _investment_policy(e: Economy, n: int) -> list:
    od, mv = _lines(e)
    xn, xprev = x_n(e, n), x_n(e, n - 1)
    pieces = _single(0.0, e.a_C, od) + _single(e.a_C, xn, mv)
    if e.circulating:
        return pieces + _single(xn, math.inf, _const(xprev))
    dep = 1 - e.d
    return pieces + _single(xn, xprev / dep, _const(xprev)) + _single(xprev / dep, math.inf, od)


def _knife_mu_policy(e: Economy, n: int) -> list:
    od, mv = _lines(e)
    dep = 1 - e.d
    if n == 0:
        x1 = x_n(e, 1)
        pieces = _single(0.0, e.a_C, od) + _envelope_pieces(e.a_C, x1, [od], [mv])
        if e.circulating:
            return pieces + _envelope_pieces(x1, math.inf, [od], [_const(e.a_C)])
        return (
            pieces
            + _envelope_pieces(x1, e.a_C / dep, [od], [_const(e.a_C)])
            + _single(e.a_C / dep, math.inf, od)
        )
    xn, xprev = x_n(e, n), x_n(e, n - 1)
    pieces = _single(0.0, e.a_C, od) + _single(e.a_C, xn, mv)
    if e.circulating:
        xnext = x_n(e, n + 1)
        return (
            pieces
            + _envelope_pieces(xn, xnext, [_const(xprev)], [mv])
            + _envelope_pieces(xnext, math.inf, [_const(xprev)], [_const(xn)])
        )
    return (
        pieces
        + _envelope_pieces(xn, xprev / dep, [_const(xprev)], [mv, _const(xn)])
        + _envelope_pieces(xprev / dep, xn / dep, [od], [mv, _const(xn)])
        + _single(xn / dep, math.inf, od)
    )


def _knife_inv_theta_policy(e: Economy):
    od, mv = _lines(e)
    t = model.theta(e)
    zoom = Affine(0.0, t)
    if e.a_C > e.a_I:
        pieces = (
            _envelope_pieces(0.0, e.a_I, [od], [_const(e.a_C), zoom])
            + _envelope_pieces(e.a_I, e.a_C, [od], [_const(e.a_C), mv])
            + _single(e.a_C, math.inf, od)
        )
        return pieces, "knife-edge-inv-theta-consumption"
    if e.a_C == e.a_I:
        pieces = _envelope_pieces(0.0, e.a_C, [od], [_const(e.a_C), zoom]) + _envelope_pieces(
            e.a_C, math.inf, [od], [_const(e.a_C), od], upper_op=max
        )
        return pieces, "knife-edge-inv-theta-one-sector"
    xhat = model.golden_stock(e)
    pieces = (
        _envelope_pieces(0.0, xhat / t, [od, mv], [zoom])
        + _envelope_pieces(xhat / t, xhat, [od, mv], [_const(xhat)])
        + _envelope_pieces(xhat, math.inf, [_const(xhat), od], [_const(xhat), od], upper_op=max)
    )
    return pieces, "knife-edge-inv-theta-investment"


def optimal_policy(e: Economy, regime: Optional[Regime] = None) -> PolicyCorrespondence:
    """Closed-form optimal policy (function or correspondence) for a characterized regime."""
    regime = regime or classify(e)
    od, _ = _lines(e)
    kind = regime.kind
    if kind == "DeltaNormal":
        raise UnsupportedRegimeError("delta > 1/theta is outside the characterized regimes")
    if kind in ("ExtinctionNoInvestment", "UnsustainableNoInvestment", "OneSector"):
        return PolicyCorrespondence(tuple(_single(0.0, math.inf, od)), source="consumption-only")
    if kind == "ExtinctionWithInvestment":
        return PolicyCorrespondence(tuple(_investment_policy(e, regime.n)), source="investment")
    if kind == "KnifeEdgeMu":
        return PolicyCorrespondence(tuple(_knife_mu_policy(e, regime.n)), source="knife-edge-mu")
    if kind == "KnifeEdgeInvTheta":
        pieces, source = _knife_inv_theta_policy(e)
        return PolicyCorrespondence(tuple(pieces), source=source)
    raise UnsupportedRegimeError(f"no policy for regime {kind}")


def _steps_down(x, ceiling, dep):
    """Smallest m >= 0 with dep**m * x <= ceiling, elementwise."""
    m = np.zeros(x.shape, dtype=int)
    over = x > ceiling
    if not np.any(over):
        return m
    m[over] = np.ceil(np.log(x[over] / ceiling) / -math.log(dep)).astype(int)
    # float guard around the log estimate
    while True:
        bump = over & (dep ** m * x > ceiling)
        if not np.any(bump):
            break
        m[bump] += 1
    while True:
        drop = over & (m > 1) & (dep ** (m - 1) * x <= ceiling)
        if not np.any(drop):
            break
        m[drop] -= 1
    return m


@dataclass(frozen=True)
class ValueFunctionPW:
    """Closed-form value function, evaluated lazily at any capital stock.

    ``family`` is one of
      * ``"consumption-only"``: value of always following x' = (1-d) x,
      * ``"investment"``: value of the n-indexed investment policy,
      * ``"turnpike"``: value of the straight-down-the-turnpike policy at delta = 1/theta.
    The segment families indexed by powers of (1-d) are countably infinite,
    so breakpoints are produced on demand by ``breakpoints``.
    """

    economy: Economy
    family: str
    n: Optional[int] = None

    def __call__(self, x):
        arr = np.asarray(x, dtype=float)
        flat = np.atleast_1d(arr).astype(float)
        if self.family == "consumption-only":
            out = _w_consumption_only(self.economy, flat)
        elif self.family == "investment":
            out = _w_investment(self.economy, self.n, flat)
        elif self.family == "turnpike":
            out = _w_turnpike(self.economy, flat)
        else:
            raise ValueError(f"unknown family {self.family!r}")
        return float(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)

    def breakpoints(self, x_max: float) -> list:
        e = self.economy
        dep = 1 - e.d
        if self.family == "consumption-only":
            base = [e.a_C]
        elif self.family == "investment":
            base = [x_n(e, m) for m in range(self.n + 1)]
            if not e.circulating:
                base.append(x_n(e, self.n - 1) / dep)
        else:
            xhat = model.golden_stock(e)
            t = model.theta(e)
            base = [xhat]
            k = 1
            while xhat / t**k > x_max * 1e-6:
                base.append(xhat / t**k)
                k += 1
        pts = set(b for b in base if b <= x_max)
        if not e.circulating:
            seeds = base if self.family != "investment" else base[-2:]
            for s in seeds:
                y = s / dep
                while y <= x_max:
                    pts.add(y)
                    y /= dep
        return sorted(pts)


def _w_consumption_only(e: Economy, x):
    if e.circulating:
        return np.minimum(x / e.a_C, 1.0)
    dep, dl = 1 - e.d, e.delta
    k = 1.0 / (e.a_C * (1 - dl * dep))
    m = _steps_down(x, e.a_C, dep)
    return (1 - dl**m) / (1 - dl) + dl**m * dep**m * x * k


def _w_investment(e: Economy, n: int, x):
    a_C, a_I, b, dl = e.a_C, e.a_I, e.b, e.delta
    dep = 1 - e.d
    k = 1.0 / (a_C * (1 - dl * dep))
    xs = [x_n(e, m) for m in range(n + 1)]
    _, mv = _lines(e)

    if e.circulating:
        steps = np.zeros(x.shape, dtype=int)
        y = x
    else:
        steps = _steps_down(x, xs[n - 1] / dep, dep)
        y = dep**steps * x

    base = np.empty_like(y)
    low = y <= a_C
    base[low] = y[low] * k
    for m in range(1, n + 1):
        mask = (y > xs[m - 1]) & (y <= xs[m])
        if not np.any(mask):
            continue
        f = y[mask]
        acc = np.zeros_like(f)
        for i in range(m):
            acc += dl**i * (a_I - f) / (a_I - a_C)
            f = mv(f)
        base[mask] = acc + dl**m * f * k
    top = y > xs[n]
    if np.any(top):
        flow = sum(dl**i * (a_I - xs[n - i]) for i in range(1, n + 1)) / (a_I - a_C)
        # after x_{n-1} the program walks down the MV line to a_C and then sits on OD from (1-d) a_C
        base[top] = dep * y[top] / b + (b - xs[n - 1]) / b + flow + dl ** (n + 1) * dep * a_C * k
    return (1 - dl**steps) / (1 - dl) + dl**steps * base


def _w_turnpike(e: Economy, x):
    dl, dep = e.delta, 1 - e.d
    t = model.theta(e)
    xhat = model.golden_stock(e)
    u_hat = 1 - e.d * xhat / e.b
    slope = (e.b + e.a_I * dep) / (e.a_C * e.b)
    out = np.zeros_like(x)
    below = (x > 0) & (x < xhat)
    if np.any(below):
        xb = x[below]
        # smallest n >= 0 with x >= xhat / theta**(n+1)
        nb = np.maximum(np.floor(np.log(xhat / xb) / math.log(t)).astype(int), 0)
        nb = np.where(xb * t ** (nb + 1) < xhat, nb + 1, nb)
        nb = np.where((nb > 0) & (xb * t**nb >= xhat), nb - 1, nb)
        out[below] = slope * dl**nb * (t**nb * xb - xhat) + dl**nb * u_hat / (1 - dl)
    above = x >= xhat
    if np.any(above):
        xa = x[above]
        if e.circulating:
            out[above] = u_hat / (1 - dl)
        else:
            na = _steps_down(xa, xhat / dep, dep)
            # segments are half-open on the right: x in [xhat/dep^n, xhat/dep^(n+1))
            na = np.where(dep**na * xa == xhat / dep, na + 1, na)
            out[above] = dep / e.b * dl**na * (dep**na * xa - xhat) + (
                1 - dl**na + dl**na * u_hat
            ) / (1 - dl)
    return out


def closed_form_value(e: Economy, regime: Optional[Regime] = None) -> ValueFunctionPW:
    """Value function generated by the policy of the matched characterization."""
    regime = regime or classify(e)
    kind = regime.kind
    if kind == "DeltaNormal":
        raise UnsupportedRegimeError("delta > 1/theta is outside the characterized regimes")
    if kind in ("ExtinctionNoInvestment", "UnsustainableNoInvestment", "OneSector"):
        return ValueFunctionPW(e, "consumption-only")
    if kind in ("ExtinctionWithInvestment", "KnifeEdgeMu"):
        if regime.n == 0:
            return ValueFunctionPW(e, "consumption-only")
        return ValueFunctionPW(e, "investment", regime.n)
    if kind == "KnifeEdgeInvTheta":
        if e.a_C >= e.a_I:
            return ValueFunctionPW(e, "consumption-only")
        return ValueFunctionPW(e, "turnpike")
    raise UnsupportedRegimeError(f"no value function for regime {kind}")


def bellman_residual(e: Economy, W: ValueFunctionPW, p: PolicyCorrespondence, xs) -> float:
    """max |W(x) - u(x, x') - delta W(x')| over xs and both ends of the policy interval."""
    xs = np.asarray(xs, dtype=float)
    if np.any(~np.isfinite(xs)) or np.any(xs <= 0):
        raise ValueError("sample states must be finite and > 0")
    lo, hi = p.bounds(xs)
    w = W(xs)
    worst = 0.0
    for nxt in (lo, hi):
        if not model.feasible(e, xs, nxt):
            bad = np.flatnonzero(
                (nxt < (1 - e.d) * xs - model.EPS_CMP)
                | (nxt > model.transition_bounds(e, xs)[1] + model.EPS_CMP)
            )
            raise InfeasibleError(f"policy leaves Omega at x={xs[bad[0]]!r} -> {nxt[bad[0]]!r}")
        gap = np.abs(w - model.utility(e, xs, nxt) - e.delta * W(nxt))
        worst = max(worst, float(np.max(gap)))
    return worst
