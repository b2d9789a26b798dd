"""Bifurcation thresholds for the discount factor and the capital stock.

For a capital-intensive investment-good sector (a_C < a_I) the optimal
policy changes shape at a strictly increasing sequence of discount factors
mu_0 < mu_1 < ... converging to 1/theta. mu_n is the unique root of the
rational function ``z_n`` on (0, 1/theta). The companion capital thresholds
x_0 = a_C < x_1 < ... are the successive pre-images of a_C along the
full-utilization line.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

from . import model
from .errors import BracketError, DomainError, EnumerationCapError, ValidationError
from .model import EPS_CMP, Economy

TOL_ROOT = 1e-13
MAX_BISECT = 200
EPS_KNIFE = 1e-12
N_CAP = 10000


def default_n_cap() -> int:
    raw = os.environ.get("MATCHBOX_N_CAP")
    if raw is None:
        return N_CAP
    try:
        cap = int(raw)
    except ValueError:
        raise ValidationError("MATCHBOX_N_CAP", f"not an integer: {raw!r}") from None
    if cap < 1:
        raise ValidationError("MATCHBOX_N_CAP", "must be >= 1")
    return cap


def _check_delta(e: Economy, delta: float):
    upper = model.inv_theta(e) if e.a_I > 0 else math.inf
    if delta < -EPS_CMP or delta > upper + EPS_CMP:
        raise DomainError(f"delta={delta!r} outside [0, 1/theta={upper!r}]")


def z_n(e: Economy, n: int, delta: float) -> float:
    """Evaluate z_n(delta) by direct summation of the geometric part.

    z_n(d) = -1/b + d (-sum_{i<n} (-d zeta)^i / (a_I - a_C)
                       + (-d zeta)^n / (a_C (1 - d (1-dep))))
    and z_0(d) = -1/b + d / (a_C (1 - d (1-dep))).
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    _check_delta(e, delta)
    tail = 1.0 / (e.a_C * (1 - delta * (1 - e.d)))
    if n == 0:
        return -1.0 / e.b + delta * tail
    z = model.zeta(e)
    if z is None:
        raise DomainError("z_n for n >= 1 needs a_C != a_I")
    r = -delta * z
    term, partial = 1.0, 0.0
    for _ in range(n):
        partial += term
        term *= r
    return -1.0 / e.b + delta * (-partial / (e.a_I - e.a_C) + term * tail)


def z_n_closed(e: Economy, n: int, delta: float, eps: float = EPS_CMP) -> float:
    """Rational closed form of z_n with the removable point delta = -1/zeta split out."""
    _check_delta(e, delta)
    a_C, a_I, b, d = e.a_C, e.a_I, e.b, e.d
    z, t = model.zeta(e), model.theta(e)
    denom_common = a_C * b * (1 - delta * (1 - d)) * (a_I - a_C)
    if abs(delta * z + 1) <= eps:
        num = -n * b * a_C * (1 - d) * delta + n * b * a_C - b * a_I + 2 * b * a_C
        return num / (denom_common * z)
    num = b * a_I * (-z) ** n * (1 - t * delta) * delta ** (n + 1) - a_C * (a_I - a_C) * (
        1 - (1 - d) * delta
    ) ** 2
    return num / (denom_common * (1 + delta * z))


def z_tilde_n(e: Economy, n: int, delta: float) -> float:
    """Numerator polynomial sharing the roots of z_n away from delta = -1/zeta."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if not e.a_C < e.a_I:
        raise DomainError("z_tilde_n needs a_C < a_I")
    _check_delta(e, delta)
    z, t = model.zeta(e), model.theta(e)
    return e.b * e.a_I * (-z) ** n * (1 - t * delta) * delta ** (n + 1) - e.a_C * (
        e.a_I - e.a_C
    ) * (1 - (1 - e.d) * delta) ** 2


def bisect(f, lo: float, hi: float, tol: float = TOL_ROOT, max_iter: int = MAX_BISECT) -> float:
    """Root of ``f`` on [lo, hi] given f(lo) < 0 < f(hi)."""
    f_lo, f_hi = f(lo), f(hi)
    if not (f_lo < 0 < f_hi):
        raise BracketError(f"no sign change on [{lo!r}, {hi!r}]: f={f_lo!r}, {f_hi!r}")
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def z_n_sign(e: Economy, n: int, delta: float) -> int:
    """Sign of z_n(delta) for n >= 1 and a_C < a_I, free of cancellation.

    Direct summation loses every digit near 1/theta once (-delta zeta)^n is
    large. Away from delta = -1/zeta the sign is read off the factored
    numerator z_tilde_n, compared in logs, times the sign of 1 + delta zeta.
    """
    z, t = model.zeta(e), model.theta(e)
    if abs(1 + delta * z) < 1e-3:
        return int(math.copysign(1, z_n(e, n, delta))) if z_n(e, n, delta) != 0 else 0
    lean = 1 - t * delta
    neg_part = math.log(e.a_C * (e.a_I - e.a_C)) + 2 * math.log(1 - (1 - e.d) * delta)
    if lean <= 0 or delta == 0:
        tilde = -1
    else:
        pos_part = (
            math.log(e.b * e.a_I) + n * math.log(-z) + math.log(lean) + (n + 1) * math.log(delta)
        )
        tilde = (pos_part > neg_part) - (pos_part < neg_part)
    return tilde if 1 + delta * z > 0 else -tilde


@lru_cache(maxsize=4096)
def _mu_cached(a_C, a_I, b, d, n):
    # delta does not enter mu_n; a placeholder keeps Economy validation happy
    e = Economy(a_C, a_I, b, d, 0.5)
    if n == 0:
        return model.mu0(e)
    return bisect(lambda dl: z_n_sign(e, n, dl), 0.0, model.inv_theta(e))


def mu_n(e: Economy, n: int) -> float:
    """n-th bifurcation value of the discount factor (bisection on the sign of z_n)."""
    if n < 0:
        raise ValueError("n must be >= 0")
    if n >= 1 and not e.a_C < e.a_I:
        raise DomainError("mu_n for n >= 1 needs a_C < a_I")
    return _mu_cached(e.a_C, e.a_I, e.b, e.d, n)


def x_n(e: Economy, n: int) -> float:
    """n-th capital threshold, x_0 = a_C and x_n = -(x_{n-1} - a_C b/(a_C - a_I))/zeta."""
    if not e.a_C < e.a_I:
        raise DomainError("x_n needs a_C < a_I")
    z = model.zeta(e)
    shift = e.a_C * e.b / (e.a_C - e.a_I)
    x = e.a_C
    for _ in range(n):
        x = -(x - shift) / z
    return x


def x_n_closed(e: Economy, n: int) -> float:
    """Explicit form of x_n; linear growth in n when zeta == -1."""
    z = model.zeta(e)
    if z == -1:
        return e.a_C + n * e.a_C * e.b / (e.a_I - e.a_C)
    denom = e.b + e.d * (e.a_C - e.a_I)
    return e.a_C * e.b / denom - e.d * e.a_C * (e.a_I - e.a_C) / (denom * (-z) ** n)


@dataclass(frozen=True)
class ThresholdTable:
    mu: tuple
    x: tuple
    n_max: int
    inv_theta: float


def threshold_table(e: Economy, count: int) -> ThresholdTable:
    """mu_0..mu_{count-1} and x_0..x_{count-1}."""
    if count < 1:
        raise ValueError("count must be >= 1")
    mus = tuple(mu_n(e, n) for n in range(count))
    xs = tuple(x_n(e, n) for n in range(count))
    return ThresholdTable(mu=mus, x=xs, n_max=count - 1, inv_theta=model.inv_theta(e))


def n0_index(e: Economy, n_cap: Optional[int] = None) -> Optional[int]:
    """First n with mu_{n-1} < 1 <= mu_n when theta < 1 and mu_0 < 1, else None."""
    t = model.theta(e)
    if not e.a_C < e.a_I or t is None or t >= 1 or model.mu0(e) >= 1:
        return None
    cap = default_n_cap() if n_cap is None else n_cap
    for n in range(1, cap + 1):
        if mu_n(e, n) >= 1:
            return n
    raise EnumerationCapError(f"n0 not found below n_cap={cap}")


KINDS = (
    "ExtinctionNoInvestment",
    "ExtinctionWithInvestment",
    "KnifeEdgeMu",
    "KnifeEdgeInvTheta",
    "OneSector",
    "DeltaNormal",
    "UnsustainableNoInvestment",
)


@dataclass(frozen=True)
class Regime:
    kind: str
    n: Optional[int] = None
    n0: Optional[int] = None
    circulating: bool = False
    knife_edge: bool = field(default=False, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown regime kind {self.kind!r}")

    def label(self) -> str:
        return self.kind if self.n is None else f"{self.kind}({self.n})"


def classify(e: Economy, eps_knife: float = EPS_KNIFE, n_cap: Optional[int] = None) -> Regime:
    """Place the economy in exactly one characterized regime."""
    circ = e.circulating
    inv = model.inv_theta(e)
    t = model.theta(e)
    if e.a_I == 0 or e.delta - inv > eps_knife:
        return Regime("DeltaNormal", circulating=circ)
    if abs(e.delta - inv) <= eps_knife and t > 1:
        return Regime("KnifeEdgeInvTheta", circulating=circ, knife_edge=True)
    if abs(e.a_C - e.a_I) <= EPS_CMP:
        return Regime("OneSector", circulating=circ)
    if e.a_C > e.a_I:
        return Regime("ExtinctionNoInvestment", circulating=circ)

    n0 = n0_index(e, n_cap)
    if t < 1 and model.mu0(e) >= 1:
        return Regime("UnsustainableNoInvestment", circulating=circ)
    m0 = model.mu0(e)
    if abs(e.delta - m0) <= eps_knife:
        return Regime("KnifeEdgeMu", n=0, n0=n0, circulating=circ, knife_edge=True)
    if e.delta < m0:
        return Regime("ExtinctionNoInvestment", n0=n0, circulating=circ)
    cap = default_n_cap() if n_cap is None else n_cap
    prev = m0
    for n in range(1, cap + 1):
        m = mu_n(e, n)
        if abs(e.delta - m) <= eps_knife:
            return Regime("KnifeEdgeMu", n=n, n0=n0, circulating=circ, knife_edge=True)
        if e.delta < m:
            return Regime("ExtinctionWithInvestment", n=n, n0=n0, circulating=circ)
        # stop once the roots can no longer be told apart from 1/theta or from each other
        if inv - m < 1e-15 or m <= prev:
            break
        prev = m
    raise EnumerationCapError(
        f"delta={e.delta!r} is too close to 1/theta={inv!r}; more than {cap} thresholds needed"
    )
