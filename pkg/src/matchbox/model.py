"""Economy primitives of the two-sector Leontief (RSL) growth model.

One unit of labor and ``a_C`` units of capital make one unit of the
consumption good; one unit of labor and ``a_I`` units of capital make ``b``
units of the investment good. Labor is fixed at one, capital depreciates at
rate ``d`` and the planner discounts with ``delta``.

All functions here are pure. ``utility`` and ``consumption`` accept numpy
arrays as well as floats.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .errors import InfeasibleError, ValidationError

EPS_CMP = 1e-12


@dataclass(frozen=True)
class Economy:
    a_C: float
    a_I: float
    b: float
    d: float
    delta: float

    def __post_init__(self):
        for name in ("a_C", "a_I", "b", "d", "delta"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ValidationError(name, f"expected a number, got {value!r}")
            if not math.isfinite(value):
                raise ValidationError(name, f"must be finite, got {value!r}")
            object.__setattr__(self, name, float(value))
        if not self.a_C > 0:
            raise ValidationError("a_C", f"must be > 0, got {self.a_C}")
        if not self.a_I >= 0:
            raise ValidationError("a_I", f"must be >= 0, got {self.a_I}")
        if not self.b > 0:
            raise ValidationError("b", f"must be > 0, got {self.b}")
        if not 0 < self.d <= 1:
            raise ValidationError("d", f"must lie in (0, 1], got {self.d}")
        if not 0 < self.delta < 1:
            raise ValidationError("delta", f"must lie in (0, 1), got {self.delta}")

    def with_delta(self, delta: float) -> "Economy":
        return Economy(self.a_C, self.a_I, self.b, self.d, delta)

    @property
    def circulating(self) -> bool:
        return self.d == 1.0

    @classmethod
    def from_dict(cls, data: dict) -> "Economy":
        missing = [k for k in ("a_C", "a_I", "b", "d", "delta") if k not in data]
        if missing:
            raise ValidationError(missing[0], "missing key")
        return cls(data["a_C"], data["a_I"], data["b"], data["d"], data["delta"])

    @classmethod
    def from_json(cls, text: str) -> "Economy":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError("json", str(exc)) from None
        if not isinstance(data, dict):
            raise ValidationError("json", "expected an object")
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class DerivedParams:
    """Quantities derived from an economy.

    ``zeta`` is None in the one-sector case (a_C == a_I); ``theta`` is None
    when a_I == 0 (then ``inv_theta`` is 0). The golden-rule fields are set
    only for delta-normal economies.
    """

    zeta: Optional[float]
    theta: Optional[float]
    inv_theta: float
    mu0: float
    golden_stock: Optional[float] = None
    golden_price: Optional[float] = None

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}


def zeta(e: Economy) -> Optional[float]:
    """MRT of capital under full utilization of both factors."""
    if e.a_C == e.a_I:
        return None
    return e.b / (e.a_C - e.a_I) - (1 - e.d)


def theta(e: Economy) -> Optional[float]:
    """MRT with zero consumption (full specialization in investment goods)."""
    if e.a_I == 0:
        return None
    return e.b / e.a_I + (1 - e.d)


def inv_theta(e: Economy) -> float:
    t = theta(e)
    return 0.0 if t is None else 1.0 / t


def mu0(e: Economy) -> float:
    return 1.0 / (e.b / e.a_C + (1 - e.d))


def golden_stock(e: Economy) -> float:
    """Modified golden-rule stock, a_C b / (b + d (a_C - a_I))."""
    return e.a_C * e.b / (e.b + e.d * (e.a_C - e.a_I))


def is_delta_normal(e: Economy, eps: float = EPS_CMP) -> bool:
    return e.delta - inv_theta(e) > eps


def derive_params(e: Economy) -> DerivedParams:
    z = zeta(e)
    stock = price = None
    if is_delta_normal(e):
        stock = golden_stock(e)
        if z is not None:
            price = 1.0 / ((e.a_C - e.a_I) * (1 + e.delta * z))
    return DerivedParams(
        zeta=z,
        theta=theta(e),
        inv_theta=inv_theta(e),
        mu0=mu0(e),
        golden_stock=stock,
        golden_price=price,
    )


def _capacity(e: Economy, x):
    # min{1, x/a_I}; labor alone produces when a_I == 0, including at x == 0
    if e.a_I == 0:
        return np.ones_like(x) if isinstance(x, np.ndarray) else 1.0
    return np.minimum(1.0, x / e.a_I) if isinstance(x, np.ndarray) else min(1.0, x / e.a_I)


def transition_bounds(e: Economy, x):
    """Return the interval ``(lo, hi)`` of next-period stocks reachable from ``x``."""
    lo = (1 - e.d) * x
    return lo, lo + e.b * _capacity(e, x)


def feasible(e: Economy, x, x_next, tol: float = EPS_CMP) -> bool:
    """Membership of (x, x_next) in the transition possibility set."""
    x = np.asarray(x, dtype=float)
    x_next = np.asarray(x_next, dtype=float)
    if np.any(x < 0) or np.any(x_next < -tol):
        return False
    lo, hi = transition_bounds(e, x)
    return bool(np.all(x_next >= lo - tol) and np.all(x_next <= hi + tol))


def _check(e, x, x_next):
    if not feasible(e, x, x_next):
        raise InfeasibleError(f"transition ({x!r} -> {x_next!r}) is outside Omega")


def consumption(e: Economy, x, x_next):
    """Largest consumption-good output compatible with (x, x_next).

    Evaluated directly as the tighter of the capital and labor constraints.
    """
    _check(e, x, x_next)
    invest = x_next - (1 - e.d) * x
    by_capital = (x - e.a_I / e.b * invest) / e.a_C
    by_labor = 1 - invest / e.b
    return np.maximum(np.minimum(by_capital, by_labor), 0.0)


def utility(e: Economy, x, x_next):
    """Reduced-form utility via explicit branch selection.

    The first branch (capital fully utilized) applies when
    (a_C - a_I) x' <= ((1-d)(a_C - a_I) - b) x + a_C b, the second
    (labor fully employed) otherwise. The two agree on the boundary.
    """
    _check(e, x, x_next)
    gap = e.a_C - e.a_I
    capital_side = gap * x_next <= ((1 - e.d) * gap - e.b) * x + e.a_C * e.b
    # a_I theta == b + a_I (1-d), which stays finite when a_I == 0
    u_capital = (e.b + e.a_I * (1 - e.d)) / (e.a_C * e.b) * x - e.a_I / (e.a_C * e.b) * x_next
    u_labor = (1 - e.d) / e.b * x - x_next / e.b + 1
    if isinstance(capital_side, np.ndarray):
        return np.maximum(np.where(capital_side, u_capital, u_labor), 0.0)
    return max(float(u_capital if capital_side else u_labor), 0.0)


def constraint_lines(e: Economy, x):
    """Intercepts and slopes of the two consumption constraints in x'.

    Returns ``(c_capital, s_capital, c_labor, s_labor)`` such that
    ``consumption(x, x') == min(c_capital - s_capital x', c_labor - s_labor x')``
    on the feasible set.
    """
    c_capital = (x + e.a_I * (1 - e.d) * x / e.b) / e.a_C
    c_labor = 1 + (1 - e.d) * x / e.b
    return c_capital, e.a_I / (e.a_C * e.b), c_labor, 1.0 / e.b


def kink(e: Economy, x):
    """Next-period stock on the full-utilization (MV) line, or None if a_C == a_I."""
    gap = e.a_C - e.a_I
    if gap == 0:
        return None
    return (((1 - e.d) * gap - e.b) * x + e.a_C * e.b) / gap
