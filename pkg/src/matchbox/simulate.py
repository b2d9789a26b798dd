"""Forward simulation of optimal programs."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import model
from .model import Economy
from .policy import optimal_policy
from .thresholds import classify

EPS_EXTINCT = 1e-9
EPS_INVEST = 1e-12


@dataclass(frozen=True)
class Trajectory:
    economy: Economy
    states: np.ndarray
    outputs: np.ndarray
    utilities: np.ndarray
    investment_flags: np.ndarray
    extinct_at: Optional[int]
    discounted_total: float
    selection: str

    @property
    def horizon(self) -> int:
        return len(self.utilities)

    @property
    def investment_periods(self) -> int:
        return int(np.sum(self.investment_flags))


def simulate_with(e: Economy, step: Callable[[float], float], x0: float, T: int,
                  selection: str = "custom") -> Trajectory:
    """Iterate ``x_{t+1} = step(x_t)`` for T periods and record the program."""
    if not (math.isfinite(x0) and x0 > 0):
        raise ValueError("x0 must be finite and > 0")
    if T < 0:
        raise ValueError("horizon must be >= 0")
    xs = np.empty(T + 1)
    xs[0] = x0
    for t in range(T):
        x = xs[t]
        xs[t + 1] = step(x) if x > 0 else 0.0
    now, nxt = xs[:-1], xs[1:]
    ys = model.consumption(e, now, nxt) if T else np.empty(0)
    us = model.utility(e, now, nxt) if T else np.empty(0)
    flags = nxt > (1 - e.d) * now + EPS_INVEST
    below = np.flatnonzero(xs < EPS_EXTINCT)
    extinct = int(below[0]) if below.size else None
    total = float(np.sum(e.delta ** np.arange(T) * us))
    return Trajectory(e, xs, np.asarray(ys), np.asarray(us), flags, extinct, total, selection)


def simulate(e: Economy, x0: float, T: int, selection: Optional[str] = None) -> Trajectory:
    """Follow the closed-form optimal policy from x0 for T periods."""
    p = optimal_policy(e, classify(e))
    rule = selection or p.selection_default
    return simulate_with(e, lambda x: p.select(x, rule), x0, T, rule)


def extinction_stats(t: Trajectory, eps: float = EPS_EXTINCT):
    """(extinct, periods with investment, first period with x_t < eps or None)."""
    below = np.flatnonzero(t.states < eps)
    hit = int(below[0]) if below.size else None
    return hit is not None, t.investment_periods, hit


def discounted_utility(t: Trajectory):
    """Partial discounted sum and the bound delta^T / (1 - delta) on the omitted tail."""
    dl = t.economy.delta
    return t.discounted_total, dl**t.horizon / (1 - dl)


def horizon_for(delta: float, tol: float = 1e-10) -> int:
    """Smallest T whose tail bound delta^T / (1 - delta) is below tol."""
    return int(math.ceil(math.log(tol * (1 - delta)) / math.log(delta)))


@dataclass(frozen=True)
class SweepRow:
    delta: float
    regime: str
    n: Optional[int]
    investment_periods: int
    time_to_eps: Optional[int]


def sweep(e: Economy, deltas, x0: float, T: int, eps: float = EPS_EXTINCT) -> list:
    """Regime and extinction statistics of the optimal program over a grid of discount factors."""
    rows = []
    for dl in deltas:
        ed = e.with_delta(float(dl))
        regime = classify(ed)
        traj = simulate(ed, x0, T)
        _, periods, hit = extinction_stats(traj, eps)
        rows.append(SweepRow(float(dl), regime.label(), regime.n, periods, hit))
    return rows
