"""Comparison of the value-iteration oracle against the closed forms."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import Economy
from .oracle import OracleResult
from .policy import closed_form_value, optimal_policy


@dataclass(frozen=True)
class GapReport:
    value_gap: float
    policy_gap: float
    worst_value_x: float
    worst_policy_x: float
    cell: float
    boundary_hits: int

    @property
    def policy_gap_cells(self) -> float:
        return self.policy_gap / self.cell

    def within(self, value_tol: float, policy_cells: float = 1.0) -> bool:
        return self.value_gap <= value_tol and self.policy_gap <= policy_cells * self.cell * (1 + 1e-9)

    def to_dict(self) -> dict:
        return {
            "value_gap": self.value_gap,
            "policy_gap": self.policy_gap,
            "policy_gap_cells": self.policy_gap_cells,
            "worst_value_x": self.worst_value_x,
            "worst_policy_x": self.worst_policy_x,
            "cell": self.cell,
            "boundary_hits": self.boundary_hits,
        }


def closed_form_on_grid(e: Economy, o: OracleResult):
    """Closed-form W and the policy interval at the oracle nodes (x = 0 maps to 0)."""
    W = closed_form_value(e)
    p = optimal_policy(e)
    w = W(o.grid)
    lo = np.zeros_like(o.grid)
    hi = np.zeros_like(o.grid)
    pos = o.grid > 0
    lo[pos], hi[pos] = p.bounds(o.grid[pos])
    return w, lo, hi


def compare(e: Economy, o: OracleResult) -> GapReport:
    w, lo, hi = closed_form_on_grid(e, o)
    vgap = np.abs(w - o.value)
    pgap = np.maximum(np.maximum(lo - o.policy, o.policy - hi), 0.0)
    iv, ip = int(np.argmax(vgap)), int(np.argmax(pgap))
    return GapReport(
        value_gap=float(vgap[iv]),
        policy_gap=float(pgap[ip]),
        worst_value_x=float(o.grid[iv]),
        worst_policy_x=float(o.grid[ip]),
        cell=o.cell,
        boundary_hits=o.boundary_hits,
    )
