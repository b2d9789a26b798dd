"""Closed-form optimal policies of the two-sector Leontief (RSL) growth model,
with a brute-force value-iteration oracle to check them against."""

from .errors import (
    BracketError,
    ConvergenceError,
    DomainError,
    EnumerationCapError,
    InfeasibleError,
    MatchboxError,
    RegimeError,
    UnsupportedRegimeError,
    ValidationError,
)
from .model import DerivedParams, Economy, derive_params, feasible, is_delta_normal, utility
from .oracle import OracleConfig, OracleResult, stationarity_check, value_iteration
from .policy import (
    PolicyCorrespondence,
    ValueFunctionPW,
    bellman_residual,
    closed_form_value,
    optimal_policy,
    policy_eval,
)
from .simulate import Trajectory, discounted_utility, extinction_stats, simulate, sweep
from .thresholds import Regime, classify, mu_n, threshold_table, x_n, z_n
from .verify import GapReport, compare

__version__ = "0.1.0"
