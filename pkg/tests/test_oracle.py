import ast
from pathlib import Path

import numpy as np
import pytest

import matchbox.oracle as oracle_mod
from matchbox import model
from matchbox.errors import ConvergenceError, RegimeError, UnsupportedRegimeError, ValidationError
from matchbox.model import Economy
from matchbox.oracle import OracleConfig, stationarity_check, value_iteration
from matchbox.verify import compare


def test_config_validation():
    with pytest.raises(ValidationError):
        OracleConfig(3.0, n_grid=100)
    with pytest.raises(ValidationError):
        OracleConfig(-1.0)
    with pytest.raises(ValidationError):
        OracleConfig(3.0, tol_vi=0)
    with pytest.raises(ValidationError):
        OracleConfig(3.0, max_iter=0)


def test_grid_must_cover_the_policies(estar):
    with pytest.raises(ValidationError):
        value_iteration(estar(0.6), OracleConfig(1.5, 401))


def test_non_convergence_is_reported(estar):
    with pytest.raises(ConvergenceError):
        value_iteration(estar(0.6), OracleConfig(3.0, 401, 1e-10, max_iter=3))


def test_value_near_two_thirds(estar):
    o = value_iteration(estar(0.4), OracleConfig(3.0, 3001, 1e-10))
    i = int(np.argmin(np.abs(o.grid - 2 / 3)))
    assert abs(o.value[i] - 1.25) <= 2e-3


def test_argmax_near_point_nine(estar):
    o = value_iteration(estar(0.6), OracleConfig(3.0, 4001, 1e-10))
    i = int(np.argmin(np.abs(o.grid - 0.9)))
    assert abs(o.policy[i] - 2 / 3) <= o.cell


def test_myopic_limit(estar):
    e = estar(1e-6)
    o = value_iteration(e, OracleConfig(3.0, 1001, 1e-12))
    np.testing.assert_allclose(o.policy, 0.5 * o.grid, atol=o.cell)


def test_result_invariants_and_contraction(estar):
    e = estar(0.7)
    o = value_iteration(e, OracleConfig(3.0, 2001, 1e-12))
    assert np.all(o.value >= 0)
    assert np.all(np.diff(o.value) >= -1e-12)
    assert model.feasible(e, o.grid, o.policy)
    d = np.array(o.deltas)
    live = d[1:][d[:-1] > 1e-13]
    assert np.all(live / d[:-1][d[:-1] > 1e-13] <= e.delta + 1e-9)
    assert o.boundary_hits == 0


def test_deterministic(estar):
    cfg = OracleConfig(3.0, 1001, 1e-10)
    a = value_iteration(estar(0.7), cfg)
    b = value_iteration(estar(0.7), cfg)
    assert np.array_equal(a.value, b.value) and np.array_equal(a.policy, b.policy)


@pytest.mark.parametrize("delta,tol", [(0.6, 5e-3), (0.4, 2e-3)])
def test_compare_examples(estar, delta, tol):
    e = estar(delta)
    o = value_iteration(e, OracleConfig.for_economy(e, 4001))
    r = compare(e, o)
    assert r.value_gap <= tol
    assert r.within(tol)


def test_compare_on_the_knife_edge(estar):
    e = estar(0.8)
    o = value_iteration(e, OracleConfig.for_economy(e, 4001))
    assert compare(e, o).policy_gap <= o.cell


def test_compare_propagates_unsupported(estar):
    e = estar(0.9)
    o = value_iteration(e, OracleConfig.for_economy(e, 401))
    with pytest.raises(UnsupportedRegimeError):
        compare(e, o)


@pytest.mark.parametrize("econ", [Economy(2 / 3, 4 / 3, 1, 0.5, 0.9), Economy(4 / 3, 2 / 3, 1, 0.5, 0.9)])
def test_stationarity_in_delta_normal_economies(econ):
    assert model.golden_stock(econ) == pytest.approx(1.0)
    o = value_iteration(econ, OracleConfig.for_economy(econ, 4001))
    assert stationarity_check(econ, o)


def test_stationarity_needs_delta_normality(estar):
    e = estar(0.6)
    o = value_iteration(e, OracleConfig(3.0, 401))
    with pytest.raises(RegimeError):
        stationarity_check(e, o)


ESTAR_DELTAS = (0.4, 0.6, 0.7, 0.75, 0.8)
GRIDS = (101, 201, 401, 801, 1601, 3201)


def _gaps(delta):
    e = Economy(2 / 3, 4 / 3, 1, 0.5, delta)
    return [compare(e, value_iteration(e, OracleConfig(3.0, n, 1e-12))).value_gap for n in GRIDS]


@pytest.mark.xfail(strict=True, reason="gap shrinks in steps set by where kinks of W fall inside cells")
def test_each_grid_doubling_halves_the_gap():
    for delta in ESTAR_DELTAS:
        g = _gaps(delta)
        assert all(b <= a / 2 for a, b in zip(g, g[1:]))


@pytest.mark.parametrize("delta", ESTAR_DELTAS)
def test_refinement_shrinks_the_gap(delta):
    g = _gaps(delta)
    assert all(b <= a + 1e-12 for a, b in zip(g, g[1:]))
    assert g[-1] <= g[0] / 8


def test_oracle_does_not_import_closed_forms():
    tree = ast.parse(Path(oracle_mod.__file__).read_text())
    names = set()
    for node in ast.walk(tree):
        if isinstance(node, ast.ImportFrom):
            names.add(node.module or "")
            names.update(a.name for a in node.names)
        elif isinstance(node, ast.Import):
            names.update(a.name for a in node.names)
    assert not any("threshold" in n or "policy" in n or "verify" in n for n in names)
