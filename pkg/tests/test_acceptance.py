"""Acceptance criteria, one test per criterion.

Each test carries a ``criterion`` marker; the terminal summary prints one
PASS/FAIL line per criterion. Run alone with ``pytest tests/test_acceptance.py``
or ``python tests/test_acceptance.py``.
"""

import math
import time

import numpy as np
import pytest
from regimes import MATRIX
from test_properties import definitional_delta_normal, exact_z, random_economies_for_normality

from matchbox import model
from matchbox import thresholds as th
from matchbox.model import Economy
from matchbox.oracle import OracleConfig, stationarity_check, value_iteration
from matchbox.policy import bellman_residual, closed_form_value, optimal_policy
from matchbox.simulate import simulate
from matchbox.verify import compare

ORACLE_MATRIX = {
    "extinction, consumption-intensive": Economy(4 / 3, 2 / 3, 1, 0.5, 0.4),
    "extinction, impatient": Economy(2 / 3, 4 / 3, 1, 0.5, 0.4),
    "investment n=1": Economy(2 / 3, 4 / 3, 1, 0.5, 0.6),
    "investment n=2": Economy(2 / 3, 4 / 3, 1, 0.5, 0.7),
    "investment n=1, circulating": Economy(0.5, 1, 2, 1, 0.35),
    "investment n=2, circulating": Economy(0.5, 1, 2, 1, 0.43),
    "theta<1, n=n0=2": Economy(0.5, 2, 0.5, 0.5, 0.95),
    "theta<1, circulating, n=n0=1": Economy(2 / 3, 4 / 3, 1, 1, 0.8),
    "knife 1/theta, a_C>a_I": Economy(4 / 3, 2 / 3, 1, 0.5, 0.5),
    "knife 1/theta, a_C<a_I": Economy(2 / 3, 4 / 3, 1, 0.5, 0.8),
    "one-sector": Economy(1, 1, 1, 0.5, 0.5),
    "one-sector, knife": Economy(1, 1, 1, 0.5, 2 / 3),
}


def report(label, ok, detail):
    print(f"{label}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, detail


@pytest.mark.criterion("AC1 worked-example thresholds")
def test_ac1_worked_example_thresholds():
    t0 = time.perf_counter()
    th._mu_cached.cache_clear()
    e = Economy(2 / 3, 4 / 3, 1, 0.5, 0.6)
    checks = {
        "theta": abs(model.theta(e) - 1.25) <= 1e-14,
        "zeta": abs(model.zeta(e) + 2) <= 1e-14,
        "mu0": abs(th.mu_n(e, 0) - 0.5) <= 1e-10,
        "mu1": abs(th.mu_n(e, 1) - 2 / 3) <= 1e-10,
        "mu2": abs(th.mu_n(e, 2) - 0.73) <= 5e-3,
        "x0": abs(th.x_n(e, 0) - 2 / 3) <= 1e-12,
        "x1": abs(th.x_n(e, 1) - 5 / 6) <= 1e-12,
        "x2": abs(th.x_n(e, 2) - 11 / 12) <= 1e-12,
        "mu30": abs(th.mu_n(e, 30) - 0.8) <= 1e-3,
    }
    elapsed = time.perf_counter() - t0
    checks["runtime<1s"] = elapsed < 1.0
    failed = [k for k, ok in checks.items() if not ok]
    report("AC1", not failed, f"failed={failed}, {elapsed:.3f}s")


@pytest.mark.criterion("AC2 oracle equivalence")
def test_ac2_oracle_equivalence():
    t0 = time.perf_counter()
    bad = []
    worst_v, worst_p = 0.0, 0.0
    for name, e in ORACLE_MATRIX.items():
        o = value_iteration(e, OracleConfig.for_economy(e, n_grid=4001, tol_vi=1e-10))
        r = compare(e, o)
        worst_v = max(worst_v, r.value_gap)
        worst_p = max(worst_p, r.policy_gap_cells)
        if not r.within(5e-3, 1.0) or o.boundary_hits:
            bad.append((name, r.value_gap, r.policy_gap_cells))
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 60
    report("AC2", ok, f"worst value gap {worst_v:.2e}, worst policy gap {worst_p:.3f} cells, {elapsed:.1f}s, bad={bad}")


@pytest.mark.criterion("AC3 Bellman residual and one-shot optimality")
def test_ac3_bellman():
    rng = np.random.default_rng(2024)
    worst_res, worst_margin = 0.0, math.inf
    for name, e in MATRIX.items():
        W, p = closed_form_value(e), optimal_policy(e)
        xs = np.exp(rng.uniform(math.log(1e-6), math.log(10), 10_000))
        worst_res = max(worst_res, bellman_residual(e, W, p, xs))
        x = xs[:1000]
        lo, hi = model.transition_bounds(e, x)
        dev = lo[:, None] + rng.uniform(0, 1, (1000, 1000)) * (hi - lo)[:, None]
        xx = np.broadcast_to(x[:, None], dev.shape)
        margin = W(x)[:, None] - model.utility(e, xx, dev) - e.delta * W(dev)
        worst_margin = min(worst_margin, float(margin.min()))
    ok = worst_res <= 1e-10 and worst_margin >= -1e-9
    report("AC3", ok, f"max residual {worst_res:.2e}, min deviation margin {worst_margin:.2e}, {len(MATRIX)} regimes")


@pytest.mark.criterion("AC4 threshold property suites")
def test_ac4_properties():
    rng = np.random.default_rng(404)
    failures = []

    def capital_intensive():
        while True:
            a_C, a_I = sorted(rng.uniform(0.1, 3, 2))
            d = 1.0 if rng.uniform() < 0.3 else rng.uniform(0.05, 1)
            e = Economy(a_C, a_I, rng.uniform(0.1, 3), d, 0.5)
            if model.theta(e) > 1:
                return e

    for _ in range(20):
        e = capital_intensive()
        inv = model.inv_theta(e)
        for n in range(1, 11):
            m = th.mu_n(e, n)
            for dl in np.linspace(0, m, 52)[:-1]:
                if m - dl > 1e-9 and not th.z_n(e, n, dl) < 0:
                    failures.append(("crossing-below", n, dl))
            for dl in np.linspace(m, inv, 52)[1:]:
                if dl - m > 1e-9 and not th.z_n(e, n, dl) > 0:
                    failures.append(("crossing-above", n, dl))
        for dl in rng.uniform(0, inv, 10):
            z = [exact_z(e, n, dl) for n in range(11)]
            if not all(b < a for a, b in zip(z, z[1:])):
                failures.append(("ordering", dl))

    for _ in range(10):
        e = capital_intensive()
        inv = model.inv_theta(e)
        mus = [th.mu_n(e, n) for n in range(21)]
        xs = [th.x_n(e, n) for n in range(21)]
        for a, b in zip(mus, mus[1:]):
            if not (b > a if inv - b > 2 * th.TOL_ROOT else b >= a - th.TOL_ROOT):
                failures.append(("mu-monotone", a, b))
        for a, b in zip(xs, xs[1:]):
            if not (b > a if abs(xs[-1] - b) > 1e-13 * xs[-1] else b >= a):
                failures.append(("x-monotone", a, b))

    count = 0
    while count < 1000:
        e = capital_intensive() if rng.uniform() < 0.5 else Economy(*sorted(rng.uniform(0.1, 3, 2)), rng.uniform(0.1, 3), rng.uniform(0.05, 1), 0.5)
        if e.a_C >= e.a_I:
            continue
        n = int(rng.integers(0, 15))
        dl = rng.uniform(0, model.inv_theta(e))
        if abs(dl + 1 / model.zeta(e)) < 1e-6:
            continue
        count += 1
        zn = th.z_n(e, n, dl)
        if abs(th.z_n_closed(e, n, dl) - zn) > 1e-10 * max(1.0, abs(zn)):
            failures.append(("cross-form", n, dl))

    for _ in range(1000):
        e = Economy(*sorted(rng.uniform(0.1, 3, 2)), rng.uniform(0.1, 3), rng.uniform(0.05, 1), 0.5)
        dl = rng.uniform(0, min(1.0, model.inv_theta(e)))
        k = 1 / (e.a_C * (1 - dl * (1 - e.d)))
        if not -1 / (e.a_I - e.a_C) - model.zeta(e) * dl * k < k:
            failures.append(("mv-slope-bound", e, dl))

    for _ in range(1000):
        d, b = rng.uniform(0.05, 1), rng.uniform(0.1, 3)
        e = Economy(rng.uniform(0.05, 0.95) * b / d, rng.uniform(1.2, 10) * b / d, b, d, 0.5)
        n0 = th.n0_index(e)
        if not (th.mu_n(e, n0 - 1) < 1 <= th.mu_n(e, n0) and th.x_n(e, n0) < e.a_I):
            failures.append(("finite-bifurcation-index", e))

    report("AC4", not failures, f"{len(failures)} violations; first={failures[:2]}")


@pytest.mark.criterion("AC5 bifurcation semantics")
def test_ac5_bifurcation_semantics():
    problems = []
    for base in (Economy(0.5, 1, 2, 1, 0.3), Economy(1, 2, 3, 1, 0.3)):
        for n in range(1, 6):
            e = base.with_delta(0.5 * (th.mu_n(base, n - 1) + th.mu_n(base, n)))
            t = simulate(e, th.x_n(e, n) * 1.05, 60)
            if t.investment_periods != n:
                problems.append((base, n, t.investment_periods))
    impatient = [Economy(4 / 3, 2 / 3, 1, 1, dl) for dl in (0.1, 0.4, 0.66)]
    impatient += [Economy(2 / 3, 4 / 3, 1, 1, dl) for dl in (0.1, 0.4, 0.66)]
    for e in impatient:
        for x0 in (0.01, 0.5, 1, 5):
            t = simulate(e, x0, 5)
            if t.extinct_at != 1:
                problems.append((e, x0, t.extinct_at))
    report("AC5", not problems, f"problems={problems}")


@pytest.mark.criterion("AC6 delta-normality and golden rule")
def test_ac6_delta_normality():
    rng = np.random.default_rng(66)
    problems = []
    for e in random_economies_for_normality(rng, 50):
        if model.is_delta_normal(e) != definitional_delta_normal(e):
            problems.append(("definition", e))
    normal = [Economy(2 / 3, 4 / 3, 1, 0.5, 0.9), Economy(4 / 3, 2 / 3, 1, 0.5, 0.9), Economy(0.5, 1, 2, 1, 0.7),
              Economy(1, 1, 1, 0.5, 0.8)]
    for e in normal:
        o = value_iteration(e, OracleConfig.for_economy(e, 4001))
        if not stationarity_check(e, o):
            problems.append(("stationary", e))
    for e in (Economy(4 / 3, 2 / 3, 1, 0.5, 0.5), Economy(2 / 3, 4 / 3, 1, 0.5, 0.8), Economy(0.5, 1, 2, 1, 0.5)):
        xhat = model.golden_stock(e)
        xs = np.linspace(xhat / 1000, xhat, 1000)
        lo, hi = optimal_policy(e).bounds(xs)
        if not (np.all(lo <= xs + 1e-12) and np.all(xs <= hi + 1e-12)):
            problems.append(("continuum", e))
    report("AC6", not problems, f"problems={problems}")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
