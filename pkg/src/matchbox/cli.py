"""Command-line interface.

Every subcommand takes one economy, either inline
(``--aC --aI --b --d --delta``) or from a JSON file (``--economy``),
and writes CSV (default) or JSON to stdout or ``--out``.

Exit codes: 0 success, 1 invalid input, 2 verification gaps exceeded,
3 regime outside the characterized cases.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import model
from .errors import (
    BracketError,
    DomainError,
    EnumerationCapError,
    UnsupportedRegimeError,
    ValidationError,
)
from .model import Economy
from .oracle import OracleConfig, required_span, value_iteration
from .policy import closed_form_value, optimal_policy
from .simulate import extinction_stats, simulate, sweep
from .thresholds import classify, mu_n, x_n
from .verify import closed_form_on_grid, compare

EXIT_OK, EXIT_INVALID, EXIT_GAP, EXIT_UNSUPPORTED = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage, which would collide with the verification code
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _json_safe(v):
    if isinstance(v, dict):
        return {k: _json_safe(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_safe(x) for x in v]
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else ("inf" if v > 0 else "-inf")
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


class Table:
    """Rows plus optional ``# key=value`` metadata lines."""

    def __init__(self, header, rows, meta=None):
        self.header, self.rows, self.meta = list(header), list(rows), dict(meta or {})

    def to_csv(self) -> str:
        lines = [f"# {k}={fmt(v)}" for k, v in self.meta.items()]
        lines.append(",".join(self.header))
        lines.extend(",".join(fmt(v) for v in row) for row in self.rows)
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        body = {"meta": self.meta, "rows": [dict(zip(self.header, r)) for r in self.rows]}
        return json.dumps(_json_safe(body), indent=2) + "\n"


def _emit(args, table: Table):
    text = table.to_json() if args.format == "json" else table.to_csv()
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def load_economy(args) -> Economy:
    inline = {k: getattr(args, k) for k in ("aC", "aI", "b", "d", "delta")}
    given = [k for k, v in inline.items() if v is not None]
    if args.economy is not None:
        if given:
            raise ValidationError("economy", "give either --economy or inline flags, not both")
        try:
            text = Path(args.economy).read_text(encoding="utf-8")
        except OSError as exc:
            raise ValidationError("economy", str(exc)) from None
        return Economy.from_json(text)
    missing = [k for k, v in inline.items() if v is None]
    if missing:
        raise ValidationError(missing[0], "missing (pass all of --aC --aI --b --d --delta or --economy)")
    return Economy(inline["aC"], inline["aI"], inline["b"], inline["d"], inline["delta"])


def _positive(name):
    def conv(text):
        try:
            v = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be a number") from None
        if not (math.isfinite(v) and v > 0):
            raise argparse.ArgumentTypeError(f"{name} must be finite and > 0")
        return v

    return conv


def cmd_info(args) -> int:
    e = load_economy(args)
    meta = dict(e.to_dict())
    meta.update(model.derive_params(e).to_dict())
    meta["circulating"] = e.circulating
    meta["delta_normal"] = model.is_delta_normal(e)
    try:
        r = classify(e)
        meta["regime"] = r.label()
        if r.n0 is not None:
            meta["n0"] = r.n0
    except EnumerationCapError as exc:
        meta["regime"] = f"unresolved: {exc}"
    _emit(args, Table(["key", "value"], meta.items()))
    return EXIT_OK


def cmd_thresholds(args) -> int:
    e = load_economy(args)
    count = args.n if e.a_C < e.a_I else 1
    rows = [(n, mu_n(e, n), x_n(e, n) if e.a_C < e.a_I else e.a_C) for n in range(count)]
    meta = {"zeta": model.zeta(e), "theta": model.theta(e), "inv_theta": model.inv_theta(e), "mu0": model.mu0(e)}
    _emit(args, Table(["n", "mu_n", "x_n"], rows, meta))
    return EXIT_OK


def cmd_policy(args) -> int:
    e = load_economy(args)
    p = optimal_policy(e)
    rows = [(q.lo, q.hi, q.lower.alpha, q.lower.beta, q.upper.alpha, q.upper.beta) for q in p.pieces]
    meta = {"regime": classify(e).label(), "source": p.source, "function": p.is_function}
    header = ["lo", "hi", "lower_alpha", "lower_beta", "upper_alpha", "upper_beta"]
    _emit(args, Table(header, rows, meta))
    return EXIT_OK


def cmd_value(args) -> int:
    e = load_economy(args)
    if not args.x_min < args.x_max:
        raise ValidationError("x-min", "must be below --x-max")
    W = closed_form_value(e)
    if args.log:
        xs = np.geomspace(args.x_min, args.x_max, args.points)
    else:
        xs = np.linspace(args.x_min, args.x_max, args.points)
    _emit(args, Table(["x", "W"], zip(xs, W(xs)), {"regime": classify(e).label(), "family": W.family}))
    return EXIT_OK


def cmd_simulate(args) -> int:
    e = load_economy(args)
    t = simulate(e, args.x0, args.T, args.selection)
    rows = [
        (i, t.states[i], t.outputs[i], t.utilities[i], t.investment_flags[i]) for i in range(t.horizon)
    ]
    rows.append((t.horizon, t.states[-1], None, None, None))
    extinct, periods, hit = extinction_stats(t)
    meta = {
        "regime": classify(e).label(),
        "selection": t.selection,
        "investment_periods": periods,
        "extinct_at": hit,
        "discounted_total": t.discounted_total,
    }
    _emit(args, Table(["t", "x", "y", "u", "invests"], rows, meta))
    return EXIT_OK


def cmd_verify(args) -> int:
    e = load_economy(args)
    optimal_policy(e)  # fail fast on regimes without closed forms
    x_max = args.x_max if args.x_max is not None else 2.0 * required_span(e)
    cfg = OracleConfig(x_max, args.grid, args.tol_vi, args.max_iter)
    o = value_iteration(e, cfg)
    report = compare(e, o)
    ok = report.within(args.value_tol, args.policy_cells)
    meta = {"regime": classify(e).label(), "iterations": o.iterations, "final_delta": o.final_delta}
    meta.update(report.to_dict())
    meta["pass"] = ok
    _emit(args, Table(["key", "value"], meta.items()))
    if args.dump:
        w, lo, hi = closed_form_on_grid(e, o)
        rows = zip(o.grid, o.value, w, o.policy, lo, hi)
        text = Table(["x", "V_oracle", "W_closed", "g_oracle", "g_closed_lo", "g_closed_hi"], rows).to_csv()
        with open(args.dump, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    return EXIT_OK if ok else EXIT_GAP


def cmd_sweep(args) -> int:
    e = load_economy(args)
    if not 0 < args.delta_min <= args.delta_max < 1:
        raise ValidationError("delta-min", "need 0 < delta-min <= delta-max < 1")
    deltas = np.linspace(args.delta_min, args.delta_max, args.steps)
    rows = [(r.delta, r.regime, r.n, r.investment_periods, r.time_to_eps) for r in sweep(e, deltas, args.x0, args.T)]
    header = ["delta", "regime", "n_regime", "investment_periods", "time_to_eps"]
    _emit(args, Table(header, rows, {"x0": args.x0, "T": args.T}))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    g = common.add_argument_group("economy")
    g.add_argument("--aC", type=float, help="capital per unit of consumption good")
    g.add_argument("--aI", type=float, help="capital per unit of labor in the investment sector")
    g.add_argument("--b", type=float, help="investment good output per unit of labor")
    g.add_argument("--d", type=float, help="depreciation rate in (0, 1]")
    g.add_argument("--delta", type=float, help="discount factor in (0, 1)")
    g.add_argument("--economy", metavar="PATH", help="JSON file with keys a_C, a_I, b, d, delta")
    common.add_argument("--out", metavar="PATH", help="write output here instead of stdout")
    common.add_argument("--format", choices=("csv", "json"), default="csv")

    parser = _Parser(prog="matchbox", description="Optimal policies of the two-sector Leontief growth model.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("info", parents=[common], help="derived parameters and regime")
    p.set_defaults(func=cmd_info)

    p = sub.add_parser("thresholds", parents=[common], help="table of mu_n and x_n")
    p.add_argument("--n", type=int, default=5, help="number of rows (n = 0 .. N-1)")
    p.set_defaults(func=cmd_thresholds)

    p = sub.add_parser("policy", parents=[common], help="piecewise-affine optimal policy")
    p.set_defaults(func=cmd_policy)

    p = sub.add_parser("value", parents=[common], help="closed-form value function samples")
    p.add_argument("--x-min", type=_positive("--x-min"), default=1e-3)
    p.add_argument("--x-max", type=_positive("--x-max"), default=3.0)
    p.add_argument("--points", type=int, default=101)
    p.add_argument("--log", action="store_true", help="log-spaced samples")
    p.set_defaults(func=cmd_value)

    p = sub.add_parser("simulate", parents=[common], help="optimal program from x0")
    p.add_argument("--x0", type=_positive("--x0"), required=True)
    p.add_argument("--T", type=int, default=50)
    p.add_argument("--selection", choices=("upper", "lower", "turnpike"))
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", parents=[common], help="compare closed forms with value iteration")
    p.add_argument("--grid", type=int, default=4001, help="number of grid nodes")
    p.add_argument("--x-max", type=_positive("--x-max"), help="grid upper bound")
    p.add_argument("--tol-vi", type=_positive("--tol-vi"), default=1e-10)
    p.add_argument("--max-iter", type=int, default=20000)
    p.add_argument("--value-tol", type=_positive("--value-tol"), default=5e-3)
    p.add_argument("--policy-cells", type=_positive("--policy-cells"), default=1.0)
    p.add_argument("--dump", metavar="PATH", help="CSV of oracle and closed form per node")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sweep", parents=[common], help="regime and extinction statistics over delta")
    p.add_argument("--delta-min", type=float, required=True)
    p.add_argument("--delta-max", type=float, required=True)
    p.add_argument("--steps", type=int, default=50)
    p.add_argument("--x0", type=_positive("--x0"), required=True)
    p.add_argument("--T", type=int, default=200)
    p.set_defaults(func=cmd_sweep)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        for name in ("n", "points", "T", "steps"):
            if getattr(args, name, 1) is not None and getattr(args, name, 1) < 1:
                raise ValidationError(name, "must be >= 1")
        return args.func(args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INVALID
    except (ValidationError, DomainError, BracketError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (UnsupportedRegimeError, EnumerationCapError) as exc:
        print(f"unsupported regime: {exc}", file=sys.stderr)
        return EXIT_UNSUPPORTED


def main(argv=None) -> int:
    return run(argv)


if __name__ == "__main__":
    sys.exit(main())
