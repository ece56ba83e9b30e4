"""Command-line front end.

    qstancu eval       --f e1 --n 5 --q 1/2 --alpha 1/4 --grid 5 --mode exact
    qstancu eval       --limit --f e2 --q 1/2 --alpha 1/4 --x 1/2
    qstancu moments    --n 4 --m 0..4 --mode exact
    qstancu moments    --limit --m 0..6
    qstancu crosscheck --suite basis --mode exact
    qstancu converge   --f exp --n-max 40

Tables go to stdout (or ``--out``) as CSV or JSON.  Exact values are
written as ``p/q`` strings.  Exit codes: 0 success, 1 a requested check
failed, 2 usage or parse error.  ``QSTANCU_THREADS`` caps the worker count
used for grid evaluation (0 or unset means one per CPU).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from . import limitop, qcore, stancu
from .numerics import DEFAULT_TOLERANCE, QStancuError, ScalarKind, same

EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE = 0, 1, 2

SWEEP_Q = ("1/4", "1/2", "3/4")
SWEEP_ALPHA = ("0", "1/4", "1", "3")


class ParseError(QStancuError, ValueError):
    pass


class ModeMismatch(QStancuError, ValueError):
    pass


# --------------------------------------------------------------------------
# config parsing

def parse_scalar(text: str, mode: ScalarKind):
    """``"1/2"`` and integers parse exactly; decimals are floats in float
    mode and exact decimal fractions in exact mode."""
    text = str(text).strip()
    try:
        if mode is ScalarKind.EXACT or "/" in text or text.lstrip("+-").isdigit():
            value = Fraction(text)
        else:
            value = float(text)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"cannot parse {text!r} as a number") from None
    if isinstance(value, float) and not math.isfinite(value):
        raise ParseError(f"non-finite value {text!r}")
    return value if mode is ScalarKind.EXACT else float(value)


def parse_grid(text: str, mode: ScalarKind) -> list:
    """A point count (``"5"`` -> 0, 1/4, ..., 1) or an explicit comma list."""
    text = str(text).strip()
    if "," not in text and text.isdigit():
        count = int(text)
        if count < 2:
            raise ParseError("a grid count must be at least 2")
        return [parse_scalar(f"{j}/{count - 1}", mode) for j in range(count)]
    return [parse_scalar(part, mode) for part in text.split(",") if part.strip()]


def parse_orders(text: str) -> list[int]:
    """``"0..4"``, ``"3"`` or ``"0,2,5"``."""
    text = str(text).strip()
    try:
        if ".." in text:
            lo, hi = text.split("..")
            out = list(range(int(lo), int(hi) + 1))
        else:
            out = [int(part) for part in text.split(",")]
    except ValueError:
        raise ParseError(f"bad moment range {text!r}") from None
    if not out or min(out) < 0:
        raise ParseError(f"bad moment range {text!r}")
    return out


@dataclass
class RunConfig:
    command: str
    q: list
    alpha: list
    mode: ScalarKind = ScalarKind.FLOAT
    n: int | None = None
    n_max: int | None = None
    function: str = "e2"
    grid: list = field(default_factory=list)
    orders: list = field(default_factory=list)
    limit: bool = False
    suite: str = "all"
    representation: str = "auto"
    tail_tol: float = 1e-10
    output: str = "csv"
    out_path: str | None = None
    q_given: bool = False
    alpha_given: bool = False

    def params(self) -> qcore.QParams:
        return qcore.QParams(self.q[0], self.alpha[0], self.mode)

    def echo(self) -> dict:
        d = asdict(self)
        d["mode"] = self.mode.value
        return {k: _jsonable(v) for k, v in d.items()}


def _jsonable(value):
    if isinstance(value, list):
        return [_jsonable(v) for v in value]
    if isinstance(value, Fraction):
        return str(value)
    return value


def build_config(ns: argparse.Namespace) -> RunConfig:
    mode = ScalarKind.parse(ns.mode)
    cfg = RunConfig(
        command=ns.command,
        q=[parse_scalar(v, mode) for v in str(ns.q or "1/2").split(",")],
        alpha=[parse_scalar(v, mode) for v in str(ns.alpha or "1/4").split(",")],
        q_given=ns.q is not None,
        alpha_given=ns.alpha is not None,
        mode=mode,
        n=getattr(ns, "n", None),
        n_max=getattr(ns, "n_max", None),
        function=getattr(ns, "f", "e2"),
        limit=getattr(ns, "limit", False),
        suite=getattr(ns, "suite", "all"),
        representation=getattr(ns, "representation", "auto"),
        output=ns.output,
        out_path=ns.out,
    )
    cfg.tail_tol = float(parse_scalar(ns.tail_tol, ScalarKind.FLOAT))
    if not cfg.tail_tol > 0:
        raise ParseError("--tail-tol must be positive")
    if getattr(ns, "x", None) is not None:
        cfg.grid = parse_grid(ns.x if "," in str(ns.x) else f"{ns.x},", mode)
    elif getattr(ns, "grid", None) is not None:
        cfg.grid = parse_grid(ns.grid, mode)
    if getattr(ns, "m", None) is not None:
        cfg.orders = parse_orders(ns.m)
    for x in cfg.grid:
        if not 0 <= x <= 1:
            raise ParseError(f"grid point {x} outside [0, 1]")
    return cfg


# --------------------------------------------------------------------------
# result tables

def _cell(value):
    return str(value) if isinstance(value, Fraction) else value


@dataclass
class ResultTable:
    columns: list
    rows: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)
    certificates: dict = field(default_factory=dict)
    failed: bool = False

    def add(self, *values):
        if len(values) != len(self.columns):
            raise ValueError("row width does not match the columns")
        self.rows.append([_cell(v) for v in values])

    def to_obj(self) -> dict:
        return {
            "config": self.metadata,
            "columns": list(self.columns),
            "rows": self.rows,
            "certificates": self.certificates,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_obj(), indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow(["" if v is None else _csv_text(v) for v in row])
        return buf.getvalue()

    def render(self, fmt: str) -> str:
        return self.to_json() + "\n" if fmt == "json" else self.to_csv()


def _csv_text(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


# --------------------------------------------------------------------------
# workers

def worker_count() -> int:
    raw = os.environ.get("QSTANCU_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise ParseError(f"QSTANCU_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise ParseError("QSTANCU_THREADS must be >= 0")
    return n or (os.cpu_count() or 1)


@contextmanager
def grid_map():
    """Order-preserving map over grid points."""
    workers = worker_count()
    if workers == 1:
        yield map
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        yield pool.map


# --------------------------------------------------------------------------
# commands

def _require_float(cfg: RunConfig, what: str):
    if cfg.mode is ScalarKind.EXACT:
        raise ModeMismatch(f"{what} evaluates infinite series and is not available with --mode exact")


def _function(cfg: RunConfig) -> stancu.SampledFunction:
    f = stancu.parse_function(cfg.function)
    if cfg.mode is ScalarKind.EXACT and not f.exact:
        raise ModeMismatch(f"function {cfg.function!r} needs float evaluation; use --mode float")
    return f


def _grid(cfg: RunConfig, default: str = "9"):
    return cfg.grid or parse_grid(default, cfg.mode)


def cmd_eval(cfg: RunConfig) -> ResultTable:
    f = _function(cfg)
    params = cfg.params()
    xs = _grid(cfg)
    if cfg.limit:
        _require_float(cfg, "eval --limit")
        table = ResultTable(["x", "value", "tail_bound", "terms_used", "endpoint_switch"])
        with grid_map() as mapper:
            results = list(mapper(lambda x: limitop.limit_apply(params, f, x, cfg.tail_tol), xs))
        for x, ev in zip(xs, results):
            table.add(x, ev.value, ev.tail_bound, ev.terms_used, ev.endpoint_switch)
        table.certificates = {"max_tail_bound": max(ev.tail_bound for ev in results)}
        return table
    if cfg.n is None:
        raise ParseError("eval needs --n (or --limit)")
    table = ResultTable(["x", "value"])
    with grid_map() as mapper:
        values = list(mapper(lambda x: stancu.apply(params, cfg.n, f, x, cfg.representation), xs))
    for x, v in zip(xs, values):
        table.add(x, v)
    return table


def cmd_moments(cfg: RunConfig) -> ResultTable:
    params = cfg.params()
    xs = _grid(cfg)
    orders = cfg.orders or list(range(5))
    if cfg.limit:
        _require_float(cfg, "moments --limit")
        table = ResultTable(
            ["x", "m", "series", "tail_bound", "formula", "closed_form", "recurrence", "recurrence_binomial", "agrees"]
        )
        # the general formula is a finite rational expression; evaluating it
        # on the exact binary values of the inputs gives a rounding-free
        # reference for the certified series
        exact = qcore.QParams(Fraction(params.q), Fraction(params.alpha))
        for x in xs:
            for m in orders:
                ev = limitop.limit_apply(params, stancu.monomial(m), x, cfg.tail_tol)
                reference = limitop.limit_moment_general(exact, m, Fraction(x))
                formula = float(reference)
                closed = limitop.limit_moment_closed_form(params, m, x) if m <= 2 else None
                rec = limitop.limit_recurrence(params, m - 1, x) if m else None
                rec_b = limitop.limit_recurrence_binomial(params, m - 1, x) if m else None
                ok = abs(Fraction(ev.value) - reference) <= ev.tail_bound and all(
                    v is None or same(v, formula) for v in (closed, rec, rec_b)
                )
                table.failed |= not ok
                table.add(x, m, ev.value, ev.tail_bound, formula, closed, rec, rec_b, ok)
        return table
    if cfg.n is None:
        raise ParseError("moments needs --n (or --limit)")
    n = cfg.n
    table = ResultTable(["x", "m", "direct", "closed_form", "rec1", "rec2", "agrees"])
    for x in xs:
        for m in orders:
            direct = stancu.apply(params, n, stancu.monomial(m), x)
            closed = stancu.moment_closed_form(params, n, m, x) if m <= 2 else None
            rec1 = stancu.moment_recurrence_binomial(params, n, m - 1, x) if m else None
            rec2 = stancu.moment_recurrence_videnskii(params, n, m - 1, x) if m else None
            ok = all(v is None or same(v, direct) for v in (closed, rec1, rec2))
            table.failed |= not ok
            table.add(x, m, direct, closed, rec1, rec2, ok)
    return table


class _Tally:
    def __init__(self):
        self.counts = {}

    def record(self, identity: str, ok: bool):
        checked, passed = self.counts.get(identity, (0, 0))
        self.counts[identity] = (checked + 1, passed + bool(ok))


def _sweep(cfg: RunConfig):
    qs = cfg.q if cfg.q_given else [parse_scalar(v, cfg.mode) for v in SWEEP_Q]
    alphas = cfg.alpha if cfg.alpha_given else [parse_scalar(v, cfg.mode) for v in SWEEP_ALPHA]
    for q in qs:
        for a in alphas:
            yield qcore.QParams(q, a, cfg.mode)


def _suite_basis(cfg, tally, xs, n_max):
    for params in _sweep(cfg):
        for n in range(1, n_max + 1):
            for x in xs:
                prod = stancu.basis_product_form(params, n, x)
                tally.record("partition_of_unity", same(prod.total(), 1))
                tally.record("positivity", all(v >= 0 for v in prod))
                if x + params.gamma == 0:
                    tally.record("degenerate_point_delta", list(prod) == [1] + [0] * n)
                    continue
                poch = stancu.basis_pochhammer_form(params, n, x)
                tally.record("product_eq_pochhammer", all(same(a, b) for a, b in zip(prod, poch)))
                tally.record("rising_product_gamma_form", all(
                    same(stancu.rising_product_x(params, x, k),
                         (x + params.gamma) ** k * qcore.q_pochhammer(params.gamma / (x + params.gamma), params.q, k))
                    for k in range(n + 1)))
                r = (x + params.gamma) / (1 + params.gamma)
                tally.record("falling_product_gamma_form", all(
                    same(stancu.falling_product_x(params, x, j),
                         (1 + params.gamma) ** j * qcore.q_pochhammer(r, params.q, j))
                    for j in range(n + 1)))


def _suite_basrec(cfg, tally, xs, n_max):
    for params in _sweep(cfg):
        for n in range(1, n_max + 1):
            for x in xs:
                for k in range(n + 1):
                    name = "basis_recurrence_k_eq_n" if k == n else "basis_recurrence"
                    tally.record(name, stancu.basis_recurrence_check(params, n, k, x))


def _suite_moments(cfg, tally, xs, n_max):
    for params in _sweep(cfg):
        for n in range(1, n_max + 1):
            for x in xs:
                direct = [stancu.apply(params, n, stancu.monomial(m), x) for m in range(6)]
                for m in range(3):
                    tally.record(f"closed_form_e{m}", same(direct[m], stancu.moment_closed_form(params, n, m, x)))
                for m in range(5):
                    tally.record("recurrence_binomial",
                                 same(direct[m + 1], stancu.moment_recurrence_binomial(params, n, m, x)))
                    tally.record("recurrence_videnskii",
                                 same(direct[m + 1], stancu.moment_recurrence_videnskii(params, n, m, x)))


def _suite_limit(cfg, tally, xs, n_max):
    for params in _sweep(cfg):
        for x in xs:
            general = [limitop.limit_moment_general(params, m, x) for m in range(7)]
            for m in range(3):
                tally.record(f"limit_closed_form_e{m}", same(general[m], limitop.limit_moment_closed_form(params, m, x)))
            for m in range(6):
                tally.record("limit_recurrence", same(general[m + 1], limitop.limit_recurrence(params, m, x)))
                tally.record("limit_recurrence_binomial",
                             same(general[m + 1], limitop.limit_recurrence_binomial(params, m, x)))


def _suite_identities(cfg, tally, xs, n_max):
    rng = random.Random(20240101)
    for _ in range(200):
        a, b = Fraction(rng.randint(-9, 9), rng.randint(1, 9)), Fraction(rng.randint(-9, 9), rng.randint(1, 9))
        q = Fraction(rng.randint(1, 8), 9)
        n = rng.randint(0, 10)
        if cfg.mode is ScalarKind.FLOAT:
            a, b, q = float(a), float(b), float(q)
        tally.record("product_identity", qcore.verify_product_identity(a, b, q, n))
    for _ in range(50):
        a, x, q = rng.uniform(0.0, 1.0), rng.uniform(0.0, 0.9), rng.uniform(0.05, 0.9)
        tally.record("q_binomial_theorem", q_binomial_theorem_agrees(a, x, q, cfg.tail_tol))


def q_binomial_theorem_agrees(a: float, x: float, q: float, tail_tol: float = 1e-12) -> bool:
    """Both sides of the q-binomial theorem agree within their certificates."""
    lhs, lcert = qcore.q_binomial_theorem_series(a, x, q, tail_tol)
    num, ncert = qcore.q_pochhammer_infinite(a * x, q, tail_tol)
    den, dcert = qcore.q_pochhammer_infinite(x, q, tail_tol)
    rhs, rbound = qcore.ratio_with_bound(num, ncert.tail_bound, den, dcert.tail_bound)
    slack = DEFAULT_TOLERANCE.relative * max(abs(lhs), abs(rhs))
    return abs(lhs - rhs) <= lcert.tail_bound + rbound + slack


SUITES = {
    "basis": _suite_basis,
    "basrec": _suite_basrec,
    "moments": _suite_moments,
    "limit": _suite_limit,
    "identities": _suite_identities,
}


def cmd_crosscheck(cfg: RunConfig) -> ResultTable:
    names = list(SUITES) if cfg.suite == "all" else [cfg.suite]
    xs = _grid(cfg)
    n_max = cfg.n_max or 8
    tally = _Tally()
    for name in names:
        SUITES[name](cfg, tally, xs, n_max)
    table = ResultTable(["identity", "checked", "passed", "failed"])
    for identity, (checked, passed) in tally.counts.items():
        table.add(identity, checked, passed, checked - passed)
        table.failed |= passed != checked
    return table


def cmd_converge(cfg: RunConfig) -> ResultTable:
    _require_float(cfg, "converge")
    f = _function(cfg)
    params = cfg.params()
    xs = cfg.grid or parse_grid("33", cfg.mode)
    n_max = cfg.n_max or 40
    with grid_map() as mapper:
        result = limitop.convergence_experiment(params, f, n_max, xs, cfg.tail_tol, map_fn=mapper)
    fixed = f.kind == "monomial" and f.name in ("e0", "e1")
    quadratic = f.kind == "monomial" and f.name == "e2"
    columns = ["n", "sup_error"] + (["analytic_gap", "gap_diff"] if quadratic else [])
    table = ResultTable(columns)
    slack = 1e-12
    for n, err in result.rows():
        if quadratic:
            gap = max(abs(limitop.e2_gap(params, n, x)) for x in xs)
            diff = abs(err - gap)
            table.failed |= diff > slack + result.tail_bound
            table.add(n, err, gap, diff)
        else:
            table.failed |= fixed and err > result.tail_bound + slack
            table.add(n, err)
    table.certificates = {"max_tail_bound": result.tail_bound}
    table.metadata["decreasing_from_n4"] = result.decreasing_from(4)
    return table


COMMANDS = {
    "eval": cmd_eval,
    "moments": cmd_moments,
    "crosscheck": cmd_crosscheck,
    "converge": cmd_converge,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--q", default=None, help="q in (0,1); '1/2' or '0.5' (crosscheck: comma list)")
    common.add_argument("--alpha", default=None, help="alpha >= 0 (crosscheck: comma list)")
    common.add_argument("--mode", default="float", choices=["exact", "float"])
    common.add_argument("--tail-tol", default=None, help="series truncation tolerance (1e-10; converge 1e-13)")
    common.add_argument("--output", default="csv", choices=["csv", "json"])
    common.add_argument("--out", default=None, help="write the table here instead of stdout")
    common.add_argument("--grid", default=None, help="point count or comma list of points in [0,1]")
    common.add_argument("--x", default=None, help="single point (overrides --grid)")

    parser = argparse.ArgumentParser(prog="qstancu", description="q-Stancu operator toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", parents=[common], help="evaluate S_n(f; x) or the limit operator")
    p.add_argument("--f", default="e2", help="eN, poly:c0,c1,..., exp, sin, absshift:c")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--limit", action="store_true")
    p.add_argument("--representation", default="auto", choices=["auto", "product", "pochhammer"])

    p = sub.add_parser("moments", parents=[common], help="moment table with recurrence cross-checks")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--m", default="0..4", help="orders: '0..4', '2' or '0,2,5'")
    p.add_argument("--limit", action="store_true")

    p = sub.add_parser("crosscheck", parents=[common], help="identity sweeps with pass/fail counts")
    p.add_argument("--suite", default="all", choices=["all", *SUITES])
    p.add_argument("--n-max", type=int, default=8)

    p = sub.add_parser("converge", parents=[common], help="sup-error of S_n against the limit operator")
    p.add_argument("--f", default="e2")
    p.add_argument("--n-max", type=int, default=40)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    if ns.tail_tol is None:
        ns.tail_tol = "1e-13" if ns.command == "converge" else "1e-10"
    try:
        cfg = build_config(ns)
        table = COMMANDS[cfg.command](cfg)
    except (QStancuError, ValueError) as exc:
        print(f"qstancu {ns.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    table.metadata = {**cfg.echo(), **table.metadata}
    text = table.render(cfg.output)
    if cfg.out_path:
        with open(cfg.out_path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return EXIT_CHECK_FAILED if table.failed else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
