"""Witness families and small reproducible experiments.

Every report carries its rows as rational strings together with a list of
assertions that point at cells. Loading a report recomputes each verdict
from the rows, so a stored report cannot claim more than it shows.
"""

from __future__ import annotations

import csv
import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial

from .bundle import r_delta
from .core import FiniteMMSpace, fmt, scale, space, to_rational
from .distances import box_bounds
from .errors import EpsOutOfRange, PreconditionError, ReportMismatch, RTooSmall, SinglePointSpace, ValidationError
from .invariants import as_kappa, sep

Q = Fraction

DEFAULT_EPS_SCHEDULE = tuple(Q(1, n) for n in range(2, 65))
DEFAULT_DELTA_GRID = (Q(1, 8), Q(1, 16), Q(1, 32))
DEFAULT_NOISE_SCHEDULE = tuple(Q(1, n) for n in range(2, 11))


# -- witness families --------------------------------------------------------

def _check_eps(eps) -> Fraction:
    eps = to_rational(eps)
    if not 0 < eps < 1:
        raise EpsOutOfRange(f"eps must lie in (0, 1), got {fmt(eps)}")
    return eps


def gen_Y_eps(eps) -> FiniteMMSpace:
    """Two points at distance 1 with weights 1 - eps and eps."""
    eps = _check_eps(eps)
    return space([[0, 1], [1, 0]], [1 - eps, eps], ["y0", "y1"])


def gen_Z_eps(X: FiniteMMSpace, eps, r) -> FiniteMMSpace:
    """X plus a point z of mass eps at distance r from every point of X."""
    eps, r = _check_eps(eps), to_rational(r)
    if r <= 0 or r < X.diameter():
        raise RTooSmall(f"r = {fmt(r)} must be positive and at least diam X = {fmt(X.diameter())}")
    label = "z"
    while label in X.labels:
        label += "'"
    n = X.size
    dist = [list(row) + [r] for row in X.dist] + [[r] * n + [Q(0)]]
    weights = [(1 - eps) * w for w in X.weights] + [eps]
    return space(dist, weights, [*X.labels, label])


# -- reports -----------------------------------------------------------------

_OPS = {"<=": lambda a, b: a <= b, "==": lambda a, b: a == b}


@dataclass
class ExperimentReport:
    """Rows of rational readouts plus assertions about them.

    An assertion is ``{"name", "lhs", "op", "rhs", "verdict"}`` where each
    side is either ``{"row": i, "col": name}`` or ``{"value": "p/q"}``.
    """

    name: str
    columns: list[str]
    rows: list[dict[str, str]] = field(default_factory=list)
    assertions: list[dict] = field(default_factory=list)

    def _operand(self, ref) -> Fraction:
        if "value" in ref:
            return to_rational(ref["value"])
        return to_rational(self.rows[ref["row"]][ref["col"]])

    def evaluate(self, assertion) -> bool:
        op = _OPS[assertion["op"]]
        return op(self._operand(assertion["lhs"]), self._operand(assertion["rhs"]))

    def add_row(self, **cells) -> int:
        self.rows.append({c: _cell(cells[c]) for c in self.columns})
        return len(self.rows) - 1

    def check(self, name: str, lhs, op: str, rhs) -> None:
        assertion = {"name": name, "lhs": lhs, "op": op, "rhs": rhs}
        assertion["verdict"] = self.evaluate(assertion)
        self.assertions.append(assertion)

    @property
    def passed(self) -> bool:
        return all(a["verdict"] for a in self.assertions)

    def failures(self) -> list[str]:
        return [a["name"] for a in self.assertions if not a["verdict"]]

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "columns": list(self.columns),
            "rows": [dict(r) for r in self.rows],
            "assertions": [dict(a) for a in self.assertions],
            "passed": self.passed,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2)

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.DictWriter(out, fieldnames=self.columns, lineterminator="\n")
        writer.writeheader()
        writer.writerows(self.rows)
        return out.getvalue()

    @classmethod
    def from_json(cls, doc: dict) -> "ExperimentReport":
        """Load a report, recomputing every verdict from its rows."""
        try:
            report = cls(doc["name"], list(doc["columns"]), [dict(r) for r in doc["rows"]])
            for a in doc["assertions"]:
                fresh = report.evaluate(a)
                if fresh != a["verdict"]:
                    raise ReportMismatch(f"assertion {a['name']!r} is stored as {a['verdict']} but evaluates to {fresh}")
                report.assertions.append(dict(a))
        except (KeyError, IndexError, TypeError) as exc:
            raise ValidationError(f"malformed report: {exc}") from None
        return report


def _cell(value) -> str:
    if isinstance(value, str):
        return value
    return fmt(value)


def cell(row: int, col: str) -> dict:
    return {"row": row, "col": col}


def literal(value) -> dict:
    return {"value": fmt(to_rational(value))}


def _map(fn, items, jobs: int):
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# -- non-Urysohn witness -----------------------------------------------------

def _non_urysohn_cell(X: FiniteMMSpace, pair):
    eps, r = pair
    Z = gen_Z_eps(X, eps, r)
    collapse = box_bounds(scale(Z, 1 / r), gen_Y_eps(eps)).upper
    approach = box_bounds(Z, X).upper
    return collapse, approach


def run_non_urysohn(X: FiniteMMSpace, eps_list, r_list, jobs: int = 1) -> ExperimentReport:
    """Z_eps is box-close to X, while Z_eps scaled by 1/r is close to Y_eps.

    So every neighbourhood of X and every neighbourhood of the orbit of Y_eps
    meet after rescaling, the two-sided approach behind the failure of
    separation in the quotient.
    """
    if X.size < 2:
        raise SinglePointSpace("the experiment needs a space with at least two points")
    eps_list = [_check_eps(e) for e in eps_list]
    r_list = [to_rational(r) for r in r_list]
    pairs = [(e, r) for e in eps_list for r in r_list]
    results = _map(partial(_non_urysohn_cell, X), pairs, jobs)
    diam = X.diameter()
    report = ExperimentReport(
        "non-urysohn", ["eps", "r", "box_scaled_Z_Y", "diam_over_r", "box_Z_X"])
    for (eps, r), (collapse, approach) in zip(pairs, results):
        k = report.add_row(eps=eps, r=r, box_scaled_Z_Y=collapse, diam_over_r=diam / r, box_Z_X=approach)
        report.check(f"collapse eps={fmt(eps)} r={fmt(r)}", cell(k, "box_scaled_Z_Y"), "<=", cell(k, "diam_over_r"))
        report.check(f"approach eps={fmt(eps)} r={fmt(r)}", cell(k, "box_Z_X"), "<=", cell(k, "eps"))
    return report


# -- limit formula -----------------------------------------------------------

def _sep_cell(kappa, pair):
    Xn, delta = pair
    return sep(Xn, kappa.shifted(-delta))


def run_limit_formula(X: FiniteMMSpace, kappa, eps_schedule=DEFAULT_EPS_SCHEDULE,
                      delta_grid=None, r=None, sequence=None,
                      jobs: int = 1) -> ExperimentReport:
    """Sep of a box-convergent sequence at kappa - delta, n -> oo then delta -> 0.

    By default the sequence is ``gen_Z_eps(X, eps_n, r)`` with r = diam X;
    an explicit ``sequence`` of spaces may be passed instead. The inner
    liminf is read as the minimum over the second half of the sequence.
    The default delta grid keeps the entries of DEFAULT_DELTA_GRID below
    min kappa, halving further when none is.
    """
    kappa = as_kappa(kappa)
    smallest = min(kappa)
    if delta_grid is None:
        delta_grid = [d for d in DEFAULT_DELTA_GRID if d < smallest]
        if not delta_grid:
            delta_grid = [smallest / 2, smallest / 4, smallest / 8]
    deltas = sorted((to_rational(d) for d in delta_grid), reverse=True)
    if not deltas or deltas[-1] <= 0 or deltas[0] >= smallest:
        raise PreconditionError("every delta must satisfy 0 < delta < min kappa")
    if sequence is None:
        r = X.diameter() if r is None else to_rational(r)
        eps_schedule = [_check_eps(e) for e in eps_schedule]
        sequence = [gen_Z_eps(X, e, r) for e in eps_schedule]
    else:
        sequence = list(sequence)
        eps_schedule = [None] * len(sequence)
    cells = [(Xn, d) for Xn in sequence for d in deltas]
    values = _map(partial(_sep_cell, kappa), cells, jobs)

    report = ExperimentReport("limit-formula", ["n", "eps", "delta", "sep"])
    for k, (Xn, d) in enumerate(cells):
        n = k // len(deltas)
        eps = eps_schedule[n]
        report.add_row(n=str(n + 1), eps="-" if eps is None else eps, delta=d, sep=values[k])
    tail_start = len(sequence) // 2
    last = None
    for j, d in enumerate(deltas):
        tail = [values[n * len(deltas) + j] for n in range(tail_start, len(sequence))]
        last = report.add_row(n="liminf", eps="-", delta=d, sep=min(tail))
    target = sep(X, kappa)
    report.check("limit at the finest delta equals Sep(X; kappa)", cell(last, "sep"), "==", literal(target))
    return report


# -- scale recovery ----------------------------------------------------------

def run_scale_recovery(X: FiniteMMSpace, t, noise_schedule=DEFAULT_NOISE_SCHEDULE) -> ExperimentReport:
    """Read the scale back from r_Delta and from Sep along X_n -> X."""
    if X.size < 2:
        raise SinglePointSpace("the experiment needs a space with at least two points")
    t = to_rational(t)
    delta = (1 + X.max_atom()) / 2
    report = ExperimentReport("scale-recovery", ["n", "eps", "delta", "t_n", "sep_ratio", "t"])
    for n, eps in enumerate(noise_schedule, start=1):
        Xn = gen_Z_eps(X, eps, X.diameter())
        tXn = scale(Xn, t)
        t_n = r_delta(tXn, delta) / r_delta(Xn, delta)
        m = min(Xn.weights)
        kappa = (m, m)
        ratio = sep(tXn, kappa) / sep(Xn, kappa)
        k = report.add_row(n=str(n), eps=eps, delta=delta, t_n=t_n, sep_ratio=ratio, t=t)
        report.check(f"t_{n} = t", cell(k, "t_n"), "==", cell(k, "t"))
        report.check(f"sep ratio {n} = t", cell(k, "sep_ratio"), "==", cell(k, "t"))
    return report
