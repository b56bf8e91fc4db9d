"""Couplings between finite probability vectors.

Vertex enumeration of the transportation polytope, the classic seed
couplings, and the 2x2 cycle moves used for deterministic local search.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Sequence

from .core import fmt, to_rational
from .errors import InvalidCoupling

Q = Fraction


@dataclass(frozen=True)
class Coupling:
    matrix: tuple[tuple[Fraction, ...], ...]

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence]) -> "Coupling":
        return cls(tuple(tuple(to_rational(x) for x in row) for row in rows))

    @classmethod
    def from_cells(cls, n: int, m: int, cells: dict[tuple[int, int], Fraction]) -> "Coupling":
        rows = [[Q(0)] * m for _ in range(n)]
        for (i, j), v in cells.items():
            rows[i][j] += v
        return cls(tuple(tuple(r) for r in rows))

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.matrix), len(self.matrix[0]) if self.matrix else 0

    def support(self) -> list[tuple[int, int, Fraction]]:
        return [(i, j, v) for i, row in enumerate(self.matrix) for j, v in enumerate(row) if v > 0]

    def transpose(self) -> "Coupling":
        return Coupling(tuple(zip(*self.matrix)))

    def to_json(self) -> list[list[str]]:
        return [[fmt(v) for v in row] for row in self.matrix]


def check_coupling(pi: Coupling, mu: Sequence[Fraction], nu: Sequence[Fraction]) -> None:
    n, m = len(mu), len(nu)
    if len(pi.matrix) != n or any(len(row) != m for row in pi.matrix):
        raise InvalidCoupling(f"coupling must be {n}x{m}")
    for i, row in enumerate(pi.matrix):
        if any(v < 0 for v in row):
            raise InvalidCoupling("negative coupling entry")
        if sum(row) != mu[i]:
            raise InvalidCoupling(f"row {i} sums to {fmt(sum(row))}, expected {fmt(mu[i])}")
    for j in range(m):
        col = sum(pi.matrix[i][j] for i in range(n))
        if col != nu[j]:
            raise InvalidCoupling(f"column {j} sums to {fmt(col)}, expected {fmt(nu[j])}")


def north_west_corner(mu, nu) -> Coupling:
    n, m = len(mu), len(nu)
    r, c = list(mu), list(nu)
    cells = {}
    i = j = 0
    while i < n and j < m:
        v = min(r[i], c[j])
        if v > 0:
            cells[(i, j)] = v
        r[i] -= v
        c[j] -= v
        if r[i] == 0:
            i += 1
        else:
            j += 1
    return Coupling.from_cells(n, m, cells)


def greedy_coupling(mu, nu) -> Coupling:
    """Match heaviest points first: rows and columns sorted by weight."""
    rows, cols = range(len(mu)), range(len(nu))
    r, c = list(mu), list(nu)
    cells = {}
    # repeatedly pair the heaviest residual row with the heaviest residual column
    while True:
        live_r = [i for i in rows if r[i] > 0]
        live_c = [j for j in cols if c[j] > 0]
        if not live_r or not live_c:
            break
        i = max(live_r, key=lambda k: (r[k], -k))
        j = max(live_c, key=lambda k: (c[k], -k))
        v = min(r[i], c[j])
        cells[(i, j)] = cells.get((i, j), Q(0)) + v
        r[i] -= v
        c[j] -= v
    return Coupling.from_cells(len(mu), len(nu), cells)


def complete_partial(mu, nu, cells: dict[tuple[int, int], Fraction]) -> Coupling:
    """Extend a sub-coupling (row/col sums <= mu/nu) to a full coupling."""
    n, m = len(mu), len(nu)
    r = [mu[i] - sum(v for (a, _), v in cells.items() if a == i) for i in range(n)]
    c = [nu[j] - sum(v for (_, b), v in cells.items() if b == j) for j in range(m)]
    rest = north_west_corner(r, c) if sum(r) > 0 else None
    merged = dict(cells)
    if rest is not None:
        for i, j, v in rest.support():
            merged[(i, j)] = merged.get((i, j), Q(0)) + v
    return Coupling.from_cells(n, m, merged)


class VertexBudgetExceeded(Exception):
    pass


def _common_denominator(values) -> int:
    den = 1
    for v in values:
        den = lcm(den, Fraction(v).denominator)
    return den


def enumerate_vertices(mu, nu, max_vertices: int = 10_000, max_states: int = 50_000,
                       max_work: int = 150_000) -> list[Coupling]:
    """All vertices of the transportation polytope of (mu, nu).

    Every vertex has a forest support, and a forest has a leaf line whose
    single cell carries min(residual row, residual column). Branching on
    every cell with that min rule therefore reaches every vertex; residual
    states are memoized. Raises VertexBudgetExceeded once there are more
    than ``max_vertices`` vertices, ``max_states`` residual states or
    ``max_work`` partial vertices built.
    The search runs on integers scaled by the common denominator.
    """
    n, m = len(mu), len(nu)
    den = _common_denominator([*mu, *nu])
    r0 = tuple(int(Fraction(x) * den) for x in mu)
    c0 = tuple(int(Fraction(x) * den) for x in nu)
    memo: dict = {}
    work = 0

    def solve(r, c):
        nonlocal work
        key = (r, c)
        if key in memo:
            return memo[key]
        if len(memo) >= max_states:
            raise VertexBudgetExceeded
        rows = [i for i in range(n) if r[i] > 0]
        cols = [j for j in range(m) if c[j] > 0]
        if not rows:
            out = {frozenset()}
        else:
            out = set()
            for i in rows:
                for j in cols:
                    v = min(r[i], c[j])
                    r2, c2 = list(r), list(c)
                    r2[i] -= v
                    c2[j] -= v
                    cell = (i * m + j, v)
                    tails = solve(tuple(r2), tuple(c2))
                    work += len(tails)
                    out.update(tail | {cell} for tail in tails)
                    if len(out) > max_vertices or work > max_work:
                        raise VertexBudgetExceeded
        memo[key] = out
        return out

    flat = []
    for vertex in solve(r0, c0):
        entries = [0] * (n * m)
        for cell, v in vertex:
            entries[cell] = v
        flat.append(entries)
    flat.sort()
    return [
        Coupling(tuple(tuple(Q(e[i * m + j], den) for j in range(m)) for i in range(n)))
        for e in flat
    ]


def cycle_moves(pi: Coupling):
    """Couplings reachable by shifting mass around one 2x2 cycle.

    For support cells (i, j), (k, l) with i != k and j != l, move
    min(pi_ij, pi_kl) onto (i, l) and (k, j). Order is deterministic.
    """
    supp = [(i, j) for i, j, _ in pi.support()]
    rows = [list(r) for r in pi.matrix]
    for x in range(len(supp)):
        i, j = supp[x]
        for y in range(x + 1, len(supp)):
            k, l = supp[y]
            if i == k or j == l:
                continue
            theta = min(rows[i][j], rows[k][l])
            new = [list(r) for r in rows]
            new[i][j] -= theta
            new[k][l] -= theta
            new[i][l] += theta
            new[k][j] += theta
            yield Coupling(tuple(tuple(r) for r in new))
