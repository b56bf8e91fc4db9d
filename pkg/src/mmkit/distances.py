"""Measure distances on a common space and certified bounds for the box distance."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .core import FiniteMMSpace, find_isomorphism, fmt, scale, to_rational
from .couplings import (
    Coupling,
    VertexBudgetExceeded,
    _common_denominator,
    check_coupling,
    complete_partial,
    cycle_moves,
    enumerate_vertices,
    greedy_coupling,
    north_west_corner,
)
from .errors import DimensionMismatch, DomainMismatch
from .graphs import FlowNetwork, max_weight_clique
from .invariants import partial_diam_profile, sep, sep_from_slacks, sep_slacks

Q = Fraction

LOCAL_SEARCH_ITERATIONS = 1000
SEP_BOUND_KAPPAS = [Q(1, 10), Q(1, 5), Q(1, 4), Q(3, 10), Q(2, 5), Q(1, 2)]


def _measures(mu, nu, X: FiniteMMSpace):
    mu = [to_rational(x) for x in mu]
    nu = [to_rational(x) for x in nu]
    if len(mu) != X.size or len(nu) != X.size:
        raise DimensionMismatch(f"measures must have {X.size} entries")
    for vec in (mu, nu):
        if any(x < 0 for x in vec) or sum(vec) != 1:
            raise DimensionMismatch("measures must be nonnegative and sum to 1")
    return mu, nu


def tv(mu, nu, X: FiniteMMSpace) -> Fraction:
    mu, nu = _measures(mu, nu, X)
    return sum((abs(a - b) for a, b in zip(mu, nu)), Q(0)) / 2


# -- Prokhorov ---------------------------------------------------------------

def _matched_flow(mu, nu, X: FiniteMMSpace, radius) -> tuple[Fraction, dict]:
    """Max flow of nu-mass onto mu-mass along pairs at distance <= radius.

    Returns the flow value and the moved mass as cells ``(mu_index,
    nu_index) -> mass``.
    """
    n = X.size
    net = FlowNetwork(2 * n + 2)
    src, snk = 2 * n, 2 * n + 1
    for j in range(n):
        if nu[j] > 0:
            net.add_edge(src, j, nu[j])
    for i in range(n):
        if mu[i] > 0:
            net.add_edge(n + i, snk, mu[i])
    for j in range(n):
        for i in range(n):
            if nu[j] > 0 and mu[i] > 0 and X.dist[j][i] <= radius:
                net.add_edge(j, n + i, 1)
    value, flows = net.max_flow(src, snk)
    cells = {(i - n, j): f for (j, i), f in flows.items() if j < n and n <= i < 2 * n}
    return value, cells


def prokhorov_levels(mu, nu, X: FiniteMMSpace):
    """Yield ``(d_k, d_next, deficit_k, cells_k)`` for each distance level.

    For eps in (d_k, d_next] the open eps-neighbourhood of a set is its
    closed d_k-neighbourhood, and ``deficit_k = max_A nu(A) - mu(U_eps(A))``
    is constant; by max-flow/min-cut it equals 1 minus the matched flow.
    """
    levels = [Q(0), *X.distances()]
    for k, d in enumerate(levels):
        nxt = levels[k + 1] if k + 1 < len(levels) else None
        value, cells = _matched_flow(mu, nu, X, d)
        yield d, nxt, 1 - value, cells


def prokhorov_feasible(mu, nu, X: FiniteMMSpace, eps) -> bool:
    """Does ``mu(U_eps(A)) >= nu(A) - eps`` hold for every set A (eps > 0)?"""
    mu, nu = _measures(mu, nu, X)
    eps = to_rational(eps)
    if eps <= 0:
        return False
    below = [d for d in [Q(0), *X.distances()] if d < eps]
    value, _ = _matched_flow(mu, nu, X, max(below))
    return 1 - value <= eps


def prokhorov(mu, nu, X: FiniteMMSpace) -> Fraction:
    mu, nu = _measures(mu, nu, X)
    best = None
    for d, nxt, deficit, _ in prokhorov_levels(mu, nu, X):
        if best is not None and d >= best:
            break
        cand = max(d, deficit)
        if nxt is None or cand <= nxt:
            best = cand if best is None else min(best, cand)
    return best


# -- Ky Fan ------------------------------------------------------------------

def ky_fan(f: Sequence, g: Sequence, omega: Sequence, X: FiniteMMSpace) -> Fraction:
    """Ky Fan distance between two maps from a finite probability space into X.

    ``f`` and ``g`` list the image of each point of Omega, as indices into X
    or as labels; ``omega`` gives the probability of each point of Omega.
    """
    m = [to_rational(x) for x in omega]
    if len(f) != len(m) or len(g) != len(m):
        raise DomainMismatch("f, g and omega must have the same length")
    if any(x < 0 for x in m) or sum(m) != 1:
        raise DomainMismatch("omega must be a probability vector")

    def idx(p):
        return p if isinstance(p, int) else X.index(p)

    try:
        gaps = [X.dist[idx(a)][idx(b)] for a, b in zip(f, g)]
    except (ValueError, IndexError):
        raise DomainMismatch("map value is not a point of X") from None
    values = sorted({Q(0), *gaps})
    best = None
    for k, v in enumerate(values):
        # on [v, next) the mass where the gap exceeds eps is mass{gap > v}
        tail = sum((w for w, d in zip(m, gaps) if d > v), Q(0))
        cand = max(v, tail)
        nxt = values[k + 1] if k + 1 < len(values) else None
        if nxt is None or cand < nxt:
            best = cand if best is None else min(best, cand)
    return best


# -- box distance ------------------------------------------------------------

class _BoxEvaluator:
    """Box values of many couplings between one pair of spaces.

    Distances are scaled to integers once; each coupling's masses are
    scaled by their own common denominator.
    """

    def __init__(self, X: FiniteMMSpace, Y: FiniteMMSpace):
        self.dd = _common_denominator([x for row in (*X.dist, *Y.dist) for x in row])
        self.dx = [[int(x * self.dd) for x in row] for row in X.dist]
        self.dy = [[int(x * self.dd) for x in row] for row in Y.dist]

    def __call__(self, pi: Coupling) -> tuple[Fraction, list[tuple[int, int]]]:
        supp = pi.support()
        den = _common_denominator(v for _, _, v in supp)
        mass = [int(v * den) for _, _, v in supp]
        k = len(supp)
        dx, dy, dd = self.dx, self.dy, self.dd
        distortion = [[abs(dx[i][a] - dy[j][b]) for a, b, _ in supp] for i, j, _ in supp]
        levels = sorted({0} | {distortion[p][q] for p in range(k) for q in range(p + 1, k)})
        # minimize max(level, discarded mass) over levels; discarded = (den - w) / den
        best, best_clique = None, []
        for level in levels:
            if best is not None and level * best[1] >= best[0] * dd:
                break
            w, clique = max_weight_clique(mass, lambda p, q: distortion[p][q] <= level)
            cand = (level, dd) if level * den >= (den - w) * dd else (den - w, den)
            if best is None or cand[0] * best[1] < best[0] * cand[1]:
                best, best_clique = cand, clique
        return Q(*best), [(supp[p][0], supp[p][1]) for p in best_clique]


def coupling_box(X: FiniteMMSpace, Y: FiniteMMSpace, pi: Coupling) -> tuple[Fraction, list[tuple[int, int]]]:
    """Box value of one coupling together with the support cells it keeps."""
    check_coupling(pi, X.weights, Y.weights)
    return _BoxEvaluator(X, Y)(pi)


def box_from_coupling(X: FiniteMMSpace, Y: FiniteMMSpace, pi: Coupling) -> Fraction:
    return coupling_box(X, Y, pi)[0]


@dataclass(frozen=True)
class BoxBounds:
    lower: Fraction
    upper: Fraction
    exact: bool
    witness: Coupling | None = None
    kept: tuple[tuple[int, int], ...] = field(default=())

    def __post_init__(self):
        assert self.lower <= self.upper, (self.lower, self.upper)
        assert not self.exact or self.lower == self.upper

    def discarded_mass(self) -> Fraction:
        if self.witness is None:
            return Q(0)
        return 1 - sum((self.witness.matrix[i][j] for i, j in self.kept), Q(0))

    def transpose(self) -> "BoxBounds":
        return BoxBounds(
            self.lower,
            self.upper,
            self.exact,
            None if self.witness is None else self.witness.transpose(),
            tuple(sorted((j, i) for i, j in self.kept)),
        )

    def to_json(self) -> dict:
        out = {"lower": fmt(self.lower), "upper": fmt(self.upper), "exact": self.exact}
        if self.witness is not None:
            out["witness"] = {
                "coupling": self.witness.to_json(),
                "kept": [list(c) for c in self.kept],
                "discarded_mass": fmt(self.discarded_mass()),
            }
        return out


def _two_point_box(X: FiniteMMSpace, Y: FiniteMMSpace) -> Fraction:
    """Closed form of the box distance when both spaces have <= 2 points.

    Minimizing over couplings of max(distortion of a kept clique, discarded
    mass) reduces to five clique shapes: everything, one cell, a diagonal
    pair, a same-row pair and a same-column pair.
    """
    def parts(Z):
        if Z.size == 1:
            return Q(0), Q(1)
        return Z.dist[0][1], Z.weights[0]

    d1, w1 = parts(X)
    d2, w2 = parts(Y)
    W1, W2 = max(w1, 1 - w1), max(w2, 1 - w2)
    options = [
        max(d1, d2),
        1 - min(W1, W2),
        max(abs(d1 - d2), min(abs(w1 - w2), abs(w1 + w2 - 1))),
        max(d2, 1 - W1),
        max(d1, 1 - W2),
    ]
    return min(options)


def _seed_couplings(X: FiniteMMSpace, Y: FiniteMMSpace) -> list[Coupling]:
    seeds = [north_west_corner(X.weights, Y.weights), greedy_coupling(X.weights, Y.weights)]
    if X.size == Y.size and X.dist == Y.dist:
        # same metric, two measures: one seed per Prokhorov flow level
        for _, _, _, cells in prokhorov_levels(X.weights, Y.weights, X):
            seeds.append(complete_partial(X.weights, Y.weights, cells))
    return list(dict.fromkeys(seeds))


def _local_search(evaluate, start: Coupling, floor):
    best_pi = start
    best, kept = evaluate(start)
    for _ in range(LOCAL_SEARCH_ITERATIONS):
        if best <= floor:
            break
        for cand in cycle_moves(best_pi):
            value, cand_kept = evaluate(cand)
            if value < best:
                best_pi, best, kept = cand, value, cand_kept
                break
        else:
            break
    return best, best_pi, kept


def _upper_search(X: FiniteMMSpace, Y: FiniteMMSpace, floor=Q(0)):
    """Smallest coupling value found, stopping early once it reaches ``floor``."""
    evaluate = _BoxEvaluator(X, Y)
    seeds = _seed_couplings(X, Y)
    try:
        candidates = seeds + enumerate_vertices(X.weights, Y.weights)
    except VertexBudgetExceeded:
        best = None
        for pi in seeds:
            result = _local_search(evaluate, pi, floor)
            if best is None or result[0] < best[0]:
                best = result
        return best
    best = None
    for pi in candidates:
        value, kept = evaluate(pi)
        if best is None or value < best[0]:
            best = (value, pi, kept)
            if value <= floor:
                break
    return best


def _largest_true(pred, points) -> Fraction:
    """Largest tested point where a down-closed predicate holds (0 if none).

    Tests every point and every midpoint between consecutive points.
    """
    pts = sorted(set(points))
    probes = set(pts) | {(a + b) / 2 for a, b in zip(pts, pts[1:])}
    for p in sorted(probes, reverse=True):
        if pred(p):
            return p
    return Q(0)


def _diam_lower(X: FiniteMMSpace, Y: FiniteMMSpace) -> Fraction:
    """If the box distance were <= eps then diam(Y; s) <= diam(X; s + eps) + eps."""
    fX = partial_diam_profile(X, 1)
    fY = partial_diam_profile(Y, 1)
    marks = sorted({Q(0), Q(1), *fX.breaks, *fY.breaks})
    grid = sorted({*marks, *((a + b) / 2 for a, b in zip(marks, marks[1:]))} - {Q(0)})
    best = Q(0)
    for s in grid:
        T = fY(s)
        if T == 0:
            continue
        room = 1 - s
        pts = {Q(0), room} | {b - s for b in fX.breaks} | {T - v for v in fX.values}
        pts = [p for p in pts if 0 <= p <= room]
        best = max(best, _largest_true(lambda e: fX(s + e) + e < T, pts))
    return best


def _sep_lower(X: FiniteMMSpace, Y: FiniteMMSpace) -> Fraction:
    """If the box distance were <= eps then Sep(Y; k) <= Sep(X; k - eps) + eps."""
    best = Q(0)
    for k in SEP_BOUND_KAPPAS:
        kappa = (k, k)
        T = sep(Y, kappa)
        if T == 0:
            continue
        slacks = sep_slacks(X, kappa)
        pts = {Q(0), T} | {-s for _, s in slacks} | {T - D for D, _ in slacks}
        pts = [p for p in pts if 0 <= p < k]

        def fails(e):
            return e < k and sep_from_slacks(slacks, -e) + e < T

        best = max(best, _largest_true(fails, pts))
    return best


def _canonical_key(X: FiniteMMSpace) -> str:
    return json.dumps(X.to_json(), sort_keys=True)


def box_bounds(X: FiniteMMSpace, Y: FiniteMMSpace) -> BoxBounds:
    """Certified interval for the box distance between X and Y."""
    if _canonical_key(X) > _canonical_key(Y):
        return box_bounds(Y, X).transpose()

    iso = find_isomorphism(X, Y)
    if iso is not None:
        cells = {(i, iso[i]): X.weights[i] for i in range(X.size)}
        pi = Coupling.from_cells(X.size, Y.size, cells)
        return BoxBounds(Q(0), Q(0), True, pi, tuple(sorted(cells)))

    if X.size <= 2 and Y.size <= 2:
        exact = _two_point_box(X, Y)
        upper, pi, kept = _upper_search(X, Y, exact)
        assert exact == upper, "vertex search must attain the two-point closed form"
        return BoxBounds(exact, exact, True, pi, tuple(sorted(kept)))

    lower = max(_diam_lower(X, Y), _diam_lower(Y, X), _sep_lower(X, Y), _sep_lower(Y, X))
    upper, pi, kept = _upper_search(X, Y, lower)
    return BoxBounds(lower, upper, lower == upper, pi, tuple(sorted(kept)))


def gp_bounds(X: FiniteMMSpace, Y: FiniteMMSpace) -> tuple[Fraction, Fraction]:
    """Interval for the Gromov-Prokhorov distance: d_GP(X, Y) = box(X/2, Y/2)."""
    b = box_bounds(scale(X, Q(1, 2)), scale(Y, Q(1, 2)))
    return b.lower, b.upper


def dconc_upper(X: FiniteMMSpace, Y: FiniteMMSpace) -> Fraction:
    """Upper bound for the observable distance (it never exceeds the box distance)."""
    return box_bounds(X, Y).upper
