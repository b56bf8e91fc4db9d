"""Partial diameter, separation distance, and their step-function profiles.

For a finite space both ``s -> diam(X; s)`` and ``s -> Sep(X; kappa + s)``
are piecewise constant with rational breakpoints, so everything here is
computed exactly.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .core import FiniteMMSpace, fmt, to_rational
from .errors import AlphaOutOfRange, InvalidKappa, OutOfDomain, ValidationError
from .graphs import max_weight_clique

Q = Fraction


@dataclass(frozen=True)
class KappaTuple:
    entries: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.entries) < 2:
            raise InvalidKappa("kappa needs at least two entries")
        for k in self.entries:
            if k <= 0:
                raise InvalidKappa(f"kappa entries must be positive, got {fmt(k)}")

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def shifted(self, s) -> "KappaTuple":
        s = to_rational(s)
        return KappaTuple(tuple(k + s for k in self.entries))

    def total(self) -> Fraction:
        return sum(self.entries, Q(0))

    def __str__(self):
        return ",".join(fmt(k) for k in self.entries)


def as_kappa(kappa) -> KappaTuple:
    if isinstance(kappa, KappaTuple):
        return kappa
    if isinstance(kappa, str):
        kappa = kappa.split(",")
    try:
        return KappaTuple(tuple(to_rational(k) for k in kappa))
    except ValidationError as exc:
        raise InvalidKappa(str(exc)) from None


@dataclass(frozen=True)
class StepFunction:
    """Piecewise-constant function on ``[a, b]``, left-continuous.

    Segment ``k`` is ``(breaks[k-1], breaks[k]]`` and carries ``values[k]``;
    the first segment is closed at ``a``. A break may coincide with ``a``,
    which gives a first segment consisting of the single point ``a``.
    """

    domain: tuple[Fraction, Fraction]
    breaks: tuple[Fraction, ...]
    values: tuple[Fraction, ...]

    def __post_init__(self):
        a, b = self.domain
        if a > b:
            raise ValidationError("empty domain")
        if len(self.values) != len(self.breaks) + 1:
            raise ValidationError("need exactly one value per segment")
        prev = None
        for x in self.breaks:
            if not a <= x < b or (prev is not None and x <= prev):
                raise ValidationError("breaks must increase strictly inside [a, b)")
            prev = x

    @classmethod
    def from_pieces(cls, a, b, pieces: Iterable[tuple[Fraction, Fraction]]) -> "StepFunction":
        """Build from ``(right_end, value)`` pairs given left to right.

        The last piece's right end is taken to be ``b``; adjacent pieces with
        equal values are merged and pieces ending outside ``[a, b)`` are
        clipped.
        """
        a, b = Q(a), Q(b)
        breaks: list[Fraction] = []
        values: list[Fraction] = []
        for right, value in pieces:
            if right < a:
                continue
            if values and values[-1] == value:
                breaks.pop()
            else:
                values.append(value)
            if right >= b:
                return cls((a, b), tuple(breaks), tuple(values))
            breaks.append(right)
        raise ValidationError("pieces do not reach the right end of the domain")

    def __call__(self, s) -> Fraction:
        s = to_rational(s)
        a, b = self.domain
        if not a <= s <= b:
            raise OutOfDomain(f"{fmt(s)} outside [{fmt(a)}, {fmt(b)}]")
        return self.values[bisect_left(self.breaks, s)]

    def segments(self) -> list[tuple[Fraction, Fraction, Fraction]]:
        a, b = self.domain
        ends = [a, *self.breaks, b]
        return [(ends[k], ends[k + 1], v) for k, v in enumerate(self.values)]

    def to_json(self) -> dict:
        return {
            "domain": [fmt(self.domain[0]), fmt(self.domain[1])],
            "breaks": [fmt(x) for x in self.breaks],
            "values": [fmt(v) for v in self.values],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "StepFunction":
        return cls(
            tuple(to_rational(x) for x in doc["domain"]),
            tuple(to_rational(x) for x in doc["breaks"]),
            tuple(to_rational(x) for x in doc["values"]),
        )


def step_integral(f: StepFunction, a, b) -> Fraction:
    a, b = to_rational(a), to_rational(b)
    lo, hi = f.domain
    if a > b or a < lo or b > hi:
        raise OutOfDomain(f"[{fmt(a)}, {fmt(b)}] is not inside the domain of f")
    total = Q(0)
    for left, right, value in f.segments():
        overlap = min(right, b) - max(left, a)
        if overlap > 0:
            total += overlap * value
    return total


# -- partial diameter --------------------------------------------------------

def _max_clique_mass(X: FiniteMMSpace, D: Fraction, target=None) -> Fraction:
    mass, _ = max_weight_clique(X.weights, lambda i, j: X.dist[i][j] <= D, target)
    return mass


def partial_diam(X: FiniteMMSpace, alpha) -> Fraction:
    """Smallest diameter of a set of points carrying mass >= alpha."""
    alpha = to_rational(alpha)
    if alpha < 0 or alpha > 1:
        raise AlphaOutOfRange(f"alpha must lie in [0, 1], got {fmt(alpha)}")
    if alpha == 0:
        return Q(0)
    for D in [Q(0), *X.distances()]:
        if _max_clique_mass(X, D, target=alpha) >= alpha:
            return D
    raise AssertionError("the whole space has mass 1")


def partial_diam_profile(X: FiniteMMSpace, upper) -> StepFunction:
    """``s -> diam(X; s)`` on ``[0, upper]``."""
    upper = to_rational(upper)
    if upper <= 0 or upper > 1:
        raise AlphaOutOfRange(f"upper must lie in (0, 1], got {fmt(upper)}")
    pieces = []
    reached = Q(0)
    for D in [Q(0), *X.distances()]:
        mass = _max_clique_mass(X, D)
        if mass > reached:
            pieces.append((mass, D))
            reached = mass
        if reached >= upper:
            break
    return StepFunction.from_pieces(Q(0), upper, pieces)


# -- separation distance -----------------------------------------------------

_FREE, _DISCARD = -2, -1


class _Assignment:
    """Search over assignments of points to groups 0..N or to the discard pile.

    Two points at distance < threshold may not sit in different groups.
    Points are visited in order of decreasing weight.
    """

    def __init__(self, X: FiniteMMSpace, kappa: KappaTuple, threshold: Fraction):
        n = X.size
        self.order = sorted(range(n), key=lambda i: (-X.weights[i], i))
        self.w = [X.weights[i] for i in self.order]
        self.kappa = list(kappa.entries)
        self.groups = len(self.kappa)
        self.conflicts = [
            [b for b in range(a + 1, n) if X.dist[self.order[a]][self.order[b]] < threshold]
            for a in range(n)
        ]
        self.tail = [Q(0)] * (n + 1)
        for a in range(n - 1, -1, -1):
            self.tail[a] = self.tail[a + 1] + self.w[a]

    def _options(self, status_a, used):
        if status_a == _DISCARD:
            return []
        if status_a >= 0:
            return [status_a]
        options, fresh_seen = [], set()
        for g in range(self.groups):
            if not used[g]:
                # untouched groups with the same demand are interchangeable
                if self.kappa[g] in fresh_seen:
                    continue
                fresh_seen.add(self.kappa[g])
            options.append(g)
        return options

    def _propagate(self, a, g, status):
        new = list(status)
        for b in self.conflicts[a]:
            if new[b] == _FREE or new[b] == g:
                new[b] = g
            else:
                new[b] = _DISCARD
        return tuple(new)

    def feasible(self) -> bool:
        """Can every group i reach mass >= kappa_i?"""
        memo: dict = {}
        n = len(self.w)

        def go(a, residual, status, used):
            if all(r == 0 for r in residual):
                return True
            if a == n or sum(residual) > self.tail[a]:
                return False
            key = (a, residual, status[a:], used)
            if key in memo:
                return memo[key]
            result = False
            for g in self._options(status[a], used):
                res = list(residual)
                res[g] = max(Q(0), res[g] - self.w[a])
                u = list(used)
                u[g] = True
                if go(a + 1, tuple(res), self._propagate(a, g, status), tuple(u)):
                    result = True
                    break
            if not result:
                result = go(a + 1, residual, status, used)
            memo[key] = result
            return result

        return go(0, tuple(self.kappa), (_FREE,) * n, (False,) * self.groups)

    def best_slack(self) -> Fraction:
        """Maximum over assignments of ``min_i (mass_i - kappa_i)``."""
        n = len(self.w)
        G = self.groups
        k_total = sum(self.kappa, Q(0))
        best = -max(self.kappa)

        def go(a, sums, status, used):
            nonlocal best
            current = min(sums[g] - self.kappa[g] for g in range(G))
            if current > best:
                best = current
            if a == n:
                return
            avail = [Q(0)] * G
            free_mass = Q(0)
            for b in range(a, n):
                st = status[b]
                if st == _FREE:
                    free_mass += self.w[b]
                elif st >= 0:
                    avail[st] += self.w[b]
            bound = min(sums[g] + avail[g] + free_mass - self.kappa[g] for g in range(G))
            bound = min(bound, (sum(sums, Q(0)) + self.tail[a] - k_total) / G)
            if bound <= best:
                return
            for g in self._options(status[a], used):
                s = list(sums)
                s[g] += self.w[a]
                u = list(used)
                u[g] = True
                go(a + 1, tuple(s), self._propagate(a, g, status), tuple(u))
            go(a + 1, sums, status, used)

        go(0, (Q(0),) * G, (_FREE,) * n, (False,) * G)
        return best


def sep_feasible(X: FiniteMMSpace, kappa, threshold) -> bool:
    """Are there sets A_i with mass >= kappa_i and pairwise distance >= threshold?"""
    kappa = as_kappa(kappa)
    return _Assignment(X, kappa, to_rational(threshold)).feasible()


def sep(X: FiniteMMSpace, kappa) -> Fraction:
    """Separation distance ``Sep(X; kappa_0, ..., kappa_N)``."""
    kappa = as_kappa(kappa)
    if any(k > 1 for k in kappa):
        return Q(0)
    if kappa.total() > 1:
        return Q(0)
    for D in reversed(X.distances()):
        if _Assignment(X, kappa, D).feasible():
            return D
    return Q(0)


def sep_slacks(X: FiniteMMSpace, kappa) -> list[tuple[Fraction, Fraction]]:
    """``(D, s*(D))`` for each positive distance D, in decreasing D.

    ``s*(D)`` is the largest shift s such that sets of mass >= kappa_i + s
    exist at mutual distance >= D; it is nondecreasing as D decreases, and
    ``Sep(X; kappa + s) = max{D : s*(D) >= s}`` (0 if no D qualifies).
    """
    kappa = as_kappa(kappa)
    return [(D, _Assignment(X, kappa, D).best_slack()) for D in reversed(X.distances())]


def sep_from_slacks(slacks: Sequence[tuple[Fraction, Fraction]], shift) -> Fraction:
    shift = to_rational(shift)
    for D, slack in slacks:
        if slack >= shift:
            return D
    return Q(0)


def sep_profile(X: FiniteMMSpace, kappa, shift_upper) -> StepFunction:
    """``s -> Sep(X; kappa_0 + s, ..., kappa_N + s)`` on ``[0, shift_upper]``."""
    kappa = as_kappa(kappa)
    upper = to_rational(shift_upper)
    if upper <= 0:
        raise OutOfDomain("shift_upper must be positive")
    pieces = []
    reached = None
    for D in reversed(X.distances()):
        slack = _Assignment(X, kappa, D).best_slack()
        if slack < 0 or (reached is not None and slack <= reached):
            continue
        pieces.append((slack, D))
        reached = slack
        if slack >= upper:
            break
    if reached is None or reached < upper:
        pieces.append((upper, Q(0)))
    return StepFunction.from_pieces(Q(0), upper, pieces)
