"""Finite metric measure spaces with exact rational data."""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

from .errors import (
    AsymmetricMatrix,
    MalformedSpace,
    NonpositiveScale,
    NonpositiveWeight,
    TriangleViolation,
    ValidationError,
    WeightSumNotOne,
    ZeroDistanceDistinctPoints,
)

Q = Fraction


def to_rational(value) -> Fraction:
    """Convert ``value`` to a Fraction without passing through binary floats.

    Strings may be integers, ``"p/q"`` or decimals (``"0.3"`` is exactly
    3/10). Python floats are converted through their shortest repr, so
    ``0.1`` also becomes 1/10.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValidationError(f"not a rational number: {value!r}")
    if isinstance(value, (int, Rational)):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise ValidationError(f"not a rational number: {value!r}") from None
    raise ValidationError(f"not a rational number: {value!r}")


def parse_rational_list(text: str) -> list[Fraction]:
    """Parse ``"1/4,1/4"`` into a list of Fractions."""
    parts = [p for p in text.split(",") if p.strip()]
    return [to_rational(p) for p in parts]


def fmt(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class FiniteMMSpace:
    """A finite mm-space with full support.

    Build instances through :func:`validate_space` (or :func:`space`), which
    enforces the metric and probability axioms; the constructor itself does
    not check anything.
    """

    labels: tuple[str, ...]
    dist: tuple[tuple[Fraction, ...], ...]
    weights: tuple[Fraction, ...]

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def size(self) -> int:
        return len(self.labels)

    def diameter(self) -> Fraction:
        return max((max(row) for row in self.dist), default=Q(0))

    def max_atom(self) -> Fraction:
        return max(self.weights)

    def distances(self) -> list[Fraction]:
        """Sorted distinct positive pairwise distances."""
        n = self.size
        return sorted({self.dist[i][j] for i in range(n) for j in range(i + 1, n)})

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def to_json(self) -> dict:
        return {
            "labels": list(self.labels),
            "dist": [[fmt(x) for x in row] for row in self.dist],
            "weights": [fmt(w) for w in self.weights],
        }


def validate_space(labels: Sequence, dist: Sequence[Sequence], weights: Sequence) -> FiniteMMSpace:
    labels = tuple(str(x) for x in labels)
    n = len(labels)
    if n == 0:
        raise MalformedSpace("a space needs at least one point")
    if len(set(labels)) != n:
        raise MalformedSpace("labels must be distinct")
    if len(dist) != n or any(len(row) != n for row in dist):
        raise MalformedSpace(f"dist must be a {n}x{n} matrix")
    if len(weights) != n:
        raise MalformedSpace(f"expected {n} weights, got {len(weights)}")
    d = tuple(tuple(to_rational(x) for x in row) for row in dist)
    w = tuple(to_rational(x) for x in weights)

    for i in range(n):
        if d[i][i] != 0:
            raise MalformedSpace(f"dist[{i}][{i}] must be 0")
        for j in range(n):
            if d[i][j] < 0:
                raise MalformedSpace(f"dist[{i}][{j}] is negative")
            if d[i][j] != d[j][i]:
                raise AsymmetricMatrix(i, j)
    for i in range(n):
        for j in range(i + 1, n):
            if d[i][j] == 0:
                raise ZeroDistanceDistinctPoints(i, j)
    for i in range(n):
        for j in range(n):
            for k in range(n):
                if d[i][k] > d[i][j] + d[j][k]:
                    raise TriangleViolation(i, j, k)
    for i, x in enumerate(w):
        if x <= 0:
            raise NonpositiveWeight(i)
    if sum(w) != 1:
        raise WeightSumNotOne(f"weights sum to {fmt(sum(w))}, not 1")
    return FiniteMMSpace(labels, d, w)


def space(dist: Sequence[Sequence], weights: Sequence, labels: Sequence | None = None) -> FiniteMMSpace:
    """Shorthand for :func:`validate_space` with default labels ``p0, p1, ...``."""
    if labels is None:
        labels = [f"p{i}" for i in range(len(weights))]
    return validate_space(labels, dist, weights)


def one_point(label: str = "p0") -> FiniteMMSpace:
    return FiniteMMSpace((label,), ((Q(0),),), (Q(1),))


def line_space(coords: Iterable, weights: Sequence, labels: Sequence | None = None) -> FiniteMMSpace:
    """Points on the real line with the metric ``|x - y|``."""
    xs = [to_rational(x) for x in coords]
    return space([[abs(a - b) for b in xs] for a in xs], weights, labels)


def from_json(doc: dict) -> FiniteMMSpace:
    try:
        return validate_space(doc["labels"], doc["dist"], doc["weights"])
    except (KeyError, TypeError) as exc:
        raise MalformedSpace(f"malformed space document: {exc}") from None


def load_space(path: str) -> FiniteMMSpace:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise MalformedSpace(f"{path}: {exc}") from None
    return from_json(doc)


def scale(X: FiniteMMSpace, t) -> FiniteMMSpace:
    """The space ``tX``: distances multiplied by ``t``, weights unchanged."""
    t = to_rational(t)
    if t <= 0:
        raise NonpositiveScale(f"scale factor must be positive, got {fmt(t)}")
    if t == 1:
        return X
    return FiniteMMSpace(X.labels, tuple(tuple(t * x for x in row) for row in X.dist), X.weights)


def with_weights(X: FiniteMMSpace, weights: Sequence) -> FiniteMMSpace:
    """Same metric as ``X`` with a different (full-support) measure."""
    return validate_space(X.labels, X.dist, weights)


def is_mm_isomorphic(X: FiniteMMSpace, Y: FiniteMMSpace) -> bool:
    return find_isomorphism(X, Y) is not None


def find_isomorphism(X: FiniteMMSpace, Y: FiniteMMSpace) -> list[int] | None:
    """Return ``f`` with ``f[i]`` the image of point ``i``, or None.

    Backtracking over bijections; a point may only map to a point with the
    same weight and the same multiset of distances to other points.
    """
    n = X.size
    if n != Y.size or sorted(X.weights) != sorted(Y.weights):
        return None

    def signature(Z, i):
        return Z.weights[i], tuple(sorted(Z.dist[i]))

    sx = [signature(X, i) for i in range(n)]
    sy = [signature(Y, j) for j in range(n)]
    if sorted(sx) != sorted(sy):
        return None
    candidates = [[j for j in range(n) if sy[j] == sx[i]] for i in range(n)]
    order = sorted(range(n), key=lambda i: len(candidates[i]))

    image = [-1] * n
    used = [False] * n

    def extend(pos):
        if pos == n:
            return True
        i = order[pos]
        for j in candidates[i]:
            if used[j]:
                continue
            if any(X.dist[i][order[q]] != Y.dist[j][image[order[q]]] for q in range(pos)):
                continue
            image[i], used[j] = j, True
            if extend(pos + 1):
                return True
            image[i], used[j] = -1, False
        return False

    return list(image) if extend(0) else None
