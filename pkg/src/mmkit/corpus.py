"""Seeded random finite mm-spaces with small rational data."""

from __future__ import annotations

import random
from fractions import Fraction

from .core import FiniteMMSpace, line_space, space

Q = Fraction


def random_weights(rng: random.Random, n: int, max_int: int = 6) -> list[Fraction]:
    raw = [rng.randint(1, max_int) for _ in range(n)]
    total = sum(raw)
    return [Q(w, total) for w in raw]


def _shortest_paths(n: int, edges: dict[tuple[int, int], Fraction]) -> list[list[Fraction]]:
    d = [[Q(0) if i == j else None for j in range(n)] for i in range(n)]
    for (i, j), w in edges.items():
        d[i][j] = d[j][i] = w
    for k in range(n):
        for i in range(n):
            if d[i][k] is None:
                continue
            for j in range(n):
                if d[k][j] is None:
                    continue
                via = d[i][k] + d[k][j]
                if d[i][j] is None or via < d[i][j]:
                    d[i][j] = via
    return d


def random_graph_space(rng: random.Random, n: int, max_len: int = 5) -> FiniteMMSpace:
    """Shortest-path metric of a random connected graph with rational edge lengths."""
    edges = {}
    for v in range(1, n):
        u = rng.randrange(v)
        edges[(u, v)] = Q(rng.randint(1, max_len), rng.choice((1, 2)))
    for _ in range(rng.randint(0, n) if n > 1 else 0):
        u, v = sorted(rng.sample(range(n), 2))
        edges[(u, v)] = Q(rng.randint(1, max_len), rng.choice((1, 2)))
    return space(_shortest_paths(n, edges), random_weights(rng, n))


def random_line_space(rng: random.Random, n: int, span: int = 12) -> FiniteMMSpace:
    coords = sorted(rng.sample(range(span + n), n))
    return line_space(coords, random_weights(rng, n))


def random_space(rng: random.Random, n_min: int = 2, n_max: int = 8) -> FiniteMMSpace:
    n = rng.randint(n_min, n_max)
    if rng.random() < 0.5:
        return random_line_space(rng, n)
    return random_graph_space(rng, n)


def corpus(seed: int, count: int, n_min: int = 2, n_max: int = 8) -> list[FiniteMMSpace]:
    rng = random.Random(seed)
    return [random_space(rng, n_min, n_max) for _ in range(count)]
