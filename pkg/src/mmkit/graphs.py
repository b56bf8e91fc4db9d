"""Exact graph primitives: maximum-weight clique and maximum flow."""

from __future__ import annotations

from collections import deque
from fractions import Fraction
from typing import Callable, Sequence


def max_weight_clique(weights: Sequence[Fraction], adjacent: Callable[[int, int], bool],
                      target: Fraction | None = None) -> tuple[Fraction, list[int]]:
    """Maximum total weight of a clique, with one clique attaining it.

    ``weights`` must be nonnegative, all ints or all Fractions. When ``target`` is given the search
    stops as soon as a clique of weight >= target is found, so the returned
    weight is then only guaranteed to be >= target.
    """
    n = len(weights)
    order = sorted(range(n), key=lambda v: (-weights[v], v))
    pos = {v: k for k, v in enumerate(order)}
    w = [weights[v] for v in order]
    nbr = [0] * n
    for a in range(n):
        for b in range(a + 1, n):
            if adjacent(order[a], order[b]):
                nbr[a] |= 1 << b
                nbr[b] |= 1 << a

    zero = w[0] * 0 if n else Fraction(0)
    best_w = zero
    best: list[int] = []
    done = False

    def mass(mask):
        total = zero
        while mask:
            low = mask & -mask
            total += w[low.bit_length() - 1]
            mask ^= low
        return total

    def expand(chosen, cur, cand, cand_mass):
        nonlocal best_w, best, done
        if cur > best_w or not best:
            best_w, best = cur, list(chosen)
            if target is not None and best_w >= target:
                done = True
                return
        while cand and not done:
            if cur + cand_mass <= best_w and best:
                return
            low = cand & -cand
            v = low.bit_length() - 1
            cand ^= low
            cand_mass -= w[v]
            chosen.append(v)
            nxt = cand & nbr[v]
            expand(chosen, cur + w[v], nxt, mass(nxt))
            chosen.pop()

    full = (1 << n) - 1
    expand([], zero, full, sum(w, zero))
    return best_w, sorted(order[k] for k in best) if best else []


class FlowNetwork:
    """Edmonds-Karp maximum flow over exact rational capacities."""

    def __init__(self, n: int):
        self.n = n
        self.cap: list[dict[int, Fraction]] = [dict() for _ in range(n)]

    def add_edge(self, u: int, v: int, capacity) -> None:
        self.cap[u][v] = self.cap[u].get(v, Fraction(0)) + Fraction(capacity)
        self.cap[v].setdefault(u, Fraction(0))

    def max_flow(self, source: int, sink: int) -> tuple[Fraction, dict[tuple[int, int], Fraction]]:
        """Return the flow value and the net positive flow on each edge."""
        residual = [dict(c) for c in self.cap]
        total = Fraction(0)
        while True:
            parent = {source: None}
            queue = deque([source])
            while queue and sink not in parent:
                u = queue.popleft()
                for v, c in residual[u].items():
                    if c > 0 and v not in parent:
                        parent[v] = u
                        queue.append(v)
            if sink not in parent:
                break
            bottleneck = None
            v = sink
            while parent[v] is not None:
                u = parent[v]
                c = residual[u][v]
                bottleneck = c if bottleneck is None or c < bottleneck else bottleneck
                v = u
            v = sink
            while parent[v] is not None:
                u = parent[v]
                residual[u][v] -= bottleneck
                residual[v][u] += bottleneck
                v = u
            total += bottleneck
        flows = {}
        for u in range(self.n):
            for v, c in self.cap[u].items():
                f = c - residual[u][v]
                if f > 0:
                    flows[(u, v)] = f
        return total, flows
