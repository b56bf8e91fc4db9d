import random
from fractions import Fraction as Q
from itertools import combinations

import pytest

from mmkit.corpus import random_weights
from mmkit.couplings import (
    Coupling,
    VertexBudgetExceeded,
    check_coupling,
    complete_partial,
    cycle_moves,
    enumerate_vertices,
    greedy_coupling,
    north_west_corner,
)
from mmkit.errors import InvalidCoupling

U3 = [Q(1, 3)] * 3


def _solve_on(cells, mu, nu):
    """Unique solution of the marginal equations supported on ``cells``, or None."""
    n, m = len(mu), len(nu)
    rows = []
    for i in range(n):
        rows.append([Q(1) if c[0] == i else Q(0) for c in cells] + [mu[i]])
    for j in range(m):
        rows.append([Q(1) if c[1] == j else Q(0) for c in cells] + [nu[j]])
    k = len(cells)
    pivots = []
    r = 0
    for col in range(k):
        p = next((x for x in range(r, len(rows)) if rows[x][col] != 0), None)
        if p is None:
            return None
        rows[r], rows[p] = rows[p], rows[r]
        rows[r] = [v / rows[r][col] for v in rows[r]]
        for x in range(len(rows)):
            if x != r and rows[x][col] != 0:
                f = rows[x][col]
                rows[x] = [a - f * b for a, b in zip(rows[x], rows[r])]
        pivots.append(col)
        r += 1
    if any(row[-1] != 0 for row in rows[r:]):
        return None
    return [rows[i][-1] for i in range(k)]


def oracle_vertices(mu, nu):
    n, m = len(mu), len(nu)
    allcells = [(i, j) for i in range(n) for j in range(m)]
    found = set()
    for size in range(1, n + m):
        for cells in combinations(allcells, size):
            x = _solve_on(list(cells), mu, nu)
            if x is None or any(v <= 0 for v in x):
                continue
            found.add(Coupling.from_cells(n, m, dict(zip(cells, x))))
    return found


def test_uniform_3x3_vertices_are_permutations():
    V = enumerate_vertices(U3, U3)
    assert len(V) == 6
    for pi in V:
        assert sorted(v for _, _, v in pi.support()) == [Q(1, 3)] * 3


def test_vertices_match_basis_enumeration():
    rng = random.Random(41)
    for _ in range(40):
        mu = random_weights(rng, rng.randint(1, 3), 4)
        nu = random_weights(rng, rng.randint(1, 3), 4)
        V = enumerate_vertices(mu, nu)
        assert len(V) == len(set(V))
        assert set(V) == oracle_vertices(mu, nu)
        for pi in V:
            check_coupling(pi, mu, nu)


def test_vertex_budget():
    mu = [Q(1, 7)] * 7
    with pytest.raises(VertexBudgetExceeded):
        enumerate_vertices(mu, mu, max_vertices=100)


def test_seed_couplings_are_valid():
    rng = random.Random(42)
    for _ in range(100):
        mu = random_weights(rng, rng.randint(1, 6))
        nu = random_weights(rng, rng.randint(1, 6))
        for pi in (north_west_corner(mu, nu), greedy_coupling(mu, nu), greedy_coupling(nu, mu).transpose()):
            check_coupling(pi, mu, nu)
        # north-west corner is a vertex: its support is a forest
        assert len(north_west_corner(mu, nu).support()) <= len(mu) + len(nu) - 1


def test_north_west_corner_example():
    pi = north_west_corner([Q(1, 2), Q(1, 2)], [Q(1, 4), Q(3, 4)])
    assert pi.matrix == ((Q(1, 4), Q(1, 4)), (Q(0), Q(1, 2)))


def test_complete_partial():
    mu = nu = [Q(1, 2), Q(1, 2)]
    pi = complete_partial(mu, nu, {(0, 1): Q(1, 4)})
    check_coupling(pi, mu, nu)
    assert pi.matrix[0][1] >= Q(1, 4)


def test_check_coupling_errors():
    mu = nu = [Q(1, 2), Q(1, 2)]
    with pytest.raises(InvalidCoupling):
        check_coupling(Coupling.from_rows([[1, 0], [0, 0]]), mu, nu)
    with pytest.raises(InvalidCoupling):
        check_coupling(Coupling.from_rows([["1/2", 0]]), mu, nu)
    with pytest.raises(InvalidCoupling):
        check_coupling(Coupling.from_rows([["3/4", "-1/4"], ["-1/4", "3/4"]]), mu, nu)
    with pytest.raises(InvalidCoupling):
        check_coupling(Coupling.from_rows([["1/2", "1/4"], [0, "1/4"]]), mu, nu)


def test_cycle_moves_preserve_marginals():
    rng = random.Random(43)
    for _ in range(50):
        mu = random_weights(rng, rng.randint(2, 4))
        nu = random_weights(rng, rng.randint(2, 4))
        pi = greedy_coupling(mu, nu)
        moves = list(cycle_moves(pi))
        for nxt in moves:
            check_coupling(nxt, mu, nu)
        assert moves == list(cycle_moves(pi))
