import random
from fractions import Fraction as Q

import pytest
from hypothesis import given, strategies as st

from conftest import X3_space, Y_space, spaces
from mmkit.core import line_space, one_point, scale, space, with_weights
from mmkit.corpus import corpus, random_space, random_weights
from mmkit.couplings import Coupling, enumerate_vertices
from mmkit.distances import (
    BoxBounds,
    box_bounds,
    box_from_coupling,
    coupling_box,
    dconc_upper,
    gp_bounds,
    ky_fan,
    prokhorov,
    prokhorov_feasible,
    tv,
)
from mmkit.errors import DimensionMismatch, DomainMismatch, InvalidCoupling
from oracles import subset_prokhorov

HALF = [Q(1, 2), Q(1, 2)]


def test_tv_examples(Y03):
    assert tv(["7/10", "3/10"], HALF, Y03) == Q(1, 5)
    assert tv(HALF, HALF, Y03) == 0
    assert tv([1, 0], [0, 1], Y03) == 1
    with pytest.raises(DimensionMismatch):
        tv([1], [1], Y03)
    with pytest.raises(DimensionMismatch):
        tv(["1/2", "1/3"], HALF, Y03)


def test_prokhorov_examples(Y03):
    assert prokhorov([1, 0], HALF, Y03) == Q(1, 2)
    assert prokhorov(["7/10", "3/10"], HALF, Y03) == Q(1, 5)
    assert prokhorov(HALF, HALF, Y03) == 0


def test_prokhorov_is_an_infimum():
    rng = random.Random(3)
    for _ in range(30):
        X = random_space(rng, 2, 6)
        mu, nu = random_weights(rng, X.size), random_weights(rng, X.size)
        d = prokhorov(mu, nu, X)
        if d > 0:
            assert not prokhorov_feasible(mu, nu, X, d * Q(999, 1000))
        assert prokhorov_feasible(mu, nu, X, d + Q(1, 10**6))


def test_prokhorov_matches_subset_oracle_small():
    rng = random.Random(4)
    for _ in range(25):
        X = random_space(rng, 2, 7)
        mu = random_weights(rng, X.size)
        nu = [w if rng.random() < 0.7 else 0 for w in random_weights(rng, X.size)]
        if sum(nu) == 0:
            nu = [1] + [0] * (X.size - 1)
        nu = [Q(w) / sum(nu) for w in nu]
        assert prokhorov(mu, nu, X) == subset_prokhorov(mu, nu, X)


def test_ky_fan_examples():
    X = line_space([0, 2, Q(1, 10)], ["1/3", "1/3", "1/3"], ["a", "b", "c"])
    omega = ["1/4", "1/4", "1/2"]
    assert ky_fan(["a", "a", "a"], ["a", "a", "a"], omega, X) == 0
    assert ky_fan(["a", "a", "a"], ["b", "a", "a"], omega, X) == Q(1, 4)
    assert ky_fan(["a", "a", "a"], ["a", "a", "c"], omega, X) == Q(1, 10)
    assert ky_fan([0, 0, 0], [1, 0, 0], omega, X) == Q(1, 4)
    with pytest.raises(DomainMismatch):
        ky_fan(["a"], ["a", "b"], omega, X)
    with pytest.raises(DomainMismatch):
        ky_fan(["a", "a", "z"], ["a", "a", "a"], omega, X)


def _ky_fan_oracle(gaps, m):
    cands = sorted({Q(0), *gaps, *(sum(w for w, d in zip(m, gaps) if d > v) for v in [Q(0), *gaps])})
    return min(e for e in cands if sum((w for w, d in zip(m, gaps) if d > e), Q(0)) <= e)


def test_ky_fan_matches_candidate_scan():
    rng = random.Random(8)
    X = line_space(range(6), ["1/6"] * 6)
    for _ in range(50):
        k = rng.randint(1, 6)
        m = random_weights(rng, k)
        f = [rng.randrange(6) for _ in range(k)]
        g = [rng.randrange(6) for _ in range(k)]
        gaps = [X.dist[a][b] for a, b in zip(f, g)]
        assert ky_fan(f, g, m, X) == _ky_fan_oracle(gaps, m)


def test_box_from_coupling_examples(Y03, X3):
    ident = Coupling.from_rows([[w if i == j else 0 for j in range(3)] for i, w in enumerate(X3.weights)])
    assert box_from_coupling(X3, X3, ident) == 0
    assert box_from_coupling(Y03, one_point(), Coupling.from_rows([["7/10"], ["3/10"]])) == Q(3, 10)
    # keeping {a, b} (distortion 1/5) or {a, c} (distortion 1/10) and discarding 1/4 beats 3/10
    eps, kept = coupling_box(X3, scale(X3, Q(11, 10)), ident)
    assert eps == Q(1, 4)
    assert eps <= Q(3, 10)
    with pytest.raises(InvalidCoupling):
        box_from_coupling(Y03, one_point(), Coupling.from_rows([["1/2"], ["1/2"]]))


def test_box_bounds_examples(X3, Y03):
    b = box_bounds(X3, X3)
    assert (b.lower, b.upper, b.exact) == (0, 0, True)
    b = box_bounds(Y03, with_weights(Y03, HALF))
    assert b.upper <= 2 * prokhorov(Y03.weights, HALF, Y03)
    assert b.exact and b.upper == Q(1, 5)
    Y = Y_space(Q(1, 100))
    b = box_bounds(Y, one_point())
    assert b.upper == Q(1, 100) and b.exact
    assert b.discarded_mass() == Q(1, 100)
    assert dconc_upper(Y, one_point()) <= Q(1, 100)
    assert dconc_upper(X3, X3) == 0
    assert dconc_upper(X3, scale(X3, Q(11, 10))) <= Q(3, 10)


def test_box_bounds_json(X3):
    doc = box_bounds(X3, scale(X3, Q(11, 10))).to_json()
    assert set(doc) == {"lower", "upper", "exact", "witness"}
    assert set(doc["witness"]) == {"coupling", "kept", "discarded_mass"}
    with pytest.raises(AssertionError):
        BoxBounds(Q(1), Q(0), False)


def _grid_two_point_box(X, Y, steps=60):
    """Best box value over a grid of 2x2 couplings: an upper bound for the exact value."""
    a, b = X.weights
    c, d = Y.weights
    lo, hi = max(Q(0), a - d), min(a, c)
    best = None
    for k in range(steps + 1):
        t = lo + (hi - lo) * k / steps
        pi = Coupling.from_rows([[t, a - t], [c - t, d - a + t]])
        v = box_from_coupling(X, Y, pi)
        best = v if best is None else min(best, v)
    return best


def test_two_point_closed_form_against_grid():
    rng = random.Random(9)
    for _ in range(30):
        X = line_space([0, rng.randint(1, 5)], random_weights(rng, 2))
        Y = line_space([0, rng.randint(1, 5)], random_weights(rng, 2))
        b = box_bounds(X, Y)
        assert b.exact
        assert b.upper <= _grid_two_point_box(X, Y)


def test_vertex_search_is_minimal_over_vertices():
    for X, Y in zip(corpus(21, 8, 2, 4), corpus(22, 8, 2, 4)):
        b = box_bounds(X, Y)
        vertices = enumerate_vertices(X.weights, Y.weights)
        assert b.upper == min(box_from_coupling(X, Y, pi) for pi in vertices)
        assert b.lower <= b.upper


@given(spaces(2, 5), spaces(2, 5))
def test_box_bounds_symmetric_and_ordered(X, Y):
    b, c = box_bounds(X, Y), box_bounds(Y, X)
    assert (b.lower, b.upper, b.exact) == (c.lower, c.upper, c.exact)
    assert 0 <= b.lower <= b.upper <= 1
    assert box_bounds(X, X).upper == 0


def test_lower_bounds_are_certified_on_isomorphic_rescalings():
    # the lower bound may never exceed the upper bound of a known coupling
    for X in corpus(23, 20, 3, 5):
        for t in (Q(1, 2), Q(2), Q(3)):
            b = box_bounds(X, scale(X, t))
            diag = Coupling.from_rows(
                [[w if i == j else 0 for j in range(X.size)] for i, w in enumerate(X.weights)])
            assert b.lower <= b.upper <= box_from_coupling(X, scale(X, t), diag)


def test_lower_bound_detects_far_spaces():
    far = box_bounds(line_space([0, 10], HALF), line_space([0, 1, 2], ["1/3"] * 3))
    assert far.lower > 0


def test_lohr_sandwich():
    for X, Y in zip(corpus(24, 10, 2, 4), corpus(25, 10, 2, 4)):
        gp_lo, gp_hi = gp_bounds(X, Y)
        b = box_bounds(X, Y)
        # d_GP <= box <= 2 d_GP
        assert gp_lo <= b.upper and b.lower <= 2 * gp_hi
        # box(X, Y) = d_GP(2X, 2Y): both intervals must contain the same number
        lo, hi = gp_bounds(scale(X, 2), scale(Y, 2))
        assert max(b.lower, lo) <= min(b.upper, hi)


@given(spaces(2, 6), st.randoms(use_true_random=False))
def test_measure_metrics(X, rnd):
    mu, nu, la = (random_weights(rnd, X.size) for _ in range(3))
    assert tv(mu, nu, X) == tv(nu, mu, X)
    assert prokhorov(mu, nu, X) == prokhorov(nu, mu, X)
    assert tv(mu, la, X) <= tv(mu, nu, X) + tv(nu, la, X)
    assert prokhorov(mu, la, X) <= prokhorov(mu, nu, X) + prokhorov(nu, la, X)
    assert prokhorov(mu, nu, X) <= tv(mu, nu, X)
    assert prokhorov(mu, mu, X) == 0


@given(spaces(2, 5), st.randoms(use_true_random=False))
def test_box_at_most_twice_prokhorov(X, rnd):
    nu = random_weights(rnd, X.size)
    Y = with_weights(X, nu)
    assert box_bounds(X, Y).upper <= 2 * prokhorov(X.weights, nu, X) <= 2 * tv(X.weights, nu, X)
