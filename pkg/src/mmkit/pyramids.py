"""Lipschitz order, atom pyramids P_A and their separation distance."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .core import FiniteMMSpace, fmt, line_space, space, to_rational
from .errors import (
    EqualSequences,
    InvalidAtomSequence,
    KappaSumTooLarge,
    MTooSmall,
    PreconditionError,
    ValidationError,
)
from .invariants import KappaTuple, as_kappa, partial_diam_profile, sep

Q = Fraction


@dataclass(frozen=True)
class AtomSequence:
    """Non-increasing nonnegative masses a_1 >= a_2 >= ... with sum <= 1.

    Trailing zeros are dropped, so two sequences are equal exactly when
    they describe the same element of the sequence space.
    """

    atoms: tuple[Fraction, ...]

    def __post_init__(self):
        atoms = list(self.atoms)
        while atoms and atoms[-1] == 0:
            atoms.pop()
        object.__setattr__(self, "atoms", tuple(atoms))
        if any(a < 0 for a in atoms):
            raise InvalidAtomSequence("atoms must be nonnegative")
        if any(a < b for a, b in zip(atoms, atoms[1:])):
            raise InvalidAtomSequence("atoms must be non-increasing")
        if sum(atoms) > 1:
            raise InvalidAtomSequence("atoms must sum to at most 1")

    def __getitem__(self, i: int) -> Fraction:
        """0-based access with implicit zeros past the end."""
        return self.atoms[i] if i < len(self.atoms) else Q(0)

    def __len__(self):
        return len(self.atoms)

    def free_mass(self) -> Fraction:
        return 1 - sum(self.atoms, Q(0))

    def __str__(self):
        return ",".join(fmt(a) for a in self.atoms)


def as_atoms(atoms) -> AtomSequence:
    if isinstance(atoms, AtomSequence):
        return atoms
    if isinstance(atoms, str):
        atoms = [p for p in atoms.split(",") if p.strip()]
    try:
        return AtomSequence(tuple(to_rational(a) for a in atoms))
    except ValidationError as exc:
        if isinstance(exc, InvalidAtomSequence):
            raise
        raise InvalidAtomSequence(str(exc)) from None


@dataclass(frozen=True)
class AssociatedPyramid:
    """The pyramid P_X of all spaces dominated by X."""

    space: FiniteMMSpace


@dataclass(frozen=True)
class AtomPyramid:
    """The scale-invariant pyramid P_A."""

    atoms: AtomSequence


PyramidRep = Union[AssociatedPyramid, AtomPyramid]


@dataclass(frozen=True)
class SepValue:
    value: Fraction | None  # None means +infinity

    @property
    def infinite(self) -> bool:
        return self.value is None

    def to_json(self) -> dict:
        return {"infinite": True} if self.value is None else {"finite": fmt(self.value)}


INFINITE = SepValue(None)
ZERO = SepValue(Q(0))


# -- Lipschitz order ---------------------------------------------------------

def _necessary_for_domination(X: FiniteMMSpace, Y: FiniteMMSpace) -> bool:
    """Cheap invariants that must hold when X dominates Y."""
    if Y.size > X.size or Y.diameter() > X.diameter():
        return False
    fX, fY = partial_diam_profile(X, 1), partial_diam_profile(Y, 1)
    for s in {*fX.breaks, *fY.breaks, Q(1)}:
        if fY(s) > fX(s):
            return False
    for k in (Q(1, 4), Q(1, 2)):
        if sep(Y, (k, k)) > sep(X, (k, k)):
            return False
    return True


def find_domination(X: FiniteMMSpace, Y: FiniteMMSpace, prune: bool = True) -> list[int] | None:
    """A 1-Lipschitz map X -> Y pushing mu_X onto mu_Y, as a list of images."""
    if prune and not _necessary_for_domination(X, Y):
        return None
    n, m = X.size, Y.size
    order = sorted(range(n), key=lambda i: (-X.weights[i], i))
    cap = list(Y.weights)
    image = [-1] * n
    smallest_after = [None] * (n + 1)
    for a in range(n - 1, -1, -1):
        w = X.weights[order[a]]
        smallest_after[a] = w if smallest_after[a + 1] is None else min(w, smallest_after[a + 1])

    def extend(a):
        if a == n:
            return all(c == 0 for c in cap)
        if prune:
            # an open fiber must still be fillable by the points left
            lo = smallest_after[a]
            if any(0 < c < lo for c in cap):
                return False
        i = order[a]
        w = X.weights[i]
        for j in range(m):
            if cap[j] < w:
                continue
            if any(Y.dist[j][image[order[b]]] > X.dist[i][order[b]] for b in range(a)):
                continue
            cap[j] -= w
            image[i] = j
            if extend(a + 1):
                return True
            cap[j] += w
            image[i] = -1
        return False

    return list(image) if extend(0) else None


def dominates(X: FiniteMMSpace, Y: FiniteMMSpace) -> bool:
    """Does X Lipschitz-dominate Y?"""
    return find_domination(X, Y) is not None


# -- atom pyramids -----------------------------------------------------------

def _pack(items: list[Fraction], bins: list[Fraction]) -> bool:
    """Can every item go into a bin without exceeding any capacity?"""
    items = sorted((x for x in items if x > 0), reverse=True)
    if sum(items, Q(0)) > sum(bins, Q(0)):
        return False
    memo = set()

    def go(k, caps):
        if k == len(items):
            return True
        if (k, caps) in memo:
            return False
        tried = set()
        for b, c in enumerate(caps):
            if c < items[k] or c in tried:
                continue
            tried.add(c)
            nxt = list(caps)
            nxt[b] = c - items[k]
            if go(k + 1, tuple(sorted(nxt, reverse=True))):
                return True
        memo.add((k, caps))
        return False

    return go(0, tuple(sorted(bins, reverse=True)))


def in_P_A(X: FiniteMMSpace, A) -> bool:
    """Is there a sequence of points x_i with sum a_i delta_{x_i} <= mu_X?

    Points may repeat, so this is bin packing of the atoms into the weights.
    """
    A = as_atoms(A)
    return _pack(list(A.atoms), list(X.weights))


def _cover_assignment(atoms: list[Fraction], free: Fraction, demands: list[Fraction]):
    """Assign atoms to groups so the total shortfall is at most ``free``.

    Returns a list giving each atom's group (or -1 for unused), or None.
    """
    G = len(demands)
    order = sorted(range(len(atoms)), key=lambda i: (-atoms[i], i))
    tail = [Q(0)] * (len(order) + 1)
    for a in range(len(order) - 1, -1, -1):
        tail[a] = tail[a + 1] + atoms[order[a]]
    choice = [-1] * len(atoms)
    failed = set()

    def go(a, residual):
        if sum(residual, Q(0)) <= free:
            return True
        if a == len(order) or sum(residual, Q(0)) - tail[a] > free:
            return False
        key = (a, tuple(sorted(residual)))
        if key in failed:
            return False
        x = atoms[order[a]]
        tried = set()
        for g in range(G):
            if residual[g] == 0 or residual[g] in tried:
                continue
            tried.add(residual[g])
            nxt = list(residual)
            nxt[g] = max(Q(0), nxt[g] - x)
            choice[order[a]] = g
            if go(a + 1, nxt):
                return True
            choice[order[a]] = -1
        if go(a + 1, residual):
            return True
        failed.add(key)
        return False

    return list(choice) if go(0, list(demands)) else None


def check_kappa_sum(kappa) -> KappaTuple:
    kappa = as_kappa(kappa)
    if kappa.total() >= 1:
        raise KappaSumTooLarge(f"kappa must sum to less than 1, got {fmt(kappa.total())}")
    return kappa


def coverable(A, kappa, delta=0) -> bool:
    """Can the atoms plus divisible free mass meet demands kappa_i - delta?"""
    A, kappa = as_atoms(A), as_kappa(kappa)
    delta = to_rational(delta)
    demands = [max(Q(0), k - delta) for k in kappa]
    return _cover_assignment(list(A.atoms), A.free_mass(), demands) is not None


def sep_atom_pyramid(A, kappa) -> SepValue:
    """Separation distance of P_A: always 0 or +infinity.

    If the demands can be met by indivisible atoms plus divisible free mass,
    N+1 clusters at any mutual distance L realize them inside P_A. If not,
    no member of P_A has disjoint sets at positive distance meeting them.
    The delta -> 0+ limit in the pyramid definition needs no extra search:
    total shortfall is continuous in delta and coverage is a closed
    condition, so coverage at kappa - delta for all small delta is the same
    as coverage at kappa.
    """
    A, kappa = as_atoms(A), as_kappa(kappa)
    return INFINITE if coverable(A, kappa) else ZERO


def atom_pyramid_witness(A, kappa, L) -> FiniteMMSpace:
    """A member of P_A with Sep(X; kappa) >= L, built from a covering.

    One point per group, all at mutual distance L; mass not needed by any
    group sits on group 0's point.
    """
    A, kappa = as_atoms(A), as_kappa(kappa)
    L = to_rational(L)
    choice = _cover_assignment(list(A.atoms), A.free_mass(), list(kappa))
    if choice is None:
        raise PreconditionError("the demands cannot be covered, Sep(P_A; kappa) = 0")
    G = len(kappa)
    masses = [Q(0)] * G
    for a, g in zip(A.atoms, choice):
        masses[g if g >= 0 else 0] += a
    for g in range(G):
        masses[g] += max(Q(0), kappa[g] - masses[g])
    masses[0] += 1 - sum(masses, Q(0))
    d = [[Q(0) if i == j else L for j in range(G)] for i in range(G)]
    return space(d, masses, [f"c{g}" for g in range(G)])


def first_difference(A, A2) -> int:
    """0-based index of the first entry where the sequences differ."""
    A, A2 = as_atoms(A), as_atoms(A2)
    if A == A2:
        raise EqualSequences("the sequences are equal")
    k = 0
    while A[k] == A2[k]:
        k += 1
    return k


def witness_member(A, A2) -> AtomSequence:
    """The sequence that is smaller at the first difference.

    The separating witness lies in the pyramid of this sequence and outside
    the pyramid of the other one.
    """
    A, A2 = as_atoms(A), as_atoms(A2)
    k = first_difference(A, A2)
    return A if A[k] < A2[k] else A2


def separating_witness(A, A2, m: int) -> FiniteMMSpace:
    """A finite space in P_A but not in P_A2.

    Atoms a_i sit at 2^-i and the free mass is spread evenly over ``m``
    points of [3/5, 1]. The sequences are swapped first if needed so that
    the one built from is smaller at the first index where they differ;
    use :func:`witness_member` to learn which one that is.
    """
    A, A2 = as_atoms(A), as_atoms(A2)
    k = first_difference(A, A2)
    if A[k] > A2[k]:
        A, A2 = A2, A
    if m < 1:
        raise MTooSmall("m must be at least 1")
    free = A.free_mass()
    u = free / m
    gap = (A2[k] - A[k]) / (k + 1)
    if u >= gap:
        raise MTooSmall(f"diffuse mass {fmt(u)} must be below {fmt(gap)}; increase m")
    coords = [Q(1, 2 ** (i + 1)) for i in range(len(A))]
    weights = list(A.atoms)
    labels = [f"a{i + 1}" for i in range(len(A))]
    if free > 0:
        step = Q(2, 5) / (m - 1) if m > 1 else Q(0)
        coords += [Q(3, 5) + step * j for j in range(m)]
        weights += [u] * m
        labels += [f"u{j + 1}" for j in range(m)]
    return line_space(coords, weights, labels)


def minimal_m(A, A2) -> int:
    """Smallest m accepted by :func:`separating_witness`."""
    A, A2 = as_atoms(A), as_atoms(A2)
    k = first_difference(A, A2)
    if A[k] > A2[k]:
        A, A2 = A2, A
    free = A.free_mass()
    if free == 0:
        return 1
    gap = (A2[k] - A[k]) / (k + 1)
    return int(free / gap) + 1
