"""Fiber coordinates of the scale action.

``r_delta`` integrates the partial-diameter profile and trivializes the
bundle over spaces whose atoms are all lighter than Delta; ``r_kappa``
integrates the separation profile and plays the same role for pyramids.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .core import FiniteMMSpace, find_isomorphism, fmt, scale, to_rational
from .errors import InvalidDelta, NotInPiKappa, NotInXDelta, NotSameOrbit, ValidationError
from .invariants import partial_diam_profile, sep_profile, step_integral
from .pyramids import AssociatedPyramid, AtomPyramid, check_kappa_sum

Q = Fraction


@dataclass(frozen=True)
class Delta:
    value: Fraction

    def __post_init__(self):
        if not 0 < self.value < 1:
            raise InvalidDelta(f"delta must lie in (0, 1), got {fmt(self.value)}")


def as_delta(delta) -> Delta:
    if isinstance(delta, Delta):
        return delta
    try:
        return Delta(to_rational(delta))
    except InvalidDelta:
        raise
    except ValidationError as exc:
        raise InvalidDelta(str(exc)) from None


@dataclass(frozen=True)
class TrivializedPoint:
    section_rep: FiniteMMSpace
    radius: Fraction

    def to_json(self) -> dict:
        return {"section_rep": self.section_rep.to_json(), "radius": fmt(self.radius)}


def in_X_delta(X: FiniteMMSpace, delta) -> bool:
    return X.max_atom() < as_delta(delta).value


def r_delta(X: FiniteMMSpace, delta) -> Fraction:
    """Integral of ``diam(X; s)`` over ``[0, (Delta + 1)/2]``."""
    delta = as_delta(delta)
    if not in_X_delta(X, delta):
        raise NotInXDelta(f"an atom of mass {fmt(X.max_atom())} is not below {fmt(delta.value)}")
    upper = (delta.value + 1) / 2
    return step_integral(partial_diam_profile(X, upper), 0, upper)


def trivialize(X: FiniteMMSpace, delta) -> TrivializedPoint:
    r = r_delta(X, delta)
    return TrivializedPoint(scale(X, 1 / r), r)


def untrivialize(p: TrivializedPoint, t, delta) -> FiniteMMSpace:
    as_delta(delta)
    return scale(p.section_rep, t)


def recover_scale(X: FiniteMMSpace, X2: FiniteMMSpace, delta) -> Fraction:
    """The t with ``scale(X, t)`` isomorphic to X2, certified by an isomorphism."""
    t = r_delta(X2, delta) / r_delta(X, delta)
    if find_isomorphism(scale(X, t), X2) is None:
        raise NotSameOrbit("the spaces do not lie in one orbit of the scale action")
    return t


def in_Pi_kappa(P, kappa) -> bool:
    """Finite separation at kappa and positive separation at kappa + delta.

    For P_X the value equals Sep(X; kappa) and is always finite, so only
    the profile just to the right of 0 matters. Atom pyramids take
    only the values 0 and infinity and are never members.
    """
    kappa = check_kappa_sum(kappa)
    if isinstance(P, AtomPyramid):
        return False
    if isinstance(P, AssociatedPyramid):
        f = sep_profile(P.space, kappa, 1)
        # a break at 0 means the first segment is the single point {0}
        first = 1 if f.breaks and f.breaks[0] == 0 else 0
        return f.values[first] > 0
    raise TypeError(f"unsupported pyramid representation {type(P).__name__}")


def r_kappa(P, kappa) -> Fraction:
    """Integral of ``Sep(P; kappa + s)`` over ``[0, 1]``."""
    if not in_Pi_kappa(P, kappa):
        raise NotInPiKappa(f"the pyramid is not in Pi_kappa for kappa = ({kappa})")
    return step_integral(sep_profile(P.space, kappa, 1), 0, 1)
