"""Exact invariants, distances and scale-bundle coordinates for finite mm-spaces."""

from .core import (
    FiniteMMSpace,
    find_isomorphism,
    from_json,
    is_mm_isomorphic,
    line_space,
    load_space,
    one_point,
    scale,
    space,
    to_rational,
    validate_space,
)
from .invariants import (
    KappaTuple,
    StepFunction,
    partial_diam,
    partial_diam_profile,
    sep,
    sep_profile,
    step_integral,
)

__version__ = "0.1.0"
