import random

import pytest
from hypothesis import settings, strategies as st

from mmkit.core import line_space, space
from mmkit.corpus import random_space

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def X3_space():
    return space([[0, 1, 2], [1, 0, 3], [2, 3, 0]], ["1/2", "1/4", "1/4"], ["a", "b", "c"])


def Y_space(eps="3/10"):
    from fractions import Fraction
    e = Fraction(eps)
    return line_space([0, 1], [1 - e, e], ["0", "1"])


@pytest.fixture
def X3():
    return X3_space()


@pytest.fixture
def Y03():
    return Y_space()


def spaces(n_min=2, n_max=6):
    """Hypothesis strategy: seeded corpus spaces."""
    return st.integers(0, 10**9).map(lambda s: random_space(random.Random(s), n_min, n_max))


rationals = st.fractions(min_value=0, max_value=1, max_denominator=12)


def pytest_terminal_summary(terminalreporter):
    import test_acceptance
    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(test_acceptance.RESULTS[k])
