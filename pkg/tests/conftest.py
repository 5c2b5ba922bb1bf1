import pytest

from selmercert.curve import CurveModel

# Classical minimal models; discriminants are recomputed and validated by
# CurveModel itself, so a typo here fails loudly.
CURVE_11A1 = ((0, -1, 1, -10, -20), 11, 1)
CURVE_37A1 = ((0, 0, 1, -1, 0), 37, 2)
CURVE_27A1 = ((0, 0, 1, 0, -7), 27, None)
CURVE_14A1 = ((1, 0, 1, 4, -6), 14, 1)


def make_curve(spec):
    a_invs, conductor, degree = spec
    return CurveModel.from_a_invariants(a_invs, conductor, degree)


@pytest.fixture(scope="session")
def e11a1():
    return make_curve(CURVE_11A1)


@pytest.fixture(scope="session")
def e37a1():
    return make_curve(CURVE_37A1)


@pytest.fixture(scope="session")
def e27a1():
    return make_curve(CURVE_27A1)


@pytest.fixture(scope="session")
def e14a1():
    return make_curve(CURVE_14A1)
