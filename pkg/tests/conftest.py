import os
from fractions import Fraction

import pytest
import sympy
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from crossover_uo.catalog import fixture_4_3_12
from crossover_uo.ratmat import RationalMatrix

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def H(v):
    return RationalMatrix.centering(v)


def J(r, c=None):
    return RationalMatrix.ones(r, c)


def to_sympy(M):
    return sympy.Matrix(M.rows, M.cols, [sympy.Rational(x.numerator, x.denominator)
                                         for row in M.tolist() for x in row])


def from_sympy(S):
    return RationalMatrix([[Fraction(int(x.p), int(x.q)) for x in S.row(i)] for i in range(S.rows)])


small_q = st.fractions(min_value=-5, max_value=5, max_denominator=6)


@st.composite
def rational_matrices(draw, min_size=1, max_size=5, square=False):
    r = draw(st.integers(min_size, max_size))
    c = r if square else draw(st.integers(min_size, max_size))
    return RationalMatrix([[draw(small_q) for _ in range(c)] for _ in range(r)])


@st.composite
def gram_matrices(draw, max_size=5):
    """B B' for a random rational B: symmetric n.n.d., often singular."""
    B = draw(rational_matrices(1, max_size))
    return B @ B.T


@st.composite
def design_grids(draw, p=None, v=None, n=None, max_p=4, max_v=4, max_n=6):
    p = p or draw(st.integers(2, max_p))
    v = v or draw(st.integers(2, max_v))
    n = n or draw(st.integers(1, max_n))
    grid = [[draw(st.integers(1, v)) for _ in range(n)] for _ in range(p)]
    return grid, v


@pytest.fixture
def fixture_design():
    return fixture_4_3_12()


# one line per acceptance criterion, printed at the end of the run
ACCEPTANCE = {}


def record(n, ok, detail, seconds):
    ACCEPTANCE[n] = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}  [{seconds:.2f} s]"


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
