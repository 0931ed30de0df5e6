import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from lacunorm.orlicz import OrliczFunction, validate

FAMILIES = [
    OrliczFunction.identity(),
    OrliczFunction.power(1.5),
    OrliczFunction.power(3),
    OrliczFunction("power-log", {"p": 2}),
    OrliczFunction("exp-minus-one"),
    OrliczFunction("table", {"knots": [[0, 0], [1, 1], [2, 3], [4, 9]]}),
]


def test_identity_value():
    assert OrliczFunction.identity()(0.7) == 0.7


def test_square_value():
    assert OrliczFunction.power(2)(3.0) == 9.0


def test_exp_minus_one_value():
    assert OrliczFunction("exp-minus-one")(1.0) == pytest.approx(math.expm1(1.0), rel=1e-15)


def test_table_interpolates_and_extends_linearly():
    M = OrliczFunction("table", {"knots": [[0, 0], [1, 1], [2, 3]]})
    assert M(0.5) == 0.5
    assert M(1.5) == 2.0
    assert M(4.0) == 7.0


def test_negative_argument_rejected():
    with pytest.raises(ValueError):
        OrliczFunction.identity()(-1e-9)


@pytest.mark.parametrize("bad", [
    ("power", {"p": 0.5}),
    ("table", {"knots": [[0, 1], [1, 2]]}),
    ("table", {"knots": [[0, 0], [1, 1], [1, 2]]}),
    ("cosine", {}),
])
def test_bad_parameters_rejected(bad):
    with pytest.raises(ValueError):
        OrliczFunction(*bad)


@pytest.mark.parametrize("M", FAMILIES, ids=lambda m: m.family)
def test_zero_is_exact(M):
    assert M(0.0) == 0.0
    assert M.eval(np.zeros(3)).tolist() == [0.0, 0.0, 0.0]


@pytest.mark.parametrize("M", FAMILIES, ids=lambda m: m.family)
def test_builtin_families_validate(M):
    rep = validate(M, 64, 100)
    assert rep.passed, [c for c in rep.checks if not c.passed]


def test_power_family_validates():
    assert validate(OrliczFunction.power(1.5), 64, 100).passed


def test_concave_table_fails_convexity():
    M = OrliczFunction("table", {"knots": [[0, 0], [1, 2], [2, 3]]})
    rep = validate(M, 64, 2)
    assert not rep["convex"].passed
    assert rep["monotone"].passed and rep["zero"].passed
    t1, t2 = rep["convex"].worst
    assert t1 < 1 < t2


def test_identity_validates_on_tiny_grid():
    assert validate(OrliczFunction.identity(), 3, 1).passed


def test_bounded_probe_reports_growth_failure():
    rep = validate(OrliczFunction.power(2), 16, 0.5)
    assert not rep["unbounded"].passed


def test_grid_too_small():
    with pytest.raises(ValueError):
        validate(OrliczFunction.identity(), 2, 1)


@pytest.mark.parametrize("M", FAMILIES[:-1], ids=lambda m: m.family)
@given(st.floats(0, 1e6), st.floats(0, 1e6))
def test_monotone_on_random_pairs(M, a, b):
    t1, t2 = sorted((a, b))
    assert M(t1) <= M(t2)


@pytest.mark.parametrize("M", FAMILIES, ids=lambda m: m.family)
@given(st.floats(1e-3, 50), st.floats(1e-3, 1e3), st.floats(1e-3, 1e3))
def test_scaled_argument_nonincreasing_in_rho(M, t, r1, r2):
    lo, hi = sorted((r1, r2))
    assert M(t / hi) <= M(t / lo)
