import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from conftest import make_space
from lacunorm.lacunary import LacunarySequence
from lacunorm.norms import (
    Exponents, block_modulars, dual_norm, luxemburg_direct, luxemburg_norm,
    luxemburg_rows, modular, n_theta_norm,
)
from lacunorm.orlicz import OrliczFunction
from lacunorm.transform import LambdaSystem, apply_lambda_bar, inverse_transform

DYADIC = LacunarySequence.geometric(2, 1)
E1 = np.array([0.0, 1.0])


def x_with_image(y, lam=None):
    return inverse_transform(lam or LambdaSystem.shift(), y)


class TestModular:
    def test_zero(self, space):
        assert modular(np.zeros(9), space, 0.3, 3) == 0.0

    def test_single_term(self, space):
        assert modular(E1, space, 1.0, 3) == 0.5
        assert block_modulars(E1, space, 1.0, 3).tolist() == [0, 0.5, 0, 0]

    def test_two_terms_in_one_block(self, space):
        assert modular([0, 1, 1, 0], space, 2.0, 3) == 0.5

    def test_rho_must_be_positive(self, space):
        with pytest.raises(ValueError):
            modular(E1, space, 0.0, 3)

    def test_exponents_apply_per_term(self):
        S = make_space(s=Exponents("explicit", values=[1, 2, 2, 1, 1, 1, 1, 1, 1]))
        assert modular([0, 2, 0], S, 1.0, 3) == 2.0

    def test_explicit_exponents_too_short(self):
        S = make_space(s=Exponents("explicit", values=[1, 1]))
        with pytest.raises(ValueError):
            modular(E1, S, 1.0, 3)


class TestLuxemburg:
    def test_zero(self, space):
        rep = luxemburg_norm(np.zeros(8), space, 3)
        assert rep.value == 0.0 and rep.block_reduction == "sup"

    def test_image_e1(self, space):
        rep = luxemburg_norm(x_with_image(E1), space, 3)
        assert abs(rep.value - 0.5) < 1e-10
        lo, hi = rep.rho_bracket
        assert lo <= 0.5 <= hi
        assert rep.modular_at_value <= 1.0

    @pytest.mark.parametrize("p", [1.5, 2, 3])
    def test_power_family(self, p):
        S = make_space(M=OrliczFunction.power(p))
        assert abs(luxemburg_norm(x_with_image(E1), S, 3).value - 0.5 ** (1 / p)) < 1e-10

    def test_homogeneity_spot(self, space, rng):
        x = rng.standard_normal(8)
        assert luxemburg_norm(2 * x, space, 3).value == pytest.approx(2 * luxemburg_norm(x, space, 3).value,
                                                                      rel=1e-9)

    def test_rows_agree_with_single(self, rng):
        S = make_space(M=OrliczFunction("exp-minus-one"))
        U = rng.standard_normal((5, 16))
        _, hi, _ = luxemburg_rows(U, S, 4)
        for u, v in zip(U, hi):
            assert luxemburg_direct(u, S, 4).value == v

    def test_large_and_tiny_scales(self, space):
        for scale in (1e-200, 1e200):
            assert luxemburg_direct(scale * E1, space, 3).value == pytest.approx(scale / 2, rel=1e-9)

    def test_coordinates_past_truncation_ignored(self, space):
        u = np.zeros(20)
        u[15] = 7.0
        assert luxemburg_direct(u, space, 3).value == 0.0


class TestBlockNorm:
    def test_ones(self):
        assert n_theta_norm(np.ones(64), DYADIC, 6) == 1.0

    def test_e1(self):
        assert n_theta_norm(E1, DYADIC, 3) == 0.5

    def test_zero(self):
        assert n_theta_norm(np.zeros(4), DYADIC, 3) == 0.0

    @settings(max_examples=50)
    @given(arrays(float, 17, elements=st.floats(-1e3, 1e3)))
    def test_identity_orlicz_reduces_to_block_norm(self, x):
        S = make_space()
        expected = n_theta_norm(apply_lambda_bar(S.lam, x), DYADIC, 4)
        got = luxemburg_norm(x, S, 4).value
        assert abs(got - expected) <= 1e-8 * max(1.0, expected)


class TestDualNorm:
    def test_zero(self, space):
        assert dual_norm(np.zeros(5), space) == 0.0

    def test_first_unit(self, space):
        assert dual_norm([1, 0, 0], space) == 1.0

    def test_square_weights(self):
        assert dual_norm([0, 1], LambdaSystem.power(2)) == pytest.approx(2.0, rel=1e-15)


def test_unknown_target():
    with pytest.raises(ValueError):
        make_space(target="l2")


def test_bad_exponents():
    with pytest.raises(ValueError):
        Exponents("constant", 0.0)
    with pytest.raises(ValueError):
        Exponents("explicit", values=[1, -1])
