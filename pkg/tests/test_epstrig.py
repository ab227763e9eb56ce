import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from weingarten_flow.epstrig import (
    EPSILONS, PoleError, check_eps, cos_eps, cot_eps, sec_eps, sin_eps, tan_eps,
)

eps_st = st.sampled_from(EPSILONS)


def test_table_values():
    assert cos_eps(0, 3.0) == 1.0 and sin_eps(0, 3.0) == 3.0
    assert cos_eps(1, 0.7) == math.cos(0.7) and sin_eps(1, 0.7) == math.sin(0.7)
    assert cos_eps(-1, 0.7) == math.cosh(0.7) and sin_eps(-1, 0.7) == math.sinh(0.7)


@pytest.mark.parametrize("eps", EPSILONS)
def test_pythagoras_on_grid(eps):
    for s in np.linspace(-3, 3, 61):
        assert abs(cos_eps(eps, s) ** 2 + eps * sin_eps(eps, s) ** 2 - 1) <= 1e-12 * cos_eps(eps, s) ** 2


@given(eps_st, st.floats(-5, 5))
def test_pythagoras_property(eps, s):
    lhs = cos_eps(eps, s) ** 2 + eps * sin_eps(eps, s) ** 2
    assert abs(lhs - 1) <= 1e-12 * max(1.0, cos_eps(eps, s) ** 2)


@pytest.mark.parametrize("eps", EPSILONS)
def test_cot_blows_up_at_zero(eps):
    assert cot_eps(eps, 1e-8) > 1e7


@given(eps_st, st.floats(-3, 3))
def test_sin_derivative_is_cos(eps, s):
    h = 1e-6
    fd = (sin_eps(eps, s + h) - sin_eps(eps, s - h)) / (2 * h)
    assert abs(fd - cos_eps(eps, s)) <= 1e-6 * max(1.0, cos_eps(eps, s))


@pytest.mark.parametrize("eps", EPSILONS)
def test_pole_raises(eps):
    with pytest.raises(PoleError):
        cot_eps(eps, 0.0)


def test_sec_and_tan_quotients():
    assert sec_eps(1, 0.5) == pytest.approx(1 / math.cos(0.5), rel=1e-15)
    assert tan_eps(-1, 0.5) == pytest.approx(math.tanh(0.5), rel=1e-15)
    assert sec_eps(0, 12.0) == 1.0


def test_bad_eps_rejected():
    with pytest.raises(ValueError):
        check_eps(2)
    with pytest.raises(ValueError):
        cos_eps(0.5, 1.0)
