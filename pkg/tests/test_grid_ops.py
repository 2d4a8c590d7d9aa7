import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fpuwave.errors import GridMismatch, ValidationError
from fpuwave.grid_ops import (GridProfile, apply_A, apply_A2, apply_Delta1, apply_M, apply_nabla,
                              derivative, simpson_weights, sup_norms)
from fpuwave.spectral import dispersion, find_kc


def test_simpson_symbol_oracle():
    # sum_j w_j cos(k x_j) at h = 1/8, k = 1.3, computed at 40 digits
    F = GridProfile.from_function(lambda x: np.cos(1.3 * x), 4.0, 1 / 8)
    assert apply_A(F).values[F.center] == pytest.approx(0.93105962695040497, abs=1e-15)


def test_weights_sum_to_one():
    for n in (1, 4, 128):
        w = simpson_weights(n)
        assert w.sum() == pytest.approx(1.0, abs=1e-15)
        assert len(w) == 2 * n + 1


@pytest.mark.parametrize("h", [0.3, 1 / 6, 1 / 4, 1 / 10.5])
def test_odd_subdivision_rejected(h):
    with pytest.raises(ValidationError):
        GridProfile.from_function(np.cos, 4.0, h)


def test_grid_mismatch():
    a = GridProfile.from_function(np.cos, 4.0, 1 / 8)
    b = GridProfile.from_function(np.cos, 4.0, 1 / 16)
    with pytest.raises(GridMismatch):
        a + b


@pytest.mark.parametrize("k", [0.3, 1.1, 2.7])
def test_A_diagonal_on_cosines(k):
    F = GridProfile.from_function(lambda x: np.cos(k * x), 10.0, 1 / 256)
    out = apply_A(F)
    m = F.interior(1.0)
    a = np.sin(k / 2) / (k / 2)
    assert np.max(np.abs(out.values[m] - a * F.values[m])) < 1e-9


@settings(max_examples=30, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=33, max_size=33), st.floats(-3, 3))
def test_A_linear_and_reflection_symmetric(vals, s):
    v = np.array(vals)
    F = GridProfile(2.0, 1 / 8, v)
    G = GridProfile(2.0, 1 / 8, v[::-1].copy())
    np.testing.assert_allclose(apply_A(F.scaled(s)).values, s * apply_A(F).values, atol=1e-12)
    np.testing.assert_allclose(apply_A(G).values, apply_A(F).values[::-1], atol=1e-12)
    np.testing.assert_allclose(apply_A2(F).values, apply_A(apply_A(F)).values)


def test_M_of_constant():
    ctx = find_kc(0.9)
    F = GridProfile.from_function(lambda x: np.ones_like(x), 4.0, 1 / 64)
    np.testing.assert_allclose(apply_M(F, ctx).values, 1 - 0.81, atol=1e-14)


def test_derivative_fourth_order():
    errs = []
    for h in (1 / 16, 1 / 32):
        F = GridProfile.from_function(np.sin, 3.0, h)
        errs.append(np.max(np.abs(derivative(F.values, h, 1) - np.cos(F.x))))
    assert np.log2(errs[0] / errs[1]) > 3.5


def test_profile_helpers():
    F = GridProfile.from_function(lambda x: x**2, 2.0, 1 / 8)
    assert F.size == 33 and F.x[F.center] == 0.0
    assert F.index(0.5) == F.center + 4
    assert not F.values.flags.writeable
    n0, n1, n2 = sup_norms(F)
    assert n0 == pytest.approx(4.0) and n2 == pytest.approx(2.0, rel=1e-10)
    assert ((F - F).values == 0).all()


@pytest.mark.parametrize("h", [1 / 64, 1 / 256])
def test_A_of_sign(h):
    # quadrature across the jump is first order: error at most h / 3
    F = GridProfile.from_function(np.sign, 4.0, h)
    ref = np.where(np.abs(F.x) <= 0.5, 2 * F.x, np.sign(F.x))
    m = F.interior(1.0)
    err = np.abs(apply_A(F).values - ref)[m]
    assert np.max(err) <= h / 3 + 1e-15
    assert np.max(err[np.abs(F.x[m]) >= 0.5 + h]) < 1e-14


def test_A2_minus_identity_of_sign():
    errs = []
    for h in (1 / 64, 1 / 128):
        F = GridProfile.from_function(np.sign, 6.0, h)
        x = F.x
        ref = np.where(np.abs(x) < 1, 2 * x - x * np.abs(x) - np.sign(x), 0.0)
        m = F.interior(1.5)
        err = np.abs(apply_A2(F).values - F.values - ref)[m]
        assert np.max(err[np.abs(x[m]) >= 1 + h]) < 1e-14
        errs.append(np.max(err))
    assert np.log2(errs[0] / errs[1]) > 1.8


def test_nabla_and_second_difference_on_trig():
    ctx = find_kc(0.95)
    k = ctx.k_c
    F = GridProfile.from_function(lambda x: np.sin(k * x), 10.0, 1 / 256)
    m = F.interior(1.5)
    assert np.max(np.abs(apply_nabla(F).values - 2 * np.sin(k / 2) * np.cos(k * F.x))[m]) < 1e-12
    C = GridProfile.from_function(lambda x: np.cos(k * x), 10.0, 1 / 256)
    lhs = apply_Delta1(C).values
    assert np.max(np.abs(lhs + dispersion(k) ** 2 * C.values)[m]) < 1e-12


def test_sup_norms_of_sine():
    F = GridProfile.from_function(np.sin, 10.0, 1 / 256)
    np.testing.assert_allclose(sup_norms(F, F.interior(1.0)), (1.0, 1.0, 1.0), atol=1e-6)
