import numpy as np
import pytest

from fpuwave.field import Field, KernelTerm, SpectralTerm, TrigTerm, WTerm
from fpuwave.kernels import SignSource
from fpuwave.spectral import find_kc
from scipy.special import erf


def test_kernel_terms_merge():
    s = SignSource()
    F = Field([KernelTerm(s, 2, 1.0), KernelTerm(s, 2, 0.5), KernelTerm(s, 0, 1.0)])
    G = F.simplified()
    assert len(G.terms) == 2
    x = np.linspace(-2, 2, 9)
    np.testing.assert_allclose(G(x), F(x), atol=1e-15)


def test_trig_term_derivatives():
    T = TrigTerm(1.3, 0.2, 0.5, -0.7)
    x = np.linspace(-3, 3, 13)
    np.testing.assert_allclose(T(x), 0.2 + 0.5 * np.cos(1.3 * x) - 0.7 * np.sin(1.3 * x))
    np.testing.assert_allclose(T(x, 2), -1.69 * (0.5 * np.cos(1.3 * x) - 0.7 * np.sin(1.3 * x)))


def test_w_term_matches_erf_formula():
    ctx = find_kc(0.95)
    w = WTerm(ctx.k_c, ctx.y_scale, 0.5, 1.0, 0.0)
    x = np.array([-3.0, -0.4, 0.0, 1.1, 6.0])
    ref = ctx.y_scale * (np.cos(ctx.k_c * x) * erf(x / (2 * 0.5)))
    # far from the origin W1 coincides with Y1 = C cos(k_c x) sgn(x)
    assert w(np.array([8.0]))[0] == pytest.approx(ctx.y_scale * np.cos(ctx.k_c * 8.0), rel=1e-12)
    assert abs(w(np.array([0.0]))[0]) < 1e-12
    assert np.all(np.isfinite(w(x))) and ref.shape == x.shape


def test_spectral_term_interpolation():
    h = 1 / 64
    x = (np.arange(1024) - 512) * h
    f = np.exp(-x * x)
    S = SpectralTerm(x[0], h, f, -2 * x * f, (4 * x * x - 2) * f)
    np.testing.assert_array_equal(S(x[100:110]), f[100:110])
    y = np.array([0.0071, 1.2345, -2.5])
    np.testing.assert_allclose(S(y), np.exp(-y * y), atol=1e-9)
    np.testing.assert_allclose(S(y, 1), -2 * y * np.exp(-y * y), atol=1e-7)
