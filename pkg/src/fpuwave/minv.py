"""Solving ``M S = A^2 G + eta`` for compactly supported ``G``.

The symbol ``m(k) = a(k)^2 - c^2`` vanishes at ``+-k_c``; the inverse is made
well defined by subtracting a multiple of the sign-modulated kernels ``Y_i``
whose transforms carry the same poles.  Numerically we

* peel off the first terms of the Neumann series
  ``1/m = -(1/c^2) sum_n (a^2/c^2)^n + (a^2/c^2)^N / m``, which are applied
  exactly in real space through B-spline convolutions, and
* invert the smooth remainder with a discrete Fourier transform, using
  Gaussian-damped copies ``W_i`` of ``Y_i`` to remove the poles.

Grid-sampled sources skip the Neumann split and invert the exact discrete
symbol of the Simpson average instead, so the grid residual is at round-off.
"""
from dataclasses import dataclass, field

import numpy as np

from . import grid_ops as g
from .errors import NotCompact, ResidualTooLarge
from .field import Field, KernelTerm, SpectralTerm, TrigTerm, WTerm
from .grid_ops import GridProfile
from .spectral import a_symbol, m_symbol

SQRT2PI = np.sqrt(2 * np.pi)

KAPPA_FRAC = 1e-3
W_WIDTH = 0.5
NEUMANN_TERMS = 3
VERIFY_RTOL = 1e-6


# ---------------------------------------------------------------- kernels
def y_kernels(x, ctx):
    """``(Y1, Y2)`` sampled at ``x``."""
    x = np.asarray(x, dtype=float)
    C = ctx.y_scale
    s = np.sign(x)
    return C * np.cos(ctx.k_c * x) * s, C * np.sin(ctx.k_c * x) * s


def y_hat(k, ctx):
    """Closed-form transforms ``(Y1^, Y2^)``; singular at ``+-k_c``."""
    k = np.asarray(k, dtype=float)
    d = ctx.m_prime_kc * (k * k - ctx.k_c**2)
    return 2j * k / d, -2.0 * ctx.k_c / d + 0j


@dataclass(frozen=True)
class YKernelPair:
    Y1: GridProfile
    Y2: GridProfile
    ctx: object

    @classmethod
    def build(cls, ctx, L, h):
        x = GridProfile.from_function(np.zeros_like, L, h).x
        y1, y2 = y_kernels(x, ctx)
        return cls(GridProfile(L, h, y1, "Y1"), GridProfile(L, h, y2, "Y2"), ctx)

    def hat(self, k):
        return y_hat(k, self.ctx)


def w_term(ctx, a1, a2, width=W_WIDTH):
    return WTerm(ctx.k_c, ctx.y_scale, width, a1, a2)


# ------------------------------------------------------- transforms / FFT
def fft_size(npoints):
    M = 1
    while M < 2 * npoints:
        M *= 2
    return M


def fourier_of_compact(Q, support=None, tol=1e-12):
    """Transform ``Q^(k) = (2 pi)^{-1/2} int exp(ikx) Q(x) dx`` of a grid profile.

    Returns callables for ``Q^`` and ``dQ^/dk`` using Simpson weights over
    ``support`` (default: the whole grid).
    """
    x = Q.x
    v = Q.values
    if support is None:
        inside = np.ones(len(x), bool)
    else:
        inside = Q.window(*support)
        if np.max(np.abs(v[~inside]), initial=0.0) > tol:
            raise NotCompact("profile has mass outside the declared support")
    xs, vs = x[inside], v[inside]
    w = np.ones(len(xs))
    if len(xs) % 2 == 1 and len(xs) >= 3:
        w[1:-1:2], w[2:-1:2] = 4.0, 2.0
        w *= Q.h / 3
    else:
        w *= Q.h
        w[[0, -1]] *= 0.5
    wv = w * vs / SQRT2PI

    def qhat_fn(k):
        kk = np.asarray(k, dtype=float)
        out = np.exp(1j * np.multiply.outer(kk.ravel(), xs)) @ wv
        return out.reshape(kk.shape)

    def dqhat_fn(k):
        kk = np.asarray(k, dtype=float)
        out = np.exp(1j * np.multiply.outer(kk.ravel(), xs)) @ (1j * xs * wv)
        return out.reshape(kk.shape)

    return qhat_fn, dqhat_fn


@dataclass
class PoleInverse:
    """Output of the pole-regularised spectral inverse on the FFT grid."""

    x0: float
    h: float
    z: np.ndarray
    dz: np.ndarray
    d2z: np.ndarray
    f1p: float
    f2p: float
    diagnostics: dict = field(default_factory=dict)

    def spectral_term(self):
        return SpectralTerm(self.x0, self.h, self.z, self.dz, self.d2z)


def simpson_symbol(k, h):
    """Symbol of the composite-Simpson unit average on spacing ``h``."""
    n = round(0.5 / h)
    w = g.simpson_weights(n)
    off = (np.arange(2 * n + 1) - n) * h
    k = np.asarray(k, dtype=float)
    return np.cos(np.multiply.outer(k, off)) @ w


def _simpson_symbol_fft(M, h):
    n = round(0.5 / h)
    w = g.simpson_weights(n)
    arr = np.zeros(M)
    idx = (np.arange(2 * n + 1) - n) % M
    np.add.at(arr, idx, w)
    return np.fft.fft(arr).real


def pole_inverse(q, h, ctx, symbol="exact", kappa_frac=KAPPA_FRAC, width=W_WIDTH):
    """Invert ``m`` on a source ``q`` sampled at ``x_j = (j - M/2) h``.

    Returns ``Z`` with ``Z^ = (Q^ + f1' m W1^ + f2' m W2^) / m`` so that
    ``F = Z - f1' W1 - f2' W2`` solves ``M F = Q``.
    """
    q = np.asarray(q, dtype=float)
    M = len(q)
    c2 = ctx.c**2
    kc = ctx.k_c
    x = (np.arange(M) - M // 2) * h
    ell = np.fft.fftfreq(M, 1.0 / M)
    k = 2 * np.pi * ell / (M * h)
    sgn = np.where(ell.astype(np.int64) % 2 == 0, 1.0, -1.0)
    qhat = (h / SQRT2PI) * sgn * M * np.fft.ifft(q)

    if symbol == "exact":
        msym = a_symbol(k) ** 2 - c2

        def mfun(kk):
            return m_symbol(kk, ctx.c)

    elif symbol == "simpson":
        msym = _simpson_symbol_fft(M, h) ** 2 - c2

        def mfun(kk):
            return simpson_symbol(kk, h) ** 2 - c2

    else:
        raise ValueError(f"unknown symbol {symbol!r}")

    nz = np.flatnonzero(q)
    xs, qs = x[nz], q[nz]

    def qhat_direct(kk):
        kk = np.atleast_1d(kk)
        return np.exp(1j * np.outer(kk, xs)) @ qs * (h / SQRT2PI)

    qc = qhat_direct(kc)[0]
    f1p = float(-qc.imag)
    f2p = float(qc.real)

    def damp(kk):
        return np.exp(-width**2 * (kk * kk - kc * kc))

    def zhat(kk, qh, mm):
        y1, y2 = y_hat(kk, ctx)
        e = damp(kk)
        return (qh + mm * e * (f1p * y1 + f2p * y2)) / mm

    kap = kappa_frac * kc
    near = np.abs(np.abs(k) - kc) < kap
    zh = np.empty(M, complex)
    far = ~near
    zh[far] = zhat(k[far], qhat[far], msym[far])
    for i in np.flatnonzero(near):
        s = np.sign(k[i])
        kk = np.array([s * kc - kap, s * kc + kap])
        zz = zhat(kk, qhat_direct(kk), mfun(kk))
        t = (k[i] - kk[0]) / (2 * kap)
        zh[i] = (1 - t) * zz[0] + t * zz[1]

    dk = 2 * np.pi / (M * h)
    scale = dk / SQRT2PI

    def back(spec):
        return (scale * np.fft.fft(sgn * spec)).real

    z = back(zh)
    dz = back(-1j * k * zh)
    d2z = back(-k * k * zh)
    tail = float(np.max(np.abs(z[: M // 16])) + np.max(np.abs(z[-M // 16 :])))
    diag = {"n_window": int(near.sum()), "z_tail": tail, "kappa": kap}
    return PoleInverse(float(x[0]), h, z, dz, d2z, f1p, f2p, diag)


# --------------------------------------------------------- grid interface
@dataclass
class AffineSolveResult:
    """``S`` in the non-oscillating-at-plus-infinity class together with ``eta``."""

    S: GridProfile
    eta: float
    Z: GridProfile
    f1: float
    f2: float
    lam: float
    sigma: float
    residual: float = float("nan")


def _embed(values, M):
    arr = np.zeros(M)
    n = len(values)
    start = M // 2 - n // 2
    arr[start : start + n] = values
    return arr, start


def invert_M_regularized(Q, ctx, symbol="simpson", verify=True, rtol=VERIFY_RTOL):
    """Regularised inverse of ``M`` for a compact grid source.

    Returns ``(Z, f1, f2)`` where ``Z - f1*Y1 - f2*Y2`` solves ``M(.) = Q``
    with ``f1 = -Im Q^(k_c)`` and ``f2 = Re Q^(k_c)``.
    """
    M = fft_size(Q.size)
    q, start = _embed(Q.values, M)
    inv = pole_inverse(q, Q.h, ctx, symbol=symbol)
    sl = slice(start, start + Q.size)
    wt = w_term(ctx, 1.0, 0.0)
    w1, w2 = (wt.complex_parts(Q.x).real, wt.complex_parts(Q.x).imag)
    y1, y2 = y_kernels(Q.x, ctx)
    # Z - f'.W is the solution; rewrite as (Z - f'.W + f'.Y) - f'.Y
    zsplit = inv.z[sl] - inv.f1p * (w1 - y1) - inv.f2p * (w2 - y2)
    Z = Q.with_values(zsplit, "Z")
    if verify:
        # the solution itself is smooth: Z - f'.Y = z - f'.W
        sol = Q.with_values(inv.z[sl] - inv.f1p * w1 - inv.f2p * w2)
        _verify(sol, Q, ctx, rtol)
    return Z, inv.f1p, inv.f2p


def _verify(sol, rhs, ctx, rtol, margin=2.0):
    res = g.apply_M(sol, ctx).values - rhs.values
    mask = sol.interior(margin)
    ref = max(np.max(np.abs(rhs.values)), 1e-300)
    err = float(np.max(np.abs(res[mask]), initial=0.0))
    if err > rtol * ref:
        raise ResidualTooLarge(f"inversion residual {err:.3e} exceeds {rtol:g}*|Q|")
    return err


def _assemble(St, x, i0, f1, f2, ctx, trig):
    """X-class assembly from a particular solution ``St`` sampled at ``x``."""
    C = ctx.y_scale
    s0 = St[i0]
    if trig:
        S = St - s0 - f1 * C * (np.cos(ctx.k_c * x) - 1.0) - f2 * C * np.sin(ctx.k_c * x)
        eta = (1 - ctx.c**2) * (f1 * C - s0)
    else:
        S = St - s0
        eta = -(1 - ctx.c**2) * s0
    S[i0] = 0.0
    return S, float(eta), float(s0)


def _affine_grid(G, ctx, trig, verify, rtol):
    if np.max(np.abs(G.values[~G.window(-1.0, 1.0)]), initial=0.0) > 0:
        raise NotCompact("G must vanish outside [-1, 1]")
    Q = g.apply_A2(G)
    M = fft_size(Q.size)
    q, start = _embed(Q.values, M)
    inv = pole_inverse(q, G.h, ctx, symbol="simpson")
    sl = slice(start, start + Q.size)
    wt = w_term(ctx, -inv.f1p, -inv.f2p)
    St = inv.z[sl] + wt(G.x)
    f1, f2 = -inv.f1p, -inv.f2p
    S, eta, s0 = _assemble(St, G.x, G.center, f1, f2, ctx, trig)
    Sp = G.with_values(S, "S")
    y1, y2 = y_kernels(G.x, ctx)
    Z = G.with_values(St - f1 * y1 - f2 * y2, "Z")
    res = float("nan")
    if verify:
        res = _verify(Sp, Q.with_values(Q.values + eta), ctx, rtol)
    return AffineSolveResult(Sp, eta, Z, f1, f2, lam=s0, sigma=f1 * ctx.y_scale - s0,
                             residual=res)


def affine_solve(G, ctx, verify=True, rtol=VERIFY_RTOL):
    """Solve ``M S = A^2 G + eta`` with ``S(0) = 0`` and no oscillation at ``+inf``."""
    return _affine_grid(G, ctx, True, verify, rtol)


def affine_solve_plain(G, ctx, verify=True, rtol=VERIFY_RTOL):
    """Variant without the trigonometric correction (oscillates on both sides)."""
    return _affine_grid(G, ctx, False, verify, rtol)


# -------------------------------------------------------- field interface
@dataclass
class FieldSolveResult:
    """Solution of ``M S = Q + eta`` represented as an exactly evaluable field."""

    S: Field
    eta: float
    f1: float
    f2: float
    s0: float
    particular: Field
    inverse: PoleInverse


def field_solve(source, rhs, ctx, L, h, support, neumann=NEUMANN_TERMS, trig=True,
                width=W_WIDTH):
    """Solve ``M S = sum_i b_i A^{p_i} src + eta`` for ``rhs = [(p_i, b_i), ...]``.

    ``support`` bounds the support of the right-hand side ``Q``.  The first
    ``neumann`` terms of the Neumann series are kept as exact kernel terms,
    the smooth remainder goes through :func:`pole_inverse`.
    """
    c2 = ctx.c**2
    terms = []
    for n in range(neumann):
        for p, b in rhs:
            terms.append(KernelTerm(source, 2 * n + p, -b / c2 ** (n + 1)))
    npts = 2 * round(L / h) + 1
    M = fft_size(npts)
    x = (np.arange(M) - M // 2) * h
    lo, hi = support
    reach = neumann
    inside = (x >= lo - reach - 1e-12) & (x <= hi + reach + 1e-12)
    q = np.zeros(M)
    for p, b in rhs:
        q[inside] += b * source.apply(2 * neumann + p, x[inside]) / c2**neumann
    inv = pole_inverse(q, h, ctx, symbol="exact", width=width)
    terms.append(inv.spectral_term())
    terms.append(WTerm(ctx.k_c, ctx.y_scale, width, -inv.f1p, -inv.f2p))
    particular = Field(terms).simplified()
    s0 = float(particular(np.array([0.0]))[0])
    f1, f2 = -inv.f1p, -inv.f2p
    C = ctx.y_scale
    if trig:
        assembly = TrigTerm(ctx.k_c, f1 * C - s0, -f1 * C, -f2 * C)
        eta = (1 - c2) * (f1 * C - s0)
    else:
        assembly = TrigTerm(ctx.k_c, -s0)
        eta = -(1 - c2) * s0
    return FieldSolveResult(Field(particular.terms + [assembly]), float(eta), f1, f2, s0,
                            particular, inv)
