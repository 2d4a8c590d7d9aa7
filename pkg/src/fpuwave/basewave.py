"""Travelling waves of the bi-quadratic chain (``Psi' = sgn``).

Writing ``R0 = sgn/(1 - c^2) + V`` turns ``M R0 = A^2 sgn + mu0`` into

    M V = -(c^2 / (1 - c^2)) (A^2 - 1) sgn + mu0,

whose right-hand side is odd and supported in ``[-1, 1]``.  The resulting
wave is available as a :class:`~fpuwave.field.Field`, so it can be sampled
exactly anywhere inside the spectral domain.
"""
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import brentq

from . import grid_ops as g
from .errors import AdmissibilityFailure, ResidualTooLarge, WindowTooShort
from .field import Field, KernelTerm, TrigTerm
from .grid_ops import GridProfile
from .kernels import SignSource
from .minv import NEUMANN_TERMS, field_solve
from .tails import tail_fit

SIGN = SignSource()
RESIDUAL_TOL = 1e-5


@dataclass
class BaseWave:
    ctx: object
    field: Field
    R0: GridProfile
    mu0: float
    alpha: float = 0.0
    beta: float = 0.0
    x0: float = float("nan")
    r0: float = float("nan")
    d0: float = float("nan")
    D0: float = float("nan")
    slope0: float = float("nan")
    tails: dict = field(default_factory=dict)
    residual: float = float("nan")

    @property
    def L(self):
        return self.R0.L

    @property
    def h(self):
        return self.R0.h

    def metadata(self):
        return {
            "c": self.ctx.c,
            "k_c": self.ctx.k_c,
            "alpha": self.alpha,
            "beta": self.beta,
            "mu0": self.mu0,
            "x0": self.x0,
            "r0": self.r0,
            "d0": self.d0,
            "D0": self.D0,
            "slope0": self.slope0,
            "residual": self.residual,
            **{f"tail_{k}": v for k, v in self.tails.items()},
        }


def sample(F, L, h, nu=0, zero_center=False):
    """Sample a field on the ``(L, h)`` grid."""
    P = F.on_grid(L, h, nu)
    if zero_center:
        v = P.values.copy()
        v[P.center] = 0.0
        P = P.with_values(v)
    return P


def wave_residual(F, ctx, psi_prime, L, h, margin=2.0):
    """Sup of ``c^2 R'' - Delta_1 (R - Psi'(R))`` over interior grid points.

    Second derivatives are exact (jumps are averaged), so breakpoints of
    ``R''`` do not pollute the residual.
    """
    R = sample(F, L, h, zero_center=True)
    R2 = F(R.x, 2)
    phi = R.with_values(R.values - psi_prime(R.values))
    res = ctx.c**2 * R2 - g.apply_Delta1(phi).values
    m = R.interior(margin)
    return float(np.max(np.abs(res[m])))


def causal_field(ctx, L, h, neumann=NEUMANN_TERMS):
    """Return ``(R0 field, mu0)`` for the wave without oscillations ahead."""
    c2 = ctx.c**2
    b = c2 / (1 - c2)
    sol = field_solve(SIGN, [(2, -b), (0, b)], ctx, L, h, (-1.0, 1.0), neumann)
    R0 = Field([KernelTerm(SIGN, 0, 1.0 / (1 - c2))] + sol.S.terms).simplified()
    return R0, sol.eta


def _monotone_halfwidth(F, side, xmax=3.0, n=3001):
    x = side * np.linspace(0.0, xmax, n)
    d = F(x, 1)
    bad = np.flatnonzero(d <= 0)
    if len(bad) == 0:
        return xmax
    i = bad[0]
    if i == 0:
        return 0.0
    return abs(brentq(lambda t: float(F(np.array([t]), 1)[0]), x[i - 1], x[i], xtol=1e-13))


def measure(base):
    """Fill in ``x0, d0, r0, D0`` and tail data; return the updated wave."""
    F, ctx = base.field, base.ctx
    R = base.R0
    mono = min(_monotone_halfwidth(F, 1), _monotone_halfwidth(F, -1))
    if mono <= 0:
        raise AdmissibilityFailure("R0' > 0 fails at the origin")
    x0 = 0.5 * mono
    xs = np.linspace(-x0, x0, 2001)
    d0 = float(np.min(F(xs, 1)))
    inner = R.interior()
    outside = inner & (np.abs(R.x) >= x0)
    fine = np.concatenate([np.linspace(-mono, -x0, 401), np.linspace(x0, mono, 401)])
    r_vals = np.abs(np.concatenate([R.values[outside], F(fine)]))
    r0 = float(np.min(r_vals))
    sign_ok = np.all(np.sign(R.values[outside]) == np.sign(R.x[outside]))
    sign_ok = sign_ok and np.all(np.sign(F(fine)) == np.sign(fine))
    if not sign_ok or r0 <= 0:
        raise AdmissibilityFailure("sgn(R0(x)) = sgn(x) fails for |x| >= x0")
    c2 = ctx.c**2
    D0 = float(np.max(np.abs(R.values[inner])) * (1 - c2))
    try:
        plus, minus = tail_fit(R, ctx, 1), tail_fit(R, ctx, -1)
    except WindowTooShort:
        # domain too short for a reliable fit; leave the tail data empty
        tails = {}
    else:
        tails = {
            "r_plus": plus.mean,
            "r_minus": minus.mean,
            "alpha_plus": plus.alpha,
            "beta_plus": plus.beta,
            "alpha_minus": minus.alpha,
            "beta_minus": minus.beta,
        }
    slope0 = float(F(np.array([0.0]), 1)[0])
    return replace(base, x0=x0, d0=d0, r0=r0, D0=D0, slope0=slope0, tails=tails)


def build_causal_wave(ctx, L=80.0, h=1 / 256, neumann=NEUMANN_TERMS, tol=RESIDUAL_TOL):
    """Build and validate the causal bi-quadratic wave at speed ``ctx.c``."""
    F, mu0 = causal_field(ctx, L, h, neumann)
    R0 = sample(F, L, h, zero_center=True)
    R0 = GridProfile(R0.L, R0.h, R0.values, "R0")
    res = wave_residual(F, ctx, np.sign, L, h)
    if res > tol:
        raise ResidualTooLarge(f"base wave residual {res:.3e} exceeds {tol:g}")
    return measure(BaseWave(ctx, F, R0, float(mu0), residual=res))


def extend_family(base, alpha, beta, tol=RESIDUAL_TOL):
    """Add ``alpha (cos(k_c x) - 1) + beta sin(k_c x)`` and re-measure."""
    if alpha == 0 and beta == 0:
        return base
    ctx = base.ctx
    F = Field(base.field.terms + [TrigTerm(ctx.k_c, -alpha, alpha, beta)])
    R0 = sample(F, base.L, base.h, zero_center=True)
    mu0 = base.mu0 - alpha * (1 - ctx.c**2)
    out = BaseWave(ctx, F, GridProfile(R0.L, R0.h, R0.values, "R0"), mu0,
                   base.alpha + alpha, base.beta + beta)
    out = measure(out)
    res = wave_residual(F, ctx, np.sign, base.L, base.h)
    if res > tol:
        raise ResidualTooLarge(f"family residual {res:.3e} exceeds {tol:g}")
    return replace(out, residual=res)


def probe_family_domain(base, direction, t_max=10.0, rtol=1e-3):
    """Largest ``t`` such that ``(alpha, beta) = t * direction`` stays admissible.

    Bisection on the admissibility predicate; returns ``t_max`` if no
    violation occurs up to there.
    """
    da, db = direction

    def ok(t):
        try:
            extend_family(base, t * da, t * db)
        except AdmissibilityFailure:
            return False
        return True

    if ok(t_max):
        return t_max
    lo, hi = 0.0, t_max
    while hi - lo > rtol * t_max:
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if ok(mid) else (lo, mid)
    return lo
