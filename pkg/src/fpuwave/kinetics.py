"""Macroscopic strains and the configurational force on the interface."""
from dataclasses import asdict, dataclass

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline

from .errors import StrainInSpinodal, WindowTooShort
from .tails import tail_fit

MIN_PERIODS = 8
INNER_EDGE = 10.0


@dataclass(frozen=True)
class KineticReport:
    r_bar_plus: float
    r_bar_minus: float
    upsilon_e: float
    upsilon_f: float
    upsilon: float
    upsilon_0: float
    delta: float
    fit_plus: float = float("nan")
    fit_minus: float = float("nan")

    @property
    def method_gap(self):
        """Largest disagreement between period averaging and the tail fit."""
        return max(abs(self.r_bar_plus - self.fit_plus), abs(self.r_bar_minus - self.fit_minus))

    def as_dict(self):
        d = asdict(self)
        d["method_gap"] = self.method_gap
        return d


def period_averages(R, ctx, side, min_periods=MIN_PERIODS, inner=INNER_EDGE, margin=2.0):
    """Averages of ``R`` over ``n`` whole periods anchored at the outer edge.

    Returns ``(n, averages)`` for every admissible ``n``.
    """
    P = ctx.period
    outer = R.L - margin
    n_max = int(np.floor((outer - inner) / P))
    if n_max < min_periods:
        raise WindowTooShort(
            f"only {n_max} whole periods of length {P:.4f} fit between |x|={inner} and {outer}"
        )
    if side > 0:
        spl = CubicSpline(R.x, R.values)
    else:
        spl = CubicSpline(-R.x[::-1], R.values[::-1])
    ns = np.arange(min_periods, n_max + 1)
    avg = np.array([spl.integrate(outer - n * P, outer) / (n * P) for n in ns])
    return ns, avg


def macroscopic_strains(R, ctx, min_periods=MIN_PERIODS, inner=INNER_EDGE, margin=2.0):
    """``(r_plus, r_minus)`` from whole-period averages extrapolated in window count.

    The averages are fitted by ``r + b/n``; the harmonic part integrates to
    zero over whole periods, and ``b/n`` absorbs any decaying remainder.
    """
    out = []
    for side in (1, -1):
        ns, avg = period_averages(R, ctx, side, min_periods, inner, margin)
        A = np.column_stack([np.ones(len(ns)), 1.0 / ns])
        coef, *_ = np.linalg.lstsq(A, avg, rcond=None)
        out.append(float(coef[0]))
    return tuple(out)


def configurational_force(r_plus, r_minus, P, upsilon_0=float("nan")):
    """Energy release ``Y_e``, flux term ``Y_f`` and ``Y = Y_e - Y_f``."""
    for r in (r_plus, r_minus):
        if abs(r) <= P.support:
            raise StrainInSpinodal(f"macroscopic strain {r:g} lies in the spinodal interval")
    ue = float(P.phi(r_plus) - P.phi(r_minus))
    dp = float(P.phi_prime(r_plus))
    dm = float(P.phi_prime(r_minus))
    uf = 0.5 * (dp + dm) * (r_plus - r_minus)
    return KineticReport(float(r_plus), float(r_minus), ue, float(uf), ue - float(uf),
                         float(upsilon_0), float(P.delta))


def energy_release_integral(r_plus, r_minus, P):
    """``int_{r-}^{r+} Phi'`` by adaptive quadrature (cross-check of ``Y_e``)."""
    pts = [p for p in (-P.support, 0.0, P.support) if r_minus < p < r_plus]
    return quad(lambda r: float(P.phi_prime(r)), r_minus, r_plus, points=pts or None,
                epsabs=1e-13, epsrel=1e-13, limit=200)[0]


def kinetic_report(R, ctx, P, R0=None, P0=None):
    """Full report for a wave ``R``; ``R0`` (with family ``P0``) gives the baseline."""
    rp, rm = macroscopic_strains(R, ctx)
    fp, fm = tail_fit(R, ctx, 1).mean, tail_fit(R, ctx, -1).mean
    base = float("nan")
    if R0 is not None:
        from .potentials import sign_family

        q0, s0 = macroscopic_strains(R0, ctx)
        base = configurational_force(q0, s0, P0 or sign_family()).upsilon
    rep = configurational_force(rp, rm, P, base)
    return KineticReport(**{**asdict(rep), "fit_plus": fp, "fit_minus": fm})
