"""Harmonic tail fits ``mean + alpha cos(k_c x) + beta sin(k_c x)``."""
from dataclasses import dataclass

import numpy as np

from .errors import WindowTooShort

MIN_PERIODS = 6


@dataclass(frozen=True)
class TailFit:
    mean: float
    alpha: float
    beta: float
    residual: float
    window: tuple

    @property
    def amplitude(self):
        return float(np.hypot(self.alpha, self.beta))


def tail_window(L, ctx, side, periods=None, margin=2.0):
    """Window ``[L - W, L - margin]`` (mirrored for ``side < 0``)."""
    P = ctx.period
    outer = L - margin
    if periods is None:
        periods = np.floor((outer - 10.0) / P)
    length = periods * P
    if periods < MIN_PERIODS or length > outer:
        raise WindowTooShort(
            f"tail window of {periods:g} periods (period {P:.4f}) does not fit in L={L}"
        )
    lo, hi = outer - length, outer
    return (lo, hi) if side > 0 else (-hi, -lo)


def tail_fit(R, ctx, side=1, periods=None, margin=2.0):
    """Least-squares fit of the three-function harmonic model on one tail."""
    lo, hi = tail_window(R.L, ctx, side, periods, margin)
    m = R.window(lo, hi)
    x = R.x[m]
    A = np.column_stack([np.ones_like(x), np.cos(ctx.k_c * x), np.sin(ctx.k_c * x)])
    coef, *_ = np.linalg.lstsq(A, R.values[m], rcond=None)
    res = float(np.max(np.abs(A @ coef - R.values[m])))
    return TailFit(float(coef[0]), float(coef[1]), float(coef[2]), res, (lo, hi))
