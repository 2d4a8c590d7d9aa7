"""Fourier symbols of the averaging operator and of M = A^2 - c^2.

All wave numbers are in radians per lattice spacing and speeds are scaled so
that the sound speed is one.
"""
from dataclasses import dataclass

import numpy as np

from .errors import MultipleRoots, NoRoot

C_MIN = 0.85
C_MAX = 0.999

_TAYLOR_CUT = 1e-4


def a_symbol(k):
    """Symbol ``sin(k/2) / (k/2)`` of the unit averaging operator."""
    k = np.asarray(k, dtype=float)
    out = np.empty_like(k)
    small = np.abs(k) < _TAYLOR_CUT
    ks = k[small] ** 2
    out[small] = 1.0 - ks / 24.0 + ks**2 / 1920.0 - ks**3 / 322560.0
    kb = k[~small]
    out[~small] = np.sin(kb / 2) / (kb / 2)
    return out[()] if out.ndim == 0 else out


def a_prime(k):
    k = np.asarray(k, dtype=float)
    out = np.empty_like(k)
    small = np.abs(k) < _TAYLOR_CUT
    ks = k[small]
    out[small] = -ks / 12.0 + ks**3 / 480.0 - ks**5 / 53760.0
    kb = k[~small]
    out[~small] = (kb * np.cos(kb / 2) - 2 * np.sin(kb / 2)) / kb**2
    return out[()] if out.ndim == 0 else out


def m_symbol(k, c):
    return a_symbol(k) ** 2 - c * c


def m_prime(k, c):
    return 2.0 * a_symbol(k) * a_prime(k)


def dispersion(k):
    """Lattice dispersion relation ``Omega(k) = 2 sin(k/2)``."""
    return 2.0 * np.sin(np.asarray(k, dtype=float) / 2)


def dispersion_prime(k):
    return np.cos(np.asarray(k, dtype=float) / 2)


@dataclass(frozen=True)
class SymbolContext:
    c: float
    k_c: float
    m_prime_kc: float
    c0: float = C_MIN
    c1: float = C_MAX

    @property
    def y_scale(self):
        """Amplitude ``sqrt(2 pi) / m'(k_c)`` of the sign-modulated kernels."""
        return np.sqrt(2 * np.pi) / self.m_prime_kc

    @property
    def period(self):
        return 2 * np.pi / self.k_c

    def group_velocity(self):
        return float(dispersion_prime(self.k_c))


def find_kc(c, c0=C_MIN, c1=C_MAX, rtol=1e-12):
    """Locate the positive root of ``a(k) = c`` and package it with ``m'(k_c)``.

    Bisection on (0, 2 pi), where ``a`` decreases monotonically from 1 to 0,
    followed by a few Newton steps.
    """
    c = float(c)
    if not (c0 <= c < c1) or c1 >= 1.0:
        raise NoRoot(f"speed c={c} outside admissible window [{c0}, {c1})")

    grid = np.linspace(1e-6, 2 * np.pi - 1e-6, 4097)
    vals = a_symbol(grid) - c
    changes = np.flatnonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))
    if len(changes) == 0:
        raise NoRoot(f"a(k) = {c} has no root in (0, 2pi)")
    if len(changes) > 1:
        raise MultipleRoots(f"a(k) = {c} has {len(changes)} roots in (0, 2pi)")
    lo, hi = grid[changes[0]], grid[changes[0] + 1]
    while hi - lo > rtol * hi:
        mid = 0.5 * (lo + hi)
        if a_symbol(mid) > c:
            lo = mid
        else:
            hi = mid
    k = 0.5 * (lo + hi)
    for _ in range(3):
        step = (a_symbol(k) - c) / a_prime(k)
        if not np.isfinite(step) or abs(step) > hi - lo + 1e-14:
            break
        k -= step
    k = float(k)
    mp = float(m_prime(k, c))
    return SymbolContext(c=c, k_c=k, m_prime_kc=mp, c0=c0, c1=c1)
