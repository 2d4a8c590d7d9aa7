"""Profiles represented as sums of exactly evaluable terms.

A :class:`Field` can be sampled at any point together with its first two
derivatives, which is what the nonlinear solve needs inside the narrow
spinodal zone, where the computational grid is far too coarse.
"""
import numpy as np
from scipy.interpolate import make_interp_spline
from scipy.special import erf

from .grid_ops import GridProfile


class KernelTerm:
    def __init__(self, source, power, coeff):
        self.source, self.power, self.coeff = source, int(power), float(coeff)

    def __call__(self, x, nu=0):
        return self.coeff * self.source.apply(self.power, x, nu)


class SpectralTerm:
    """Samples (and derivatives) on a uniform periodic grid of spacing ``h``."""

    def __init__(self, x0, h, values, d1, d2):
        self.x0, self.h = float(x0), float(h)
        self.data = (np.asarray(values), np.asarray(d1), np.asarray(d2))
        self._splines = {}

    def _spline(self, nu, lo, hi):
        """Quintic interpolant on samples ``lo..hi`` (cached by range)."""
        key = (nu, lo, hi)
        if key not in self._splines:
            idx = np.arange(lo, hi + 1)
            self._splines[key] = make_interp_spline(self.x0 + self.h * idx,
                                                    self.data[nu][lo : hi + 1], k=5)
        return self._splines[key]

    def __call__(self, x, nu=0):
        x = np.asarray(x, dtype=float)
        pos = (x - self.x0) / self.h
        idx = np.rint(pos)
        if np.all(np.abs(pos - idx) < 1e-9):
            return self.data[nu][idx.astype(int)]
        n = len(self.data[nu])
        # a generous margin keeps the local interpolant identical in the interior
        lo = max(0, int(np.floor(pos.min())) - 16)
        hi = min(n - 1, int(np.ceil(pos.max())) + 16)
        lo, hi = (lo // 64) * 64, min(n - 1, -(-hi // 64) * 64)
        return self._spline(nu, lo, hi)(x)


class WTerm:
    """Gaussian-smoothed sign-modulated kernels ``a1*W1 + a2*W2``.

    ``W1 + i W2 = C exp(i k x) erf((x + 2 i k w^2) / (2 w))``, whose transform
    is that of ``C exp(ikx) sgn(x)`` damped by ``exp(-w^2 (xi^2 - k^2))``.
    """

    def __init__(self, k, scale, width, a1, a2):
        self.k, self.C, self.w = float(k), float(scale), float(width)
        self.a1, self.a2 = float(a1), float(a2)

    def complex_parts(self, x, nu=0):
        x = np.asarray(x, dtype=float)
        k, w = self.k, self.w
        z = (x + 2j * k * w * w) / (2 * w)
        e = np.exp(1j * k * x)
        ez = erf(z)
        if nu == 0:
            body = ez
        else:
            g = np.exp(-z * z) / (w * np.sqrt(np.pi))
            if nu == 1:
                body = 1j * k * ez + g
            elif nu == 2:
                body = -k * k * ez + 2j * k * g - z * g / w
            else:
                raise ValueError("nu must be 0, 1 or 2")
        return self.C * e * body

    def __call__(self, x, nu=0):
        v = self.complex_parts(x, nu)
        return self.a1 * v.real + self.a2 * v.imag


class TrigTerm:
    """``const + ac cos(k x) + as sin(k x)``."""

    def __init__(self, k, const=0.0, ac=0.0, as_=0.0):
        self.k, self.const, self.ac, self.as_ = float(k), float(const), float(ac), float(as_)

    def __call__(self, x, nu=0):
        x = np.asarray(x, dtype=float)
        k = self.k
        c, s = np.cos(k * x), np.sin(k * x)
        if nu == 0:
            return self.const + self.ac * c + self.as_ * s
        if nu == 1:
            return k * (-self.ac * s + self.as_ * c)
        if nu == 2:
            return -k * k * (self.ac * c + self.as_ * s)
        raise ValueError("nu must be 0, 1 or 2")


class Field:
    def __init__(self, terms=()):
        self.terms = list(terms)

    def __call__(self, x, nu=0):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        for t in self.terms:
            out = out + t(x, nu)
        return out

    def __add__(self, other):
        return Field(self.terms + other.terms)

    def simplified(self, rtol=1e-13):
        """Merge kernel terms acting on the same source with the same power."""
        merged, order, rest = {}, [], []
        for t in self.terms:
            if isinstance(t, KernelTerm):
                key = (id(t.source), t.power)
                if key not in merged:
                    merged[key] = [t.source, 0.0, 0.0]
                    order.append(key)
                merged[key][1] += t.coeff
                merged[key][2] = max(merged[key][2], abs(t.coeff))
            else:
                rest.append(t)
        kept = []
        for key in order:
            src, coeff, scale = merged[key]
            if abs(coeff) > rtol * scale:
                kept.append(KernelTerm(src, key[1], coeff))
        return Field(kept + rest)

    def on_grid(self, L, h, nu=0, label=""):
        return GridProfile.from_function(lambda x: self(x, nu), L, h, label)


ZERO = Field()
