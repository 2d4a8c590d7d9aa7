"""Iterated unit-window averages as cardinal B-spline convolutions.

``A^j F = B_j * F`` where ``B_j`` is the centred cardinal B-spline of degree
``j - 1`` supported on ``[-j/2, j/2]``.  Sources know how to apply ``A^j`` to
themselves at arbitrary points, which lets a solution be evaluated exactly
off the computational grid.
"""
from functools import lru_cache

import numpy as np
from scipy.interpolate import BSpline, PPoly, make_interp_spline


@lru_cache(maxsize=None)
def bspline(j):
    t = np.arange(j + 1, dtype=float) - j / 2.0
    return BSpline.basis_element(t, extrapolate=False)


@lru_cache(maxsize=None)
def bspline_ppoly(j, nu=0):
    """Piecewise-polynomial form of ``B_j^{(nu)}`` on its ``j`` unit pieces."""
    b = bspline(j)
    if nu:
        b = b.derivative(nu)
    pp = PPoly.from_spline(b, extrapolate=False)
    # keep only the pieces inside the support
    lo, hi = -j / 2.0, j / 2.0
    keep = (pp.x[:-1] >= lo - 1e-12) & (pp.x[1:] <= hi + 1e-12) & (pp.x[1:] > pp.x[:-1])
    idx = np.flatnonzero(keep)
    x = np.append(pp.x[idx], pp.x[idx[-1] + 1])
    return x, pp.c[:, idx]


def _eval_spline(spl, x, lo, hi, left=0.0, right=0.0):
    x = np.asarray(x, dtype=float)
    out = spl(np.clip(x, lo, hi))
    out = np.where(x <= lo, left, out)
    return np.where(x >= hi, right, out)


def _mean_sides(fun, x):
    """Average of the one-sided limits, so jumps evaluate to their midpoint."""
    x = np.asarray(x, dtype=float)
    return 0.5 * (fun(np.nextafter(x, -np.inf)) + fun(np.nextafter(x, np.inf)))


def bspline_values(j, x, nu=0):
    """``B_j^{(nu)}(x)`` with jumps averaged."""
    if nu >= j:
        raise ValueError("derivative order too high for a pointwise value")
    b = bspline(j)
    spl = b.derivative(nu) if nu else b
    return _mean_sides(lambda z: _eval_spline(spl, z, -j / 2, j / 2), x)


class SignSource:
    """The sign function; ``A^j sgn = 2 * cdf(B_j) - 1`` is known exactly."""

    kind = "sign"

    def apply(self, j, x, nu=0):
        x = np.asarray(x, dtype=float)
        if j == 0:
            return np.sign(x) if nu == 0 else np.zeros_like(x)
        if nu == 0:
            anti = bspline(j).antiderivative()
            return 2.0 * _eval_spline(anti, x, -j / 2, j / 2, 0.0, 1.0) - 1.0
        return 2.0 * bspline_values(j, x, nu - 1)

    def support(self, j):
        return None


def _pieces_binomial(coeffs, u):
    """Rewrite ``sum_p c_p (u - y)^{deg-p}`` as a polynomial in ``y``.

    ``coeffs`` has shape (deg+1,) in PPoly order, ``u`` is an array; returns
    an array of shape (deg+1, len(u)) holding the coefficient of ``y^q``.
    """
    from math import comb

    deg = len(coeffs) - 1
    out = np.zeros((deg + 1, len(u)))
    for p, cp in enumerate(coeffs):
        power = deg - p
        if cp == 0.0:
            continue
        for q in range(power + 1):
            out[q] += cp * comb(power, q) * (-1.0) ** q * u ** (power - q)
    return out


class ZoneSource:
    """A function supported in ``[-X, X]``, smooth on each side of 0.

    Sampled on a uniform fine grid ``t`` (spacing ``hf``, containing 0).  The
    one-sided values at 0 are stored separately so the jump is represented.
    """

    kind = "zone"

    def __init__(self, hf, left, right, max_moment=12):
        # left: samples at t = -X..0 (last is the limit 0-); right: 0..X
        self.hf = float(hf)
        self.left = np.asarray(left, dtype=float)
        self.right = np.asarray(right, dtype=float)
        if len(self.left) != len(self.right):
            raise ValueError("zone sides must have equal length")
        self.nside = len(self.left) - 1
        self.X = self.nside * self.hf
        self._splines = (self._side_spline(-1), self._side_spline(1))
        self._moments = {}
        self.max_moment = max_moment

    def _side_nodes(self, side):
        k = np.arange(self.nside + 1)
        return (k - self.nside) * self.hf if side < 0 else k * self.hf

    def _side_spline(self, side):
        t = self._side_nodes(side)
        v = self.left if side < 0 else self.right
        return make_interp_spline(t, v, k=3)

    def value(self, x):
        x = np.asarray(x, dtype=float)
        sl, sr = self._splines
        out = np.zeros_like(x)
        m = (x < 0) & (x >= -self.X)
        out[m] = sl(x[m])
        m = (x > 0) & (x <= self.X)
        out[m] = sr(x[m])
        z = x == 0
        out[z] = 0.5 * (self.left[-1] + self.right[0])
        return out

    def integral(self):
        return float(self._moment(0)(self.X))

    def _moment(self, q):
        """Cumulative ``int_{-X}^{y} s^q G(s) ds`` as a callable."""
        if q not in self._moments:
            parts = []
            for side in (-1, 1):
                t = self._side_nodes(side)
                v = (self.left if side < 0 else self.right) * t**q
                parts.append(make_interp_spline(t, v, k=3).antiderivative())
            left_total = float(parts[0](0.0))
            X, hf, ns = self.X, self.hf, self.nside
            tl, tr = self._side_nodes(-1), self._side_nodes(1)
            table = np.concatenate([parts[0](tl), left_total + parts[1](tr[1:])])

            def gamma(y, parts=parts, left_total=left_total, X=X, table=table):
                y = np.clip(np.asarray(y, dtype=float), -X, X)
                pos = y / hf + ns
                idx = np.rint(pos)
                if np.all(np.abs(pos - idx) < 1e-7):
                    return table[idx.astype(np.int64)]
                return np.where(
                    y <= 0, parts[0](np.minimum(y, 0.0)),
                    left_total + parts[1](np.maximum(y, 0.0)),
                )

            self._moments[q] = gamma
        return self._moments[q]

    def apply(self, j, x, nu=0):
        """``(A^j G)^{(nu)}(x)`` for ``nu < j`` by exact piecewise integration."""
        x = np.asarray(x, dtype=float)
        if j == 0:
            if nu:
                raise ValueError("zone source has no pointwise derivatives")
            return self.value(x)
        if nu == j:
            # (A^j G)^{(j)} is the j-fold centred difference of G
            from math import comb

            out = np.zeros(x.shape)
            for i in range(j + 1):
                out += (-1) ** i * comb(j, i) * self.value(x + j / 2.0 - i)
            return out
        if nu > j:
            raise ValueError("derivative order too high")
        knots, coef = bspline_ppoly(j, nu)
        out = np.zeros(x.shape)
        flat = x.ravel()
        acc = np.zeros(flat.shape)
        for i in range(coef.shape[1]):
            # kernel piece B(s) on s in [knots[i], knots[i+1]], s = x - y
            lo = flat - knots[i + 1]
            hi = flat - knots[i]
            a = np.clip(lo, -self.X, self.X)
            b = np.clip(hi, -self.X, self.X)
            act = b > a
            if not np.any(act):
                continue
            u = flat[act] - knots[i]
            poly = _pieces_binomial(coef[:, i], u)
            for q in range(poly.shape[0]):
                g = self._moment(q)
                acc[act] += poly[q] * (g(b[act]) - g(a[act]))
        out[...] = acc.reshape(x.shape)
        return out

    def support(self, j):
        return (-self.X - j / 2.0, self.X + j / 2.0)
