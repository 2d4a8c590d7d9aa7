"""Uniform symmetric grids and the shift/averaging operators acting on them."""
from dataclasses import dataclass, field

import numpy as np

from .errors import GridMismatch

_FD1 = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_FD2 = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0
# one-sided fourth-order stencils for the first two and last two samples
_FD1_EDGE = np.array(
    [
        [-25.0, 48.0, -36.0, 16.0, -3.0],
        [-3.0, -10.0, 18.0, -6.0, 1.0],
    ]
) / 12.0
_FD2_EDGE = np.array(
    [
        [45.0, -154.0, 214.0, -156.0, 61.0, -10.0],
        [10.0, -15.0, -4.0, 14.0, -6.0, 1.0],
    ]
) / 12.0


def half_steps(h):
    """Return ``n`` with ``h = 1/(2n)``; raise if ``h`` does not divide 1/2."""
    if not np.isfinite(h) or h <= 0:
        raise GridMismatch(f"grid spacing must be positive, got {h}")
    n = round(0.5 / h)
    if n < 4 or abs(0.5 / n - h) > 1e-14 * h:
        raise GridMismatch(f"h={h} is not of the form 1/(2n) with n >= 4")
    return n


def check_half_length(L):
    if L <= 0 or abs(2 * L - round(2 * L)) > 1e-12:
        raise GridMismatch(f"L={L} is not a positive multiple of 1/2")
    return round(2 * L) / 2


@dataclass(frozen=True, eq=False)
class GridProfile:
    """Samples of a real function on ``-L, -L+h, ..., L``."""

    L: float
    h: float
    values: np.ndarray
    label: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        n = half_steps(self.h)
        L = check_half_length(self.L)
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "h", 0.5 / n)
        vals = np.array(self.values, dtype=float)
        if vals.ndim != 1 or len(vals) != self.size:
            raise GridMismatch(
                f"expected {self.size} samples for L={L}, h={self.h}, got {vals.shape}"
            )
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def n_half(self):
        """Samples per half unit."""
        return round(0.5 / self.h)

    @property
    def size(self):
        return 2 * round(self.L / self.h) + 1

    @property
    def center(self):
        return round(self.L / self.h)

    @property
    def x(self):
        i = np.arange(self.size) - self.center
        return i * self.h

    @classmethod
    def from_function(cls, f, L, h, label=""):
        n = half_steps(h)
        h = 0.5 / n
        x = (np.arange(2 * round(L / h) + 1) - round(L / h)) * h
        return cls(L, h, f(x), label)

    def with_values(self, values, label=None):
        return GridProfile(self.L, self.h, values, self.label if label is None else label)

    def index(self, x):
        return self.center + round(x / self.h)

    def window(self, lo, hi):
        """Boolean mask of the samples in ``[lo, hi]``."""
        x = self.x
        return (x >= lo - 1e-12) & (x <= hi + 1e-12)

    def interior(self, margin=2.0):
        return self.window(-self.L + margin, self.L - margin)

    def __add__(self, other):
        _same_grid(self, other)
        return self.with_values(self.values + other.values)

    def __sub__(self, other):
        _same_grid(self, other)
        return self.with_values(self.values - other.values)

    def scaled(self, s):
        return self.with_values(s * self.values)


def _same_grid(a, b):
    if a.size != b.size or a.h != b.h:
        raise GridMismatch("profiles live on different grids")


def simpson_weights(n_half):
    """Composite Simpson weights over ``[-1/2, 1/2]`` with ``2 n_half`` panels."""
    m = 2 * n_half
    w = np.ones(m + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w / (3.0 * m)


def _shift(v, s):
    """``v(x + s h)`` with constant extension beyond the ends."""
    if s == 0:
        return v.copy()
    out = np.empty_like(v)
    if s > 0:
        out[:-s] = v[s:]
        out[-s:] = v[-1]
    else:
        out[-s:] = v[:s]
        out[:-s] = v[0]
    return out


def apply_A(F):
    """Unit-window average ``(AF)(x) = int_{x-1/2}^{x+1/2} F`` by Simpson's rule."""
    n = F.n_half
    if n % 2:
        raise GridMismatch("Simpson averaging needs an even number of panels per half unit")
    v = F.values
    padded = np.concatenate([np.full(n, v[0]), v, np.full(n, v[-1])])
    return F.with_values(np.convolve(padded, simpson_weights(n), mode="valid"))


def apply_A2(F):
    return apply_A(apply_A(F))


def apply_nabla(F):
    n = F.n_half
    return F.with_values(_shift(F.values, n) - _shift(F.values, -n))


def apply_Delta1(F):
    n = 2 * F.n_half
    v = F.values
    return F.with_values(_shift(v, n) - 2 * v + _shift(v, -n))


def apply_M(F, ctx):
    c2 = ctx.c**2 if hasattr(ctx, "c") else float(ctx) ** 2
    return F.with_values(apply_A2(F).values - c2 * F.values)


def derivative(values, h, order=1):
    """Fourth-order finite-difference derivative of uniformly spaced samples."""
    v = np.asarray(values, dtype=float)
    if len(v) < 6:
        raise ValueError("need at least 6 samples for fourth-order differences")
    if order == 1:
        st, edge, scale = _FD1, _FD1_EDGE, h
    elif order == 2:
        st, edge, scale = _FD2, _FD2_EDGE, h * h
    else:
        raise ValueError("order must be 1 or 2")
    out = np.empty_like(v)
    out[2:-2] = np.correlate(v, st, mode="valid")
    k = edge.shape[1]
    for i in range(2):
        out[i] = edge[i] @ v[:k]
        sign = -1.0 if order == 1 else 1.0
        out[-1 - i] = sign * (edge[i] @ v[::-1][:k])
    return out / scale


def sup_norms(F, mask=None):
    """``(|F|, |F'|, |F''|)`` sup norms, optionally restricted to ``mask``."""
    v = F.values
    if len(v) < 6:
        raise ValueError("sup_norms needs at least 6 samples")
    d1 = derivative(v, F.h, 1)
    d2 = derivative(v, F.h, 2)
    sel = slice(None) if mask is None else mask
    return (
        float(np.max(np.abs(v[sel]))),
        float(np.max(np.abs(d1[sel]))),
        float(np.max(np.abs(d2[sel]))),
    )
