"""Perturbed double-well potentials ``Phi_delta(r) = r^2/2 - Psi_delta(r)``.

Only ``Psi'`` matters for the wave equation.  Every family agrees with the
bi-quadratic case ``Psi' = sgn`` outside the spinodal interval ``[-delta, delta]``.
"""
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline

from .errors import BadDelta, ValidationError

DELTA_MAX = 0.2


@dataclass(frozen=True)
class PotentialFamily:
    delta: float
    psi_prime: Callable
    psi_double_prime: Callable
    C_psi: float
    I_delta: float
    name: str = "custom"
    shift: float = 0.0
    params: dict = field(default_factory=dict)

    @property
    def support(self):
        """Half-width of the interval where ``Psi'`` may differ from ``sgn``."""
        return self.delta + abs(self.shift)

    def _branch_constants(self):
        if not hasattr(self, "_consts"):
            d = self.support
            if d == 0:
                consts = (0.0, 0.0)
            else:
                up = quad(self.psi_prime, 0.0, d, epsabs=1e-13, epsrel=1e-13, limit=200)[0]
                lo = quad(self.psi_prime, -d, 0.0, epsabs=1e-13, epsrel=1e-13, limit=200)[0]
                consts = (up - d, -lo - d)
            object.__setattr__(self, "_consts", consts)
        return self._consts

    def psi(self, r):
        """``Psi(r) = int_0^r Psi'``; closed form outside the spinodal interval."""
        r = np.asarray(r, dtype=float)
        cp, cm = self._branch_constants()
        d = self.support
        out = np.where(r >= d, r + cp, np.where(r <= -d, -r + cm, 0.0))
        inner = np.abs(r) < d
        for idx in zip(*np.nonzero(np.atleast_1d(inner))):
            rv = float(np.atleast_1d(r)[idx])
            val = quad(self.psi_prime, 0.0, rv, epsabs=1e-13, epsrel=1e-13)[0]
            if out.ndim:
                out[idx] = val
            else:
                out = np.asarray(val)
        return out[()] if out.ndim == 0 else out

    def phi(self, r):
        r = np.asarray(r, dtype=float)
        return 0.5 * r * r - self.psi(r)

    def phi_prime(self, r):
        r = np.asarray(r, dtype=float)
        return r - self.psi_prime(r)


def _integral_I(psi_prime, delta, kinks=None):
    if delta == 0:
        return 0.0
    pts = None if kinks is None else [k for k in kinks if -delta < k < delta]
    return 0.5 * quad(psi_prime, -delta, delta, epsabs=1e-14, epsrel=1e-13, limit=200,
                      points=pts or None)[0]


def measure_C_psi(psi_prime, psi_double_prime, delta, n=10_000):
    """Smallest ``C`` with ``|Psi'| <= C`` and ``|Psi''| <= C/delta`` on a probe grid."""
    r = np.linspace(-2 * delta, 2 * delta, n)
    return float(max(np.max(np.abs(psi_prime(r))), delta * np.max(np.abs(psi_double_prime(r)))))


def _check_delta(delta):
    if not np.isfinite(delta) or delta <= 0:
        raise BadDelta(f"delta must be positive, got {delta}")
    if delta > DELTA_MAX:
        raise BadDelta(f"delta={delta} exceeds {DELTA_MAX}")


def sign_family():
    """The unperturbed bi-quadratic case ``Psi' = sgn`` (``delta = 0``)."""
    return PotentialFamily(0.0, np.sign, np.zeros_like, 1.0, 0.0, name="sign")


def smooth_sign_family(delta):
    """Odd cubic blend ``(3u - u^3)/2`` with ``u = r/delta`` inside the spinodal."""
    _check_delta(delta)

    def pp(r):
        u = np.clip(np.asarray(r, dtype=float) / delta, -1.0, 1.0)
        return 0.5 * (3 * u - u**3)

    def ppp(r):
        u = np.asarray(r, dtype=float) / delta
        return np.where(np.abs(u) < 1, 1.5 * (1 - u * u) / delta, 0.0)

    return PotentialFamily(delta, pp, ppp, 1.5, 0.0, name="cubic")


def biased_family(delta, eps):
    """Cubic blend plus the even bump ``eps (1 - u^2)^2``; ``I = 8 eps delta / 15``."""
    _check_delta(delta)
    if abs(eps) > 0.5:
        raise ValidationError(f"|eps| must be at most 1/2, got {eps}")
    base = smooth_sign_family(delta)

    def pp(r):
        u = np.asarray(r, dtype=float) / delta
        bump = np.where(np.abs(u) < 1, eps * (1 - u * u) ** 2, 0.0)
        return base.psi_prime(r) + bump

    def ppp(r):
        u = np.asarray(r, dtype=float) / delta
        bump = np.where(np.abs(u) < 1, -4 * eps * u * (1 - u * u) / delta, 0.0)
        return base.psi_double_prime(r) + bump

    C = measure_C_psi(pp, ppp, delta)
    return PotentialFamily(delta, pp, ppp, C, 8.0 * eps * delta / 15.0, name="biased",
                           params={"eps": eps})


def file_family(path):
    """Family sampled as ``r, Psi'`` pairs (comma or whitespace separated).

    The samples must cover ``[-delta, delta]``; ``delta`` is the largest
    ``|r|`` in the file.  Values are interpolated by a cubic spline and
    replaced by ``sgn`` outside the sampled range.
    """
    try:
        data = np.loadtxt(path, delimiter=None if _whitespace(path) else ",", ndmin=2)
    except (OSError, ValueError) as exc:
        raise ValidationError(f"cannot read potential file {path}: {exc}") from exc
    if data.shape[1] != 2 or len(data) < 4:
        raise ValidationError("potential file needs at least 4 rows of (r, psi')")
    order = np.argsort(data[:, 0])
    r, v = data[order, 0], data[order, 1]
    delta = float(max(-r[0], r[-1]))
    _check_delta(delta)
    spl = CubicSpline(r, v)
    dspl = spl.derivative()

    def pp(x):
        x = np.asarray(x, dtype=float)
        inside = (x >= r[0]) & (x <= r[-1])
        return np.where(inside, spl(np.clip(x, r[0], r[-1])), np.sign(x))

    def ppp(x):
        x = np.asarray(x, dtype=float)
        inside = (x >= r[0]) & (x <= r[-1])
        return np.where(inside, dspl(np.clip(x, r[0], r[-1])), 0.0)

    C = measure_C_psi(pp, ppp, delta)
    return PotentialFamily(delta, pp, ppp, C, _integral_I(pp, delta), name="file",
                           params={"path": str(path)})


def _whitespace(path):
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line and not line.startswith("#"):
                return "," not in line
    return True


def shift_transform(P):
    """Move the spinodal so that the new family has zero ``I``.

    Returns the family ``r -> Psi'(r - I)`` and the shift ``I``.  Solutions
    of the shifted problem map back via ``R = R~ - I`` and
    ``mu = mu~ - (c^2 - 1) I``.
    """
    s = float(P.I_delta)
    if s == 0.0:
        return P, 0.0

    def pp(r):
        return P.psi_prime(np.asarray(r, dtype=float) - s)

    def ppp(r):
        return P.psi_double_prime(np.asarray(r, dtype=float) - s)

    shifted = PotentialFamily(P.delta, pp, ppp, P.C_psi, 0.0, name=P.name + "-shifted",
                              shift=s, params=dict(P.params))
    return shifted, s


def shifted_width(P):
    """Enlarged spinodal half-width ``delta (1 + C_psi)`` after shifting."""
    return P.delta * (1.0 + P.C_psi)


def residual_I(P):
    """Recompute ``I`` for a (possibly shifted) family by quadrature."""
    s = P.shift
    return _integral_I(P.psi_prime, P.support, kinks=(s - P.delta, s, s + P.delta))


def parse_potential(text, delta):
    """Build a family from ``cubic``, ``biased:<eps>`` or ``file:<path>``."""
    if delta == 0 and not text.startswith("file:"):
        return sign_family()
    if text == "cubic":
        return smooth_sign_family(delta)
    if text.startswith("biased:"):
        try:
            eps = float(text.split(":", 1)[1])
        except ValueError as exc:
            raise ValidationError(f"bad bias in {text!r}") from exc
        return biased_family(delta, eps)
    if text.startswith("file:"):
        return file_family(text.split(":", 1)[1])
    raise ValidationError(f"unknown potential {text!r}")
