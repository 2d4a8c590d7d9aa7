"""Fixed-point construction of the corrector ``S`` for ``delta > 0``.

The wave is ``R = R0 - I + S`` where ``S = P_S L G(S)`` and
``G(S) = Psi'(R0 + S) - sgn(R0)``.  ``G`` lives in a window of width
``O(delta)`` around the origin, which is usually narrower than the grid
spacing, so each iterate is evaluated on a fine sub-grid there and the
linear solve acts on that sub-grid representation exactly.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from .basewave import sample, wave_residual
from .errors import (AdmissibilityLost, NotContracting, ResidualTooLarge,
                     ValidationError)
from .field import Field, TrigTerm
from .grid_ops import GridProfile
from .kernels import ZoneSource
from .minv import NEUMANN_TERMS, field_solve
from .tails import tail_fit

__all__ = [
    "SolveConfig", "AdmissibilityReport", "WaveSolution", "apply_G",
    "check_admissible", "fixed_point_solve", "tail_fit", "sharp_norm",
    "random_start", "solve_with_shift",
]


@dataclass(frozen=True)
class SolveConfig:
    tol: float = 1e-10
    max_iter: int = 60
    ratio_limit: float = 0.9
    residual_tol: float = 1e-5
    ball: tuple = (10.0, 5.0, 10.0)
    neumann: int = NEUMANN_TERMS
    zone_cells: int = 200
    S0: object = None


@dataclass
class AdmissibilityReport:
    x_minus: float
    x_plus: float
    slope_min: float
    slope_max: float
    slope0: float
    flags: dict

    @property
    def admissible(self):
        return all(self.flags.values())

    @property
    def bracket_constant(self):
        """``max |x_pm| * R0'(0) / delta``-style constant, set by the caller."""
        return self._bracket

    def failed(self):
        return [k for k, v in self.flags.items() if not v]


@dataclass
class WaveSolution:
    R: GridProfile
    S: GridProfile
    c: float
    delta: float
    mu: float
    eta: float
    iterations: int
    contraction_estimate: float
    norms: tuple
    tails: dict
    I_delta: float
    residual: float
    R_field: object = None
    S_field: object = None
    history: list = field(default_factory=list)
    admissibility: object = None
    in_ball: bool = True

    def metadata(self):
        return {
            "c": self.c,
            "delta": self.delta,
            "I_delta": self.I_delta,
            "mu": self.mu,
            "eta": self.eta,
            "iterations": self.iterations,
            "contraction_estimate": self.contraction_estimate,
            "normS": self.norms[0],
            "normS1": self.norms[1],
            "normS2": self.norms[2],
            "residual": self.residual,
            "in_ball": self.in_ball,
            "x_minus": self.admissibility.x_minus if self.admissibility else None,
            "x_plus": self.admissibility.x_plus if self.admissibility else None,
            **{f"tail_{k}": v for k, v in self.tails.items()},
        }


def sharp_norm(d0, d1, d2, delta):
    """``|f| + |f'| + delta |f''|`` from the three sup norms."""
    return d0 + d1 + delta * d2


def _as_callable(S):
    """Wrap a grid profile as ``f(x, nu)`` through a cubic spline."""
    if S is None:
        return Field()
    if isinstance(S, GridProfile):
        spl = CubicSpline(S.x, S.values)
        return lambda x, nu=0: spl(x, nu)
    return S


def _sgn_at(x):
    return np.sign(x)


def apply_G(S, base, P):
    """``Psi'(R0 + S) - sgn(R0)`` on the base grid (jump at 0 averaged)."""
    Sv = S.values if isinstance(S, GridProfile) else _as_callable(S)(base.R0.x)
    R = base.R0.values + Sv
    G = P.psi_prime(R) - _sgn_at(base.R0.x)
    return base.R0.with_values(G, "G")


def _find_crossing(R, level, a, b, n=801, tol=1e-12):
    """First crossing of ``R = level`` in ``[a, b]``: bracket, Brent, one Newton step."""
    x = np.linspace(a, b, n)
    v = np.asarray(R(x)) - level
    idx = np.flatnonzero(np.sign(v[:-1]) != np.sign(v[1:]))
    if len(idx) == 0:
        return None
    # the crossing closest to the origin
    i = idx[np.argmin(np.abs(x[idx]))]

    def f(t):
        return float(R(np.array([t]))[0]) - level

    root = brentq(f, x[i], x[i + 1], xtol=tol, rtol=4 * np.finfo(float).eps)
    d = float(R(np.array([root]), 1)[0])
    if d != 0:
        step = f(root) / d
        if abs(step) < x[i + 1] - x[i]:
            root -= step
    return root


def check_admissible(S, base, P, fine=4001):
    """Evaluate the four admissibility conditions for ``R0 + S``."""
    Sf = _as_callable(S)

    def R(x, nu=0):
        x = np.asarray(x, dtype=float)
        return base.field(x, nu) + Sf(x, nu)

    delta = P.support
    slope0 = base.slope0
    span = base.x0
    xp = _find_crossing(R, delta, 0.0, span)
    xm = _find_crossing(R, -delta, -span, 0.0)
    flags = {"crossings": xp is not None and xm is not None}
    if not flags["crossings"]:
        rep = AdmissibilityReport(np.nan, np.nan, np.nan, np.nan, slope0,
                                  {**flags, "left": False, "right": False, "slope": False})
        rep._bracket = np.nan
        return rep
    flags["crossings"] = xm < 0 < xp
    grid = base.R0.x[base.R0.interior()]
    Rg = base.R0.values[base.R0.interior()] + np.asarray(Sf(grid))
    near_l = np.linspace(-span, xm, fine)[:-1]
    near_r = np.linspace(xp, span, fine)[1:]
    flags["left"] = bool(np.all(Rg[grid < xm] < -delta) and np.all(R(near_l) < -delta))
    flags["right"] = bool(np.all(Rg[grid > xp] > delta) and np.all(R(near_r) > delta))
    inner = np.linspace(xm, xp, fine)[1:-1]
    d = R(inner, 1)
    smin, smax = float(np.min(d)), float(np.max(d))
    flags["slope"] = bool(0.5 * slope0 < smin and smax < 2 * slope0)
    rep = AdmissibilityReport(float(xm), float(xp), smin, smax, slope0, flags)
    rep._bracket = max(abs(xm), abs(xp)) * slope0 / delta if delta > 0 else np.nan
    return rep


def _zone_geometry(base, P, cfg):
    h = base.h
    width = P.support / base.slope0
    X = max(4 * h, 3 * width)
    X = np.ceil(X / h - 1e-9) * h
    mf = max(1, int(np.ceil(cfg.zone_cells * h / width)))
    hf = h / mf
    ns = round(X / hf)
    left = (np.arange(ns + 1) - ns) * hf
    right = np.arange(ns + 1) * hf
    return hf, left, right


def _eval_norms(S, xs, delta):
    vals = [np.abs(np.asarray(S(xs, nu))) for nu in range(3)]
    return tuple(float(np.max(v)) for v in vals), vals


def fixed_point_solve(base, P, ctx=None, cfg=SolveConfig(), log=None):
    """Iterate ``S <- P_S L G(S)`` to the fixed point and assemble the wave."""
    ctx = ctx or base.ctx
    if P.I_delta != 0:
        raise ValidationError("shift the potential family first (I_delta must be 0)")
    L, h, c2 = base.L, base.h, ctx.c**2
    shift = P.shift
    xg = base.R0.x
    history, ratios = [], []

    if P.delta == 0:
        S = Field()
        eta, iterations = 0.0, 1
        history.append(0.0)
        zone_nodes = np.zeros(0)
    else:
        hf, tl, tr = _zone_geometry(base, P, cfg)
        zone_nodes = np.concatenate([tl, tr[1:]])
        R0l, R0r = base.field(tl), base.field(tr)
        R0l[-1] = R0r[0] = 0.0
        probe = np.concatenate([xg, zone_nodes])
        S = _as_callable(cfg.S0)
        prev = [np.asarray(S(probe, nu)) for nu in range(3)]
        eta, iterations = 0.0, 0
        for it in range(1, cfg.max_iter + 1):
            Sl, Sr = np.asarray(S(tl)), np.asarray(S(tr))
            Sl[-1] = Sr[0] = 0.0
            Gl = P.psi_prime(R0l + Sl) + 1.0
            Gr = P.psi_prime(R0r + Sr) - 1.0
            if Gl[0] != 0 or Gr[-1] != 0:
                raise AdmissibilityLost("G does not vanish at the edge of the spinodal zone")
            zone = ZoneSource(hf, Gl, Gr)
            sol = field_solve(zone, [(2, 1.0)], ctx, L, h, (-zone.X - 1, zone.X + 1),
                              cfg.neumann)
            S, eta = sol.S, sol.eta
            cur = [np.asarray(S(probe, nu)) for nu in range(3)]
            inc = sharp_norm(*(float(np.max(np.abs(a - b))) for a, b in zip(cur, prev)),
                             P.delta)
            history.append(inc)
            iterations = it
            if log:
                log(f"iter {it:3d}  increment {inc:.3e}  eta {eta:.6e}")
            prev = cur
            if len(history) >= 2 and history[-2] > 0:
                ratio = inc / history[-2]
                ratios.append(ratio)
                scale = max(float(np.max(np.abs(cur[0]))), 1e-300)
                if ratio > cfg.ratio_limit and inc > 1e-12 * scale:
                    raise NotContracting(f"contraction ratio {ratio:.3f} at iteration {it}")
            rep = check_admissible(S, base, P)
            if not rep.admissible:
                raise AdmissibilityLost(f"iterate {it} violates {', '.join(rep.failed())}")
            if inc <= cfg.tol:
                break
        else:
            raise NotContracting(f"no convergence in {cfg.max_iter} iterations")

    S_field = S if isinstance(S, Field) else Field()
    R_tilde = Field(base.field.terms + S_field.terms)
    norm_pts = np.concatenate([xg[base.R0.interior()], zone_nodes])
    norms, _ = _eval_norms(S_field, norm_pts, P.delta)
    residual = wave_residual(R_tilde, ctx, P.psi_prime, L, h)
    if residual > cfg.residual_tol:
        raise ResidualTooLarge(f"wave residual {residual:.3e} exceeds {cfg.residual_tol:g}")
    rep = check_admissible(S_field, base, P) if P.delta > 0 else None
    C0, C1, C2 = cfg.ball
    d = P.delta
    in_ball = d == 0 or (norms[0] <= C0 * d * d and norms[1] <= C1 * d and norms[2] <= C2)

    R_field = Field(R_tilde.terms + [TrigTerm(ctx.k_c, -shift)])
    Sg = sample(S_field, L, h, zero_center=True)
    Rg = base.R0.values + Sg.values - shift
    R = GridProfile(L, h, Rg, "R")
    mu = base.mu0 + eta - (c2 - 1.0) * shift
    try:
        plus, minus = tail_fit(R, ctx, 1), tail_fit(R, ctx, -1)
        tails = {"r_plus": plus.mean, "r_minus": minus.mean,
                 "alpha_plus": plus.alpha, "beta_plus": plus.beta,
                 "alpha_minus": minus.alpha, "beta_minus": minus.beta}
    except ValidationError:
        tails = {}
    return WaveSolution(
        R=R, S=GridProfile(L, h, Sg.values, "S"), c=ctx.c, delta=P.delta, mu=float(mu),
        eta=float(eta), iterations=iterations,
        contraction_estimate=float(max(ratios)) if ratios else 0.0,
        norms=norms, tails=tails, I_delta=shift, residual=residual,
        R_field=R_field, S_field=S_field, history=history, admissibility=rep,
        in_ball=bool(in_ball),
    )


class _RandomStart:
    """``S0(x) = x (a + b x + d x^2) exp(-x^2)`` scaled to ``amplitude * delta^2``."""

    def __init__(self, coeffs, scale):
        self.p = np.polynomial.Polynomial([0.0, *coeffs]) * scale

    def __call__(self, x, nu=0):
        x = np.asarray(x, dtype=float)
        p, e = self.p, np.exp(-x * x)
        if nu == 0:
            return p(x) * e
        dp = p.deriv()
        if nu == 1:
            return (dp(x) - 2 * x * p(x)) * e
        return (dp.deriv()(x) - 4 * x * dp(x) + (4 * x * x - 2) * p(x)) * e


def random_start(seed, delta, amplitude=0.5):
    """Seeded smooth initial iterate with ``S0(0) = 0`` inside the ``X_delta`` ball."""
    rng = np.random.default_rng(seed)
    coeffs = rng.uniform(-1.0, 1.0, size=3)
    return _RandomStart(coeffs, amplitude * delta * delta)


def solve_with_shift(base, P, cfg=SolveConfig(), log=None):
    """Shift a family with ``I != 0`` to zero mean, solve, and map back."""
    from .potentials import shift_transform

    shifted, _ = shift_transform(P)
    return fixed_point_solve(base, shifted, cfg=cfg, log=log)
