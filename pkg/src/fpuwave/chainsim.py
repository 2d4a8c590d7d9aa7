"""Direct simulation of the chain ``u_j'' = Phi'(u_{j+1} - u_j) - Phi'(u_j - u_{j-1})``."""
from dataclasses import dataclass, replace

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import Blowup, DomainTooSmall, ValidationError

DT_MAX = 0.05
CLAMP_FRACTION = 0.05


class TravellingProfile:
    """Displacement profile ``U`` with ``U(x + 1/2) - U(x - 1/2) = R(x)``.

    ``U'`` follows from integrating the wave equation once,
    ``c^2 U' = A Phi'(R) - mu``; ``U`` is then integrated on one unit cell and
    continued cell by cell with exact strain increments.
    """

    def __init__(self, R, c, mu, psi_prime, extent, h=1 / 256, zone=0.1, zone_h=1e-5):
        self.c = float(c)
        n = round(0.5 / h)
        h = 0.5 / n
        K = int(np.ceil(extent))
        x = np.arange(-K * 2 * n, K * 2 * n + 1) * h
        # int_0^x Psi'(R) = |x| + int_0^x (Psi'(R) - sgn)
        zf = np.arange(-round(zone / zone_h), round(zone / zone_h) + 1) * zone_h
        rz = R(zf)
        rz[len(zf) // 2] = 0.0  # R(0) = 0 by construction; round-off would flip sgn
        gz = psi_prime(rz) - np.sign(zf)
        cum = np.concatenate([[0.0], np.cumsum(0.5 * (gz[1:] + gz[:-1]) * zone_h)])
        cum -= cum[len(zf) // 2]
        zone_int = CubicSpline(zf, cum)

        def cum_phi_prime(s):
            # int_0^s Phi'(R) on the unit cell around 0
            rv = R(s)
            spl = CubicSpline(s, rv)
            base = np.array([spl.integrate(0.0, t) for t in s])
            return base - np.abs(s) - zone_int(np.clip(s, -zone, zone))

        s = np.arange(-2 * n, 2 * n + 1) * h  # [-1, 1]
        C = cum_phi_prime(s)
        cell = np.arange(-n, n + 1) * h  # [-1/2, 1/2]
        A_phi = C[cell_index(cell + 0.5, h, 2 * n)] - C[cell_index(cell - 0.5, h, 2 * n)]
        dU_cell = (A_phi - mu) / self.c**2
        U_cell = CubicSpline(cell, dU_cell).antiderivative()(cell)
        U_cell -= U_cell[n]

        Rmid = R(x - 0.5)
        dRmid = R(x - 0.5, 1)
        U = np.empty_like(x)
        dU = np.empty_like(x)
        cells = 2 * n
        mid = len(x) // 2
        U[mid - n : mid + n + 1] = U_cell
        dU[mid - n : mid + n + 1] = dU_cell
        for i in range(mid + n + 1, len(x)):
            U[i] = U[i - cells] + Rmid[i]
            dU[i] = dU[i - cells] + dRmid[i]
        for i in range(mid - n - 1, -1, -1):
            U[i] = U[i + cells] - Rmid[i + cells]
            dU[i] = dU[i + cells] - dRmid[i + cells]
        self.x = x
        self._U = CubicSpline(x, U)
        self._dU = CubicSpline(x, dU)
        self.extent = K

    def __call__(self, x, nu=0):
        x = np.asarray(x, dtype=float)
        if np.max(np.abs(x), initial=0.0) > self.extent:
            raise DomainTooSmall(f"profile requested beyond |x| = {self.extent}")
        return self._U(x) if nu == 0 else self._dU(x, nu - 1)


def cell_index(x, h, offset):
    return np.rint(x / h).astype(int) + offset


@dataclass
class ChainState:
    j: np.ndarray
    u: np.ndarray
    v: np.ndarray
    t: float
    clamp: int
    profile: object
    c: float
    r_max: float

    def strains(self):
        return np.diff(self.u)

    def bond_positions(self):
        return self.j[:-1] + 0.5


def init_from_wave(R, c, mu, psi_prime, N, T_max=40.0, r_max=None, h=1 / 256,
                   domain=None):
    """Chain of ``N`` particles ``j = -N/2 .. N/2 - 1`` on the travelling wave.

    ``R(x, nu)`` evaluates the strain profile; ``domain`` bounds where it is
    valid (checked against ``N`` and ``T_max``).
    """
    N = int(N)
    if N < 10:
        raise ValidationError("need at least 10 particles")
    j = np.arange(-(N // 2), N - N // 2)
    need = N / 2 + c * T_max + 3
    if domain is not None and need > domain:
        raise DomainTooSmall(f"wave known on |x| <= {domain}, chain needs {need:.1f}")
    U = TravellingProfile(R, c, mu, psi_prime, need, h)
    u = U(j.astype(float))
    v = -c * U(j.astype(float), 1)
    if r_max is None:
        r_max = float(np.max(np.abs(np.diff(u))))
    clamp = max(1, int(round(CLAMP_FRACTION * N)))
    return ChainState(j, u, v, 0.0, clamp, U, float(c), float(r_max))


def _forces(u, phi_prime):
    s = np.diff(u)
    f = phi_prime(s)
    out = np.zeros_like(u)
    out[1:-1] = f[1:] - f[:-1]
    return out


def _clamp(state, t):
    k = state.clamp
    xs = np.concatenate([state.j[:k], state.j[-k:]]) - state.c * t
    vals = state.profile(xs)
    vels = -state.c * state.profile(xs, 1)
    u, v = state.u, state.v
    u[:k], u[-k:] = vals[:k], vals[k:]
    v[:k], v[-k:] = vels[:k], vels[k:]


def integrate(state, P, T, dt=0.01, record_every=None, callback=None):
    """Velocity Verlet up to time ``state.t + T`` with clamped ends."""
    if not 0 < dt <= DT_MAX:
        raise ValidationError(f"time step must lie in (0, {DT_MAX}]")
    st = replace(state, u=state.u.copy(), v=state.v.copy())
    steps = int(round(T / dt))
    phi_prime = P.phi_prime
    a = _forces(st.u, phi_prime)
    limit = 10 * st.r_max
    for n in range(1, steps + 1):
        st.v += 0.5 * dt * a
        st.u += dt * st.v
        t = state.t + n * dt
        _clamp(st, t)
        a = _forces(st.u, phi_prime)
        st.v += 0.5 * dt * a
        k = st.clamp
        st.v[:k] = -st.c * st.profile(st.j[:k] - st.c * t, 1)
        st.v[-k:] = -st.c * st.profile(st.j[-k:] - st.c * t, 1)
        if np.max(np.abs(np.diff(st.u))) > limit:
            raise Blowup(f"strain exceeded {limit:g} at t={t:g}")
        if callback is not None and record_every and n % record_every == 0:
            st.t = t
            callback(st)
    st.t = state.t + steps * dt
    return st


def interface_position(state, guess=0.0):
    """Zero crossing of the bond strain nearest to ``guess`` (lattice coordinate)."""
    s = state.strains()
    b = state.bond_positions()
    idx = np.flatnonzero((s[:-1] < 0) & (s[1:] >= 0))
    if len(idx) == 0:
        return float("nan")
    i = idx[np.argmin(np.abs(b[idx] - guess))]
    return float(b[i] + (0 - s[i]) / (s[i + 1] - s[i]) * (b[i + 1] - b[i]))


def total_energy(state, P, interior_only=False):
    s = state.strains()
    kin = 0.5 * state.v**2
    pot = P.phi(s)
    if interior_only:
        k = state.clamp
        return float(np.sum(kin[k:-k]) + np.sum(pot[k:-k - 1]))
    return float(np.sum(kin) + np.sum(pot))


@dataclass
class ValidationReport:
    speed: float
    speed_error: float
    profile_error: float
    times: np.ndarray
    positions: np.ndarray


def validate(R, c, mu, P, N=400, T=40.0, dt=0.01, record=50, domain=None, r_max=None):
    """Run the chain on the wave and compare against rigid translation."""
    st0 = init_from_wave(R, c, mu, P.psi_prime, N, T, r_max=r_max, domain=domain)
    times, pos = [0.0], [interface_position(st0)]

    def rec(st):
        times.append(st.t)
        pos.append(interface_position(st, pos[-1] + c * record * dt))

    st = integrate(st0, P, T, dt, record_every=record, callback=rec)
    times, pos = np.array(times), np.array(pos)
    speed = float(np.polyfit(times, pos, 1)[0])
    k = st.clamp
    b = st.bond_positions()[k:-k]
    exact = R(b - c * st.t)
    err = float(np.max(np.abs(st.strains()[k:-k] - exact)))
    scale = float(np.max(np.abs(exact)))
    return ValidationReport(speed, abs(speed - c) / c, err / scale, times, pos)
