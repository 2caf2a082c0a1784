"""Levitation mechanics: equilibrium height, trap frequency, potential, trajectories.

The particle moves along ``z`` only, under ``m z'' = F(z) - m g``. The
potential is ``U(z) = int_z^inf F dz' + m g z`` so that ``-dU/dz = F - mg``.
"""
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import integrate, optimize

from .constants import G
from .errors import DomainError, NoLevitationError
from .materials import weight

DEFAULT_BRACKET = (5.0e-8, 5.0e-6)
POTENTIAL_DOMAIN = (5.0e-8, 1.0e-5)
TAIL_START = 1.0e-5
DEFAULT_DT = 1.0e-7
STEPS_PER_PERIOD = 50


@dataclass(frozen=True)
class LevitationSolution:
    z0: float
    u0: float
    omega_trap: float
    force_model_id: str

    @property
    def nu(self):
        return self.omega_trap / (2.0 * math.pi)

    @property
    def period(self):
        return 2.0 * math.pi / self.omega_trap

    def to_dict(self):
        return {
            "z0_m": self.z0,
            "u0_J": self.u0,
            "omega_rad_s": self.omega_trap,
            "nu_Hz": self.nu,
            "period_s": self.period,
        }


@dataclass
class Trajectory:
    times: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray
    energies: np.ndarray
    period_estimate: Optional[float] = None
    status: str = "ok"
    z0: Optional[float] = None
    u0: Optional[float] = None
    turning_points: list = field(default_factory=list)

    CSV_HEADER = "t_s,z_m,v_m_s,E_J"

    def energy_drift(self):
        """``max |E(t) - E(0)| / |E(0) - U0|``."""
        e = self.energies
        scale = abs(e[0] - self.u0) if self.u0 is not None else abs(e[0])
        if scale == 0.0:
            scale = abs(e[0])
        return float(np.max(np.abs(e - e[0])) / scale)

    def write_csv(self, fh):
        fh.write(self.CSV_HEADER + "\n")
        for t, z, v, e in zip(self.times, self.positions, self.velocities, self.energies):
            fh.write(f"{float(t)!r},{float(z)!r},{float(v)!r},{float(e)!r}\n")


def _force(model, particle, z):
    return float(model.force(particle, z))


def potential(particle, force_model, z):
    """Total potential ``U(z) = int_z^inf F dz' + m g z`` in joules.

    Uses the model's closed-form energy when it has one; otherwise adaptive
    quadrature up to 10 um with the remaining ``z^-5`` tail added in
    closed form, ``F(z_t) z_t / 4``.
    """
    z = float(z)
    if not z > 0.0:
        raise DomainError(f"z must be positive, got {z!r}")
    mgz = weight(particle) * z
    e = force_model.energy(particle, z)
    if e is not None:
        return float(e) + mgz
    zt = max(z, TAIL_START)
    tail = _force(force_model, particle, zt) * zt / 4.0
    body = 0.0
    if z < zt:
        body, _ = integrate.quad(lambda s: _force(force_model, particle, s), z, zt,
                                 epsabs=0.0, epsrel=1e-10, limit=200, points=[2.0 * z, 1e-6])
    return body + tail + mgz


def harmonic_frequency(particle, force_model, z0, h_rel=1e-3):
    """Trap frequency ``sqrt(-(1/m) dF/dz)`` at ``z0``.

    Central differences with step ``h_rel * z0`` and one Richardson step.
    """
    h = h_rel * z0

    def d(step):
        return (_force(force_model, particle, z0 + step) - _force(force_model, particle, z0 - step)) / (2.0 * step)

    slope = (4.0 * d(0.5 * h) - d(h)) / 3.0
    w2 = -slope / particle.mass
    if not w2 > 0.0:
        raise DomainError(f"unstable equilibrium at z0={z0!r}: dF/dz = {slope!r} >= 0")
    return math.sqrt(w2)


def find_equilibrium(particle, force_model, bracket=DEFAULT_BRACKET):
    """Height where the force balances gravity, with trap frequency and ``U0``.

    Raises
    ------
    NoLevitationError
        If ``F - mg`` does not change sign from positive to negative in
        ``bracket`` (for example an attractive PEC force).
    """
    mg = weight(particle)
    lo, hi = bracket

    def resid(z):
        return _force(force_model, particle, z) - mg

    r_lo = resid(lo)
    r_hi = resid(hi)
    if not (r_lo > 0.0 > r_hi):
        raise NoLevitationError(
            f"no levitation in [{lo!r}, {hi!r}] m: F - mg = {r_lo:.3e} .. {r_hi:.3e} N"
        )
    z0 = optimize.brentq(resid, lo, hi, xtol=1e-30, rtol=1e-15, maxiter=200)
    res = resid(z0)
    if abs(res) > 1e-6 * mg:
        raise DomainError(f"equilibrium residual {res!r} N exceeds 1e-6 mg")
    omega = harmonic_frequency(particle, force_model, z0)
    u0 = potential(particle, force_model, z0)
    return LevitationSolution(z0=z0, u0=u0, omega_trap=omega, force_model_id=force_model.descriptor)


def _crossing_period(t, z, z0):
    s = z - z0
    idx = np.nonzero((s[:-1] < 0.0) & (s[1:] >= 0.0))[0]
    if idx.size < 3:
        return None
    tc = t[idx] - s[idx] * (t[idx + 1] - t[idx]) / (s[idx + 1] - s[idx])
    return float(np.mean(np.diff(tc)))


def simulate_trajectory(particle, force_model, z_init, v_init, t_end, dt=DEFAULT_DT,
                        solution=None, domain=POTENTIAL_DOMAIN):
    """Velocity-Verlet integration of ``m z'' = F(z) - m g``.

    Parameters
    ----------
    z_init, v_init : float
        Initial position (m) and velocity (m/s).
    t_end, dt : float
        Duration and fixed step in seconds. ``dt`` must resolve the harmonic
        period with at least 50 steps.
    solution : LevitationSolution, optional
        Equilibrium of ``force_model``; computed when omitted.
    domain : (float, float)
        Leaving this interval ends the run with status ``"escaped"``.

    Returns
    -------
    Trajectory
        ``period_estimate`` is the mean interval between upward crossings of
        ``z0`` (needs two full cycles), else ``None``.
    """
    if solution is None:
        solution = find_equilibrium(particle, force_model)
    if dt <= 0.0 or t_end <= 0.0:
        raise DomainError("dt and t_end must be positive")
    dt_max = 2.0 * math.pi / (STEPS_PER_PERIOD * solution.omega_trap)
    if dt > dt_max:
        raise DomainError(f"dt={dt!r} s exceeds 2 pi / (50 Omega) = {dt_max!r} s")
    if not domain[0] < z_init < domain[1]:
        raise DomainError(f"z_init={z_init!r} outside {domain}")
    m = particle.mass
    n = int(round(t_end / dt))
    t = np.arange(n + 1) * dt
    zs = np.empty(n + 1)
    vs = np.empty(n + 1)
    es = np.empty(n + 1)
    z = float(z_init)
    v = float(v_init)
    a = _force(force_model, particle, z) / m - G
    zs[0], vs[0] = z, v
    es[0] = 0.5 * m * v * v + potential(particle, force_model, z)
    status = "ok"
    turning = []
    last = n
    for i in range(1, n + 1):
        vh = v + 0.5 * dt * a
        z = z + dt * vh
        if not domain[0] < z < domain[1]:
            status = "escaped"
            last = i - 1
            break
        a_new = _force(force_model, particle, z) / m - G
        v_new = vh + 0.5 * dt * a_new
        if v_new == 0.0 or (v > 0.0) != (v_new > 0.0):
            # turning point from the local quadratic z(t)
            turning.append(z - v_new * v_new / (2.0 * a_new) if a_new != 0.0 else z)
        v, a = v_new, a_new
        zs[i], vs[i] = z, v
        es[i] = 0.5 * m * v * v + potential(particle, force_model, z)
    sl = slice(0, last + 1)
    traj = Trajectory(t[sl], zs[sl], vs[sl], es[sl], status=status, z0=solution.z0, u0=solution.u0,
                      turning_points=turning)
    traj.period_estimate = _crossing_period(traj.times, traj.positions, solution.z0)
    return traj
