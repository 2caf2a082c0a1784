"""Casimir-Polder force on a dipolar nanoparticle above perfect conductors.

Sign convention: positive force points away from the surface. A full
bandwidth perfect magnetic conductor (PMC) repels a polarizable particle,
and the perfect electric conductor (PEC) force is its exact negative, so
every routine computes the PMC value and multiplies by the
:class:`Conductor` sign at the end.

All thermal contributions in :class:`ForceBreakdown` are stored in that
PMC orientation, so ``total = sign * (f_st + f_env + f_mat + f_rad)``.
"""
import cmath
import math
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np
from scipy import integrate

from . import kernels
from .constants import C, HBAR, KB
from .errors import ConfigError, ConvergenceError, DomainError
from .materials import Constant, Lorentz, polarizability_poles, static_xi, xi
from .surface import WindowedPMC


class Conductor(IntEnum):
    PEC = -1
    PMC = 1


def _sign(sign):
    try:
        return Conductor(int(sign))
    except ValueError:
        raise ConfigError(f"conductor sign must be +1 (PMC) or -1 (PEC), got {sign!r}") from None


@dataclass(frozen=True)
class ThermalState:
    """Temperatures (K) of the field, the nanoparticle and the surface.

    ``t_s`` only enters through the transmission term, which vanishes for
    perfect conductors; it is carried for completeness.
    """

    t_em: float
    t_np: float
    t_s: float = 0.0

    def __post_init__(self):
        for name in ("t_em", "t_np", "t_s"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0.0):
                raise ConfigError(f"{name} must be a finite temperature >= 0, got {v!r}")


@dataclass(frozen=True)
class ForceBreakdown:
    """Total force and its contributions, in newtons.

    ``f0`` is populated on the zero-temperature path only; ``f_st``,
    ``f_env``, ``f_mat`` and ``f_rad`` on the thermal paths.
    """

    total: float
    f0: float = 0.0
    f_st: float = 0.0
    f_env: float = 0.0
    f_mat: float = 0.0
    f_rad: float = 0.0
    truncation_terms: int = 0
    est_error: float = 0.0
    notes: tuple = field(default=())


def _check_z(z):
    z = float(z)
    if not (z > 0.0 and math.isfinite(z)):
        raise DomainError(f"distance z must be positive, got {z!r}")
    return z


# ---------------------------------------------------------------------------
# perfect-conductor kernel


def kernel_rpc_imag(omega, z):
    """Kernel ``R_PC(i omega, z) = -(3 hbar / 8 pi z^4) A e^{-w}``, ``w = 2 omega z / c``.

    ``A = sum_{n<=3} w^n / n!``. Accepts arrays.
    """
    w = 2.0 * np.asarray(omega, dtype=float) * z / C
    a = ((w / 6.0 + 0.5) * w + 1.0) * w + 1.0
    out = -3.0 * HBAR / (8.0 * math.pi * z ** 4) * a * np.exp(-w)
    return float(out) if out.ndim == 0 else out


def kernel_rpc(omega, z):
    """Analytic continuation of the kernel to complex frequency.

    ``R_PC(omega, z) = -(3 hbar / 8 pi z^4) A~ e^{2 i omega z / c}`` with
    ``A~ = sum_{n<=3} (-2 i omega z / c)^n / n!``; reduces to
    :func:`kernel_rpc_imag` on the positive imaginary axis.
    """
    x = -2j * complex(omega) * z / C
    a = ((x / 6.0 + 0.5) * x + 1.0) * x + 1.0
    return -3.0 * HBAR / (8.0 * math.pi * z ** 4) * a * cmath.exp(-x)


# ---------------------------------------------------------------------------
# zero temperature


def _zero_t_integral(particle, z, order=3, sgn=1.0, **window):
    kind, p = particle.material.kernel_params()
    val, err, status = kernels.casimir_integral(kind, p, z, order=order, sgn=sgn, **window)
    if status:
        raise ConvergenceError(f"adaptive quadrature did not converge at z={z!r} (|err|~{err:.3g})")
    return val, err


def _vectorize(fn, z, *args, **kwargs):
    if np.ndim(z) == 0:
        return fn(z, *args, **kwargs)
    return np.array([fn(zi, *args, **kwargs) for zi in np.asarray(z, dtype=float).ravel()]).reshape(np.shape(z))


def force_zero_t_pmc(particle, z, sign=Conductor.PMC, full_output=False):
    """Zero-temperature force from a full-bandwidth ideal conductor.

    ``F = sign * 3 hbar c V / (32 pi^2 z^5) * int_0^inf xi(i c w / 2z) A(w) e^{-w} dw``

    Parameters
    ----------
    particle : NanoparticleSpec
    z : float or array_like
        Particle-surface distance in metres.
    sign : Conductor
        ``+1`` for PMC (repulsive), ``-1`` for PEC.
    full_output : bool
        Return a :class:`ForceBreakdown` (scalar ``z`` only).
    """
    s = _sign(sign)
    if full_output:
        z = _check_z(z)
        val, err = _zero_t_integral(particle, z)
        pref = 3.0 * HBAR * C * particle.volume / (32.0 * math.pi ** 2 * z ** 5)
        f = s * pref * val
        return ForceBreakdown(total=f, f0=f, est_error=pref * err)

    def one(zi):
        zi = _check_z(zi)
        val, _ = _zero_t_integral(particle, zi)
        return s * 3.0 * HBAR * C * particle.volume / (32.0 * math.pi ** 2 * zi ** 5) * val

    return _vectorize(one, z)


def energy_zero_t_pmc(particle, z, sign=Conductor.PMC):
    """``int_z^inf F dz'`` for the full-bandwidth force, in closed form.

    Integrating the kernel over distance lowers the polynomial by one order:
    ``hbar c V / (32 pi^2 z^4) * int xi(i c w / 2z) (1 + w + w^2/2) e^{-w} dw``.
    """
    s = _sign(sign)

    def one(zi):
        zi = _check_z(zi)
        val, _ = _zero_t_integral(particle, zi, order=2)
        return s * HBAR * C * particle.volume / (32.0 * math.pi ** 2 * zi ** 4) * val

    return _vectorize(one, z)


def powerlaw_coefficient(particle):
    """``C`` in ``F = C / z^5``: ``9 hbar c V (eps_inf - 1) / (8 pi^2 (eps_inf + 2))``."""
    e = particle.material.eps_inf
    return 9.0 * HBAR * C * particle.volume / (8.0 * math.pi ** 2) * (e - 1.0) / (e + 2.0)


def force_zero_t_powerlaw(particle, z, sign=Conductor.PMC):
    """Short-distance power law built from the high-frequency permittivity."""
    s = _sign(sign)
    z = np.asarray(z, dtype=float)
    if np.any(~(z > 0.0)):
        raise DomainError("distance z must be positive")
    out = s * powerlaw_coefficient(particle) / z ** 5
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# band-limited PMC


def _real_window_kernel(omega, z, kmin, kmax):
    """``(pi / hbar) R(omega, z)`` restricted to ``K in [kmin, kmax)``, real ``omega``.

    ``R = (hbar / pi) int K gamma^2 e^{2 i gamma z} dK`` with
    ``gamma = sqrt(omega^2/c^2 - K^2)``. The propagating part is the
    antiderivative of ``gamma^3 e^{2 i gamma z}``; the evanescent part, with
    ``gamma = i kappa``, that of ``-kappa^3 e^{-2 kappa z}``.
    """
    q = omega / C
    a = 2.0 * z
    total = 0j
    k1, k2 = kmin, min(kmax, q)
    if k1 < k2:
        ia = 1j * a

        def prim(g):
            return cmath.exp(ia * g) * (g ** 3 / ia - 3.0 * g * g / ia ** 2 + 6.0 * g / ia ** 3 - 6.0 / ia ** 4)

        g1 = math.sqrt(max(q * q - k1 * k1, 0.0))
        g2 = math.sqrt(max(q * q - k2 * k2, 0.0))
        # K dK = -gamma dgamma
        total += prim(g1) - prim(g2)
    k1, k2 = max(kmin, q), kmax
    if k1 < k2:

        def prim_e(kap):
            if kap == math.inf:
                return 0.0
            return -math.exp(-a * kap) * (kap ** 3 / a + 3.0 * kap * kap / a ** 2 + 6.0 * kap / a ** 3 + 6.0 / a ** 4)

        kap1 = math.sqrt(max(k1 * k1 - q * q, 0.0))
        kap2 = math.inf if k2 == math.inf else math.sqrt(k2 * k2 - q * q)
        total -= prim_e(kap2) - prim_e(kap1)
    return total


def _force_windowed_real(particle, z, surface, epsrel):
    w0, w1, k0, k1 = surface.bounds
    if w1 == math.inf:
        raise ConfigError(
            "the real-frequency windowed force needs a finite omega_max; "
            "use force_zero_t_pmc for the full-bandwidth case"
        )
    model = particle.material

    def integrand(w):
        return (xi(model, w) * _real_window_kernel(w, z, k0, k1)).imag

    pts = [w0, w1]
    if isinstance(model, Lorentz):
        for r in (model.omega_T, model.omega_L, polarizability_poles(model)[0].pole.real):
            for k in (-20.0, -3.0, 0.0, 3.0, 20.0):
                pts.append(r + k * model.gamma)
    pts = sorted({x for x in pts if w0 <= x <= w1})
    val = 0.0
    err = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        v, e = integrate.quad(integrand, a, b, epsabs=0.0, epsrel=epsrel, limit=2000)
        val += v
        err += e
    pref = -particle.volume * HBAR / (2.0 * math.pi ** 2)
    return pref * val, abs(pref) * err


def force_zero_t_windowed(particle, z, surface, method="imaginary", epsrel=1e-8, full_output=False):
    """Zero-temperature force from a PMC whose response is cut to a window.

    Parameters
    ----------
    surface : WindowedPMC
    method : {"imaginary", "real"}
        ``"imaginary"`` (default) applies the sharp window to the
        Wick-rotated integrand: frequencies along the imaginary axis and
        transverse momenta in closed form. ``"real"`` integrates the
        windowed reflection kernel along the real frequency axis; it needs
        a finite ``omega_max`` and, because the windowed kernel is not
        analytic, can differ strongly from the rotated result.
    """
    if not isinstance(surface, WindowedPMC):
        raise ConfigError("force_zero_t_windowed needs a WindowedPMC surface")

    def one(zi):
        zi = _check_z(zi)
        if surface.is_empty:
            return 0.0, 0.0
        if method == "real":
            return _force_windowed_real(particle, zi, surface, epsrel)
        if method != "imaginary":
            raise ConfigError(f"unknown windowed-force method {method!r}")
        w0, w1, k0, k1 = surface.bounds
        val, err = _zero_t_integral(particle, zi, kmin=k0, kmax=k1, omin=w0, omax=w1)
        pref = 3.0 * HBAR * C * particle.volume / (32.0 * math.pi ** 2 * zi ** 5)
        return pref * val, pref * err

    if full_output:
        f, e = one(z)
        return ForceBreakdown(total=f, f0=f, est_error=e)
    return _vectorize(lambda zi: one(zi)[0], z)


# ---------------------------------------------------------------------------
# finite temperature


def _matsubara(particle, z, temp, rtol, max_terms):
    kind, p = particle.material.kernel_params()
    w1 = 4.0 * math.pi * KB * temp * z / (HBAR * C)
    sp, sm, n, status = kernels.matsubara_sums(kind, p, z, w1, rtol, max_terms)
    if status:
        raise ConvergenceError(
            f"Matsubara sum not converged after {max_terms} terms at T={temp!r} K, z={z!r} m "
            f"(first frequency gives 2 omega_1 z / c = {w1:.3g}; this small z*T needs about "
            f"{int(40.0 / w1) if w1 > 0 else 'inf'} terms): raise max_terms or use the zero-temperature force"
        )
    return sp, sm, n


def force_equilibrium_matsubara(particle, z, temp, sign=Conductor.PMC, rtol=1e-12, max_terms=100000):
    """Thermal-equilibrium force as a Matsubara sum.

    ``F = sign * 3 k_B T V / (8 pi z^4) * sum'_n xi(i omega_n) A(w_n) e^{-w_n}``
    with ``omega_n = 2 pi n k_B T / hbar`` and the static term at half weight.
    ``temp = 0`` falls back to :func:`force_zero_t_pmc`.

    Raises
    ------
    ConvergenceError
        If ``max_terms`` terms are not enough (very small ``z * T``).
    """
    s = _sign(sign)
    z = _check_z(z)
    if not (temp >= 0.0 and math.isfinite(temp)):
        raise DomainError(f"temperature must be >= 0, got {temp!r}")
    if temp == 0.0:
        return force_zero_t_pmc(particle, z, s, full_output=True)
    sp, _, n = _matsubara(particle, z, temp, rtol, max_terms)
    pref = 3.0 * KB * temp * particle.volume / (8.0 * math.pi * z ** 4)
    f_st = 0.5 * pref * static_xi(particle.material)
    f_env = pref * sp
    return ForceBreakdown(
        total=s * (f_st + f_env), f_st=f_st, f_env=f_env,
        truncation_terms=n, est_error=3.0 * rtol * abs(f_env),
    )


def _bose(x):
    """``1 / (e^x - 1)`` for complex ``x`` with ``Re x > 0``."""
    if x.real > 700.0:
        return 0j
    return 1.0 / (cmath.exp(x) - 1.0)


def _f_mat(particle, z, t_em, t_np):
    """Pole (material) term in PMC orientation."""
    if t_em == t_np:
        return 0.0
    total = 0.0
    for pr in polarizability_poles(particle.material):
        if pr.pole.real <= 0.0:
            continue
        nu = pr.pole.conjugate()
        res = particle.volume * pr.residue.conjugate()
        dn = (_bose(HBAR * nu / (KB * t_em)) if t_em > 0 else 0j) - (
            _bose(HBAR * nu / (KB * t_np)) if t_np > 0 else 0j)
        total += (res * dn * kernel_rpc(nu, z)).real
    return -total


def force_nonequilibrium(particle, z, thermal, sign=Conductor.PMC, rtol=1e-12, max_terms=100000):
    """Force with field and particle at different temperatures.

    Decomposes the PMC force as ``f_st + f_env + f_mat + f_rad``:

    * ``f_st``: static (n = 0) Matsubara term at ``T_EM``;
    * ``f_env``: Matsubara sum at ``T_EM`` over the even part
      ``[xi(i w) + xi(-i w)] / 2`` of the response;
    * ``f_mat``: residues at the (conjugated) polarizability poles weighted
      by the difference of Bose factors at ``T_EM`` and ``T_NP``;
    * ``f_rad``: Matsubara sum at ``T_NP`` over the odd part
      ``[xi(i w) - xi(-i w)] / 2``.

    At ``T_EM = T_NP`` the pole term vanishes identically and the rest adds
    up to :func:`force_equilibrium_matsubara`. A zero temperature turns the
    corresponding Matsubara sum into its frequency integral.
    """
    s = _sign(sign)
    z = _check_z(z)
    if not isinstance(thermal, ThermalState):
        raise ConfigError("thermal must be a ThermalState")
    notes = []
    v = particle.volume
    xi0 = static_xi(particle.material)

    def parts(temp):
        # (even, odd) sums, already multiplied by their prefactors
        if temp == 0.0:
            pref = 3.0 * HBAR * C * v / (32.0 * math.pi ** 2 * z ** 5)
            ip, _ = _zero_t_integral(particle, z, sgn=1.0)
            im, _ = _zero_t_integral(particle, z, sgn=-1.0)
            return pref * 0.5 * (ip + im), pref * 0.5 * (ip - im), 0
        pref = 3.0 * KB * temp * v / (8.0 * math.pi * z ** 4)
        sp, sm, n = _matsubara(particle, z, temp, rtol, max_terms)
        return pref * 0.5 * (sp + sm), pref * 0.5 * (sp - sm), n

    f_st = 3.0 * KB * thermal.t_em * v * xi0 / (16.0 * math.pi * z ** 4)
    f_env, f_rad, n_em = parts(thermal.t_em)
    n_np = n_em
    if thermal.t_np != thermal.t_em:
        _, f_rad, n_np = parts(thermal.t_np)
    if isinstance(particle.material, Constant):
        f_mat = 0.0
        notes.append("no polarizability poles for a constant permittivity: f_mat = 0")
    else:
        f_mat = _f_mat(particle, z, thermal.t_em, thermal.t_np)
    total = f_st + f_env + f_mat + f_rad
    return ForceBreakdown(
        total=s * total, f_st=f_st, f_env=f_env, f_mat=f_mat, f_rad=f_rad,
        truncation_terms=max(n_em, n_np), est_error=3.0 * rtol * (abs(f_env) + abs(f_rad)),
        notes=tuple(notes),
    )


# ---------------------------------------------------------------------------
# force models consumed by the mechanics layer


class ForceModel:
    """A force law ``F(particle, z)`` with an optional closed-form energy.

    ``energy`` returns ``int_z^inf F dz'`` or ``None`` when only quadrature
    is available.
    """

    descriptor = "abstract"

    def force(self, particle, z):
        raise NotImplementedError

    def energy(self, particle, z):
        return None

    def __repr__(self):
        return f"<{type(self).__name__} {self.descriptor}>"


class PMCForce(ForceModel):
    """Zero-temperature full-bandwidth ideal conductor."""

    def __init__(self, sign=Conductor.PMC):
        self.sign = _sign(sign)
        self.descriptor = f"zero_t_{self.sign.name.lower()}"

    def force(self, particle, z):
        return force_zero_t_pmc(particle, z, self.sign)

    def energy(self, particle, z):
        return energy_zero_t_pmc(particle, z, self.sign)


class PowerLawForce(ForceModel):
    """``C / z^5`` short-distance law."""

    def __init__(self, sign=Conductor.PMC):
        self.sign = _sign(sign)
        self.descriptor = f"powerlaw_{self.sign.name.lower()}"

    def force(self, particle, z):
        return force_zero_t_powerlaw(particle, z, self.sign)

    def energy(self, particle, z):
        return self.sign * powerlaw_coefficient(particle) / (4.0 * np.asarray(z, dtype=float) ** 4)


class WindowedForce(ForceModel):
    """Band-limited PMC at zero temperature."""

    def __init__(self, surface, method="imaginary"):
        self.surface = surface
        self.method = method
        self.descriptor = f"windowed_{method}:{surface.bounds}"

    def force(self, particle, z):
        return force_zero_t_windowed(particle, z, self.surface, self.method)


class MatsubaraForce(ForceModel):
    """Thermal-equilibrium force at temperature ``temp``."""

    def __init__(self, temp, sign=Conductor.PMC, max_terms=100000):
        self.temp = float(temp)
        self.sign = _sign(sign)
        self.max_terms = max_terms
        self.descriptor = f"matsubara_{self.sign.name.lower()}_T{self.temp!r}"

    def force(self, particle, z):
        return _vectorize(
            lambda zi: force_equilibrium_matsubara(particle, zi, self.temp, self.sign,
                                                   max_terms=self.max_terms).total, z)


class NonEquilibriumForce(ForceModel):
    """Force with separate field and particle temperatures."""

    def __init__(self, thermal, sign=Conductor.PMC):
        self.thermal = thermal
        self.sign = _sign(sign)
        self.descriptor = (f"nonequilibrium_{self.sign.name.lower()}_"
                           f"Tem{thermal.t_em!r}_Tnp{thermal.t_np!r}")

    def force(self, particle, z):
        return _vectorize(lambda zi: force_nonequilibrium(particle, zi, self.thermal, self.sign).total, z)
