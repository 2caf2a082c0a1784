"""Brute-force validators kept independent of the fast code paths.

* a layered transfer-matrix solver for the inverse-square permittivity
  profile (checks the analytic gradient-index reflection coefficient);
* direct K-quadrature of the perfect-conductor kernel, on the imaginary axis
  and at complex frequencies (checks the closed form and its continuation);
* a circle-contour residue (checks polarizability residues);
* a real-frequency integral for the out-of-equilibrium force shift (checks
  the pole/Matsubara decomposition).
"""
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from . import kernels
from .constants import C, HBAR, KB
from .errors import DomainError


@dataclass(frozen=True)
class LayeredProfile:
    """Piecewise-constant permittivity below a vacuum half-space.

    ``layer_boundaries`` holds ``n + 1`` ascending depths starting at 0;
    layer ``i`` spans ``[layer_boundaries[i], layer_boundaries[i+1])`` with
    permittivity ``layer_eps[i]``. ``terminal_eps`` fills everything deeper.
    """

    layer_boundaries: np.ndarray
    layer_eps: np.ndarray
    terminal_eps: float

    def __post_init__(self):
        zb = np.asarray(self.layer_boundaries, dtype=float)
        eps = np.asarray(self.layer_eps, dtype=float)
        if zb.ndim != 1 or zb.size != eps.size + 1:
            raise DomainError("need exactly one more boundary than layers")
        if zb[0] != 0.0 or np.any(np.diff(zb) <= 0.0):
            raise DomainError("layer boundaries must start at 0 and increase strictly")
        object.__setattr__(self, "layer_boundaries", zb)
        object.__setattr__(self, "layer_eps", eps)

    @property
    def thicknesses(self):
        return np.diff(self.layer_boundaries)


def gradient_eps(eps1, b, L, z):
    """Inverse-square profile ``eps1 - b^2 / (z + L)^2``."""
    return eps1 - b * b / (np.asarray(z, dtype=float) + L) ** 2


def minimal_z_max(eps1, b, L, rtol=1e-4):
    """Smallest depth where the profile is within ``rtol * eps1`` of ``eps1``."""
    return max(0.0, b / math.sqrt(rtol * eps1) - L)


def discretize_profile(eps1, b, L, z_max=None, n_layers=10000, rtol=1e-4):
    """Midpoint-sampled layer stack of the inverse-square profile on ``[0, z_max]``.

    Raises
    ------
    DomainError
        If ``z_max`` is too shallow for the profile to have converged to
        ``eps1``; the message quotes the minimal admissible value.
    """
    zmin = minimal_z_max(eps1, b, L, rtol)
    if z_max is None:
        z_max = zmin
    if z_max < zmin or z_max <= 0.0:
        raise DomainError(f"z_max={z_max!r} m too small; the profile needs z_max >= {zmin!r} m")
    if n_layers < 1:
        raise DomainError("n_layers must be positive")
    zb = np.linspace(0.0, z_max, n_layers + 1)
    mid = 0.5 * (zb[:-1] + zb[1:])
    return LayeredProfile(zb, gradient_eps(eps1, b, L, mid), float(gradient_eps(eps1, b, L, z_max)))


def transfer_matrix_rs_grid(profile, omega, kpar):
    """s-polarized reflection amplitude for arrays of ``(omega, kpar)``."""
    omega = np.asarray(omega, dtype=float)
    kpar = np.broadcast_to(np.asarray(kpar, dtype=float), omega.shape)
    out = kernels.tmm_rs_grid(profile.layer_eps, profile.thicknesses, profile.terminal_eps,
                              (omega / C).ravel(), kpar.ravel())
    return out.reshape(omega.shape)


def transfer_matrix_rs(profile, omega, kpar):
    """s-polarized reflection amplitude of ``profile`` seen from vacuum."""
    return complex(transfer_matrix_rs_grid(profile, np.array([omega]), np.array([kpar]))[0])


def kernel_quadrature(omega_imag, z):
    """Perfect-conductor kernel at ``i omega_imag`` by direct K-quadrature.

    Integrates ``2 hbar int dK/2pi K kappa^2 exp(-2 kappa z)`` with
    ``kappa = sqrt(K^2 + omega^2/c^2)`` and returns it with the kernel's
    (negative) sign convention.
    """
    q = omega_imag / C

    def f(k):
        kap = math.sqrt(k * k + q * q)
        return k * kap * kap * math.exp(-2.0 * kap * z)

    # scale K by 1/z so the integrand lives on O(1) lengths
    val, _ = integrate.quad(lambda u: f(u / z) / z, 0.0, math.inf, epsabs=0.0, epsrel=1e-12, limit=200)
    return -HBAR / math.pi * val


def kernel_quadrature_complex(omega, z):
    """Perfect-conductor kernel at complex ``omega`` by direct K-quadrature.

    Same integral as :func:`kernel_quadrature` with
    ``kappa = sqrt(K^2 - omega^2/c^2)`` on the principal branch, which is
    the outgoing wave ``exp(2 i gamma z)`` for ``K < Re(omega)/c``.
    Intended for ``Im(omega) >= 0``.
    """
    q2 = (complex(omega) / C) ** 2

    def g(u):
        # K = u / z keeps the evanescent peak at u = O(1)
        k = u / z
        kap = np.sqrt(k * k - q2)
        return k * kap * kap * np.exp(-2.0 * kap * z) / z

    uc = abs(complex(omega).real) * z / C
    pts = [0.0, uc] if uc > 0 else [0.0]
    # absolute floor at 1e-13 of the static scale 3 / (8 z^4)
    floor = 1e-13 * 3.0 / (8.0 * z ** 4)
    total = 0.0j
    for a, b in zip(pts, pts[1:] + [math.inf]):
        re, _ = integrate.quad(lambda u: g(u).real, a, b, epsabs=floor, epsrel=1e-11, limit=400)
        im, _ = integrate.quad(lambda u: g(u).imag, a, b, epsabs=floor, epsrel=1e-11, limit=400)
        total += re + 1j * im
    return -HBAR / math.pi * total


def contour_residue(f, center, radius, n=128):
    """Residue of ``f`` at ``center`` from the trapezoid rule on a circle.

    Exponentially accurate when ``f`` is analytic in an annulus around the
    circle other than the enclosed pole.
    """
    t = 2.0 * math.pi * np.arange(n) / n
    dz = radius * np.exp(1j * t)
    return complex(np.mean(np.asarray(f(center + dz)) * dz))


def _occupation(x):
    # Bose factor, safe for large x and x -> 0
    return 1.0 / math.expm1(x) if x < 700.0 else 0.0


def nonequilibrium_shift_real_axis(particle, z, t_em, t_np, epsrel=1e-10):
    """``F(T_EM, T_NP) - F(T_EM, T_EM)`` above an ideal PMC, on the real axis.

    Only the dissipative part of the polarizability responds to the particle
    temperature, so the shift is

        -2 int_0^inf dw/2pi [n(w, T_NP) - n(w, T_EM)] Im alpha(w) Re R(w, z)

    with the real-frequency kernel ``R = -(3 hbar / 8 pi z^4) A(w) exp(2 i w z / c)``
    and ``A = sum_{n<=3} (-2 i w z / c)^n / n!``. Integrated with scipy's
    adaptive quadrature; breakpoints go at the resonance.
    """
    from .materials import polarizability_poles, xi

    model = particle.material
    vol = particle.volume
    pref = 3.0 * HBAR / (8.0 * math.pi * z ** 4)

    def re_kernel(w):
        x = 2.0 * w * z / C
        a = 1.0 - 1j * x - 0.5 * x * x + 1j * x ** 3 / 6.0
        return (-pref * a * complex(math.cos(x), math.sin(x))).real

    def integrand(w):
        if w == 0.0:
            return 0.0
        dn = _occupation(HBAR * w / (KB * t_np)) if t_np > 0 else 0.0
        dn -= _occupation(HBAR * w / (KB * t_em)) if t_em > 0 else 0.0
        return -2.0 / (2.0 * math.pi) * dn * vol * float(np.imag(xi(model, w))) * re_kernel(w)

    tmax = max(t_em, t_np)
    wmax = 60.0 * KB * tmax / HBAR
    pts = [0.0]
    for pr in polarizability_poles(model):
        if pr.pole.real > 0:
            g = abs(pr.pole.imag)
            for k in (-50.0, -5.0, -1.0, 0.0, 1.0, 5.0, 50.0):
                w = pr.pole.real + k * g
                if 0.0 < w < wmax:
                    pts.append(w)
    pts.append(wmax)
    pts = sorted(set(pts))
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        v, _ = integrate.quad(integrand, a, b, epsabs=0.0, epsrel=epsrel, limit=400)
        total += v
    return total
