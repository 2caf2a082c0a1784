"""Dielectric models, Clausius-Mossotti response and nanoparticle parameters.

Frequencies are angular (rad/s) and complex where it matters. The time
convention is ``exp(-i omega t)``, so passive media have ``Im eps > 0`` on the
positive real axis and all material poles sit in the lower half plane.
"""
import math
import warnings
from dataclasses import dataclass
from typing import Union

import numpy as np

from . import kernels
from .constants import G
from .errors import ConfigError, DomainError

LORENTZ = kernels.KIND_LORENTZ
DRUDE = kernels.KIND_DRUDE
CONSTANT = kernels.KIND_CONSTANT


def _positive(name, value):
    if not (math.isfinite(value) and value > 0.0):
        raise ConfigError(f"{name} must be a positive finite number, got {value!r}")


@dataclass(frozen=True)
class Lorentz:
    """Single-oscillator (phonon) model.

    ``eps(w) = eps_inf (w_L^2 - w^2 - i g w) / (w_T^2 - w^2 - i g w)``
    """

    eps_inf: float
    omega_L: float
    omega_T: float
    gamma: float

    def __post_init__(self):
        if not self.eps_inf >= 1.0:
            raise ConfigError(f"eps_inf must be >= 1, got {self.eps_inf!r}")
        for name in ("omega_L", "omega_T", "gamma"):
            _positive(name, getattr(self, name))
        if not self.omega_L > self.omega_T:
            raise ConfigError("Lorentz model needs omega_L > omega_T")

    def kernel_params(self):
        return LORENTZ, np.array([self.eps_inf, self.omega_L, self.omega_T, self.gamma])


@dataclass(frozen=True)
class Drude:
    """Free-electron model ``eps(w) = eps_inf - w_P^2 / (w^2 + i g w)``."""

    eps_inf: float
    omega_P: float
    gamma: float

    def __post_init__(self):
        if not self.eps_inf >= 1.0:
            raise ConfigError(f"eps_inf must be >= 1, got {self.eps_inf!r}")
        _positive("omega_P", self.omega_P)
        _positive("gamma", self.gamma)

    def kernel_params(self):
        return DRUDE, np.array([self.eps_inf, self.omega_P, self.gamma, 0.0])


@dataclass(frozen=True)
class Constant:
    """Dispersionless dielectric."""

    eps: float

    def __post_init__(self):
        if not (math.isfinite(self.eps) and self.eps >= 1.0):
            raise ConfigError(f"constant eps must be >= 1, got {self.eps!r}")

    @property
    def eps_inf(self):
        return self.eps

    def kernel_params(self):
        return CONSTANT, np.array([self.eps, 0.0, 0.0, 0.0])


PermittivityModel = Union[Lorentz, Drude, Constant]


@dataclass(frozen=True)
class PoleResidue:
    """A pole of the polarizability and the residue of ``xi`` there.

    The residue is per unit volume: multiply by the particle volume to get
    the residue of ``alpha = V xi``.
    """

    pole: complex
    residue: complex


def permittivity(model, freq):
    """Relative permittivity at (complex) angular frequency ``freq``.

    Passivity (``Im eps >= 0``) is a statement about the real axis only;
    arbitrary complex points are accepted for pole work.
    """
    w = np.asarray(freq, dtype=complex)
    if isinstance(model, Constant):
        out = np.full(w.shape, complex(model.eps))
    elif isinstance(model, Lorentz):
        iw = 1j * model.gamma * w
        out = model.eps_inf * (model.omega_L ** 2 - w * w - iw) / (model.omega_T ** 2 - w * w - iw)
    elif isinstance(model, Drude):
        d = w * w + 1j * model.gamma * w
        if np.any(d == 0):
            raise DomainError("Drude permittivity diverges at zero frequency")
        out = model.eps_inf - model.omega_P ** 2 / d
    else:
        raise ConfigError(f"unknown permittivity model {model!r}")
    return out[()] if out.ndim == 0 else out


def xi(model, freq):
    """Clausius-Mossotti factor ``3 (eps - 1) / (eps + 2)``.

    Written as a ratio of polynomials, so the Drude conductor limit
    ``freq -> 0`` gives 3 instead of inf/inf.
    """
    w = np.asarray(freq, dtype=complex)
    if isinstance(model, Constant):
        num = np.full(w.shape, complex(3.0 * (model.eps - 1.0)))
        den = np.full(w.shape, complex(model.eps + 2.0))
    elif isinstance(model, Lorentz):
        iw = 1j * model.gamma * w
        n = model.eps_inf * (model.omega_L ** 2 - w * w - iw)
        d = model.omega_T ** 2 - w * w - iw
        num = 3.0 * (n - d)
        den = n + 2.0 * d
    elif isinstance(model, Drude):
        d = w * w + 1j * model.gamma * w
        n = model.eps_inf * d - model.omega_P ** 2
        num = 3.0 * (n - d)
        den = n + 2.0 * d
    else:
        raise ConfigError(f"unknown permittivity model {model!r}")
    if np.any(den == 0):
        raise DomainError("xi evaluated exactly at a polarizability pole (eps = -2)")
    out = num / den
    return out[()] if out.ndim == 0 else out


def xi_imag(model, omega, conjugate=False):
    """``xi(i omega)`` for real ``omega >= 0`` (a real number).

    With ``conjugate=True`` returns ``xi*(i omega) = xi(-i omega)``, the
    conjugated response continued to the imaginary axis.
    """
    kind, p = model.kernel_params()
    sgn = -1.0 if conjugate else 1.0
    om = np.asarray(omega, dtype=float)
    out = kernels.xi_imag_array(kind, p, om.ravel(), sgn).reshape(om.shape)
    return float(out) if out.ndim == 0 else out


def static_xi(model):
    """Zero-frequency limit of ``xi``."""
    kind, p = model.kernel_params()
    return float(kernels.xi_imag(kind, p, 0.0, 1.0))


def _reduced_frequency2(model):
    if isinstance(model, Lorentz):
        return (model.eps_inf * model.omega_L ** 2 + 2.0 * model.omega_T ** 2) / (model.eps_inf + 2.0)
    return model.omega_P ** 2 / (model.eps_inf + 2.0)


def polarizability_poles(model):
    """Poles of ``xi`` (zeros of ``eps + 2``) with their residues.

    Both roots of ``w^2 + i g w - W^2 = 0`` are returned, ordered by
    decreasing real part. Each residue comes from the closed form and is
    cross-checked against a circle-contour quadrature; if the two differ by
    more than 1e-6 relative the contour value is kept.
    """
    if isinstance(model, Constant):
        return []
    from .oracle import contour_residue

    w2 = _reduced_frequency2(model)
    g = model.gamma
    disc = np.sqrt(complex(w2 - 0.25 * g * g))
    poles = []
    for root in (disc - 0.5j * g, -disc - 0.5j * g):
        # Newton polish on the quadratic (exact already, up to rounding)
        for _ in range(3):
            f = root * root + 1j * g * root - w2
            root = root - f / (2.0 * root + 1j * g)
        if isinstance(model, Lorentz):
            res = 9.0 * (model.omega_T ** 2 - w2) / ((model.eps_inf + 2.0) * (2.0 * root + 1j * g))
        else:
            res = -9.0 * w2 / ((model.eps_inf + 2.0) * (2.0 * root + 1j * g))
        radius = 0.25 * min(abs(2.0 * disc), abs(root))
        check = contour_residue(lambda w: xi(model, w), root, radius)
        if abs(check - res) > 1e-6 * abs(res):
            res = check
        poles.append(PoleResidue(complex(root), complex(res)))
    return poles


@dataclass(frozen=True)
class NanoparticleSpec:
    """Homogeneous sphere treated as a point dipole."""

    radius: float
    density: float
    material: PermittivityModel

    def __post_init__(self):
        _positive("radius", self.radius)
        _positive("density", self.density)

    @property
    def volume(self):
        return 4.0 / 3.0 * math.pi * self.radius ** 3

    @property
    def mass(self):
        return self.density * self.volume

    def polarizability(self, freq):
        """``alpha = V xi`` in m^3."""
        return self.volume * xi(self.material, freq)

    def check_point_dipole(self, z, threshold=0.2):
        """Warn when the sphere is too large for the dipole approximation at ``z``."""
        zmin = float(np.min(z))
        if self.radius / zmin > threshold:
            warnings.warn(
                f"R/z = {self.radius / zmin:.3g} exceeds {threshold}; point-dipole results are unreliable",
                stacklevel=2,
            )


def weight(np_spec):
    """Gravitational force ``m g`` on the particle, in newtons."""
    return np_spec.mass * G


SIC = Lorentz(eps_inf=6.7, omega_L=18.253e13, omega_T=14.937e13, gamma=8.966e11)
AU = Drude(eps_inf=5.0, omega_P=2.15e15, gamma=5.88e13)
SI = Constant(eps=12.25)

PRESETS = {
    "sic": (SIC, 3210.0),
    "au": (AU, 19300.0),
    "si": (SI, 2330.0),
}


def preset(name):
    """``(model, density)`` for a named material preset."""
    try:
        return PRESETS[name.lower()]
    except KeyError:
        raise ConfigError(f"unknown material preset {name!r}; choose from {sorted(PRESETS)}") from None


def nanoparticle(name, radius):
    """Nanoparticle made of a preset material."""
    model, rho = preset(name)
    return NanoparticleSpec(radius=radius, density=rho, material=model)
