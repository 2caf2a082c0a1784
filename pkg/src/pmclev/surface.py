"""Reflection coefficients of the supported surface models.

Surfaces are frozen dataclasses forming a tagged union. The ideal and
windowed conductors are defined directly by their ``(r_s, r_p)``; the
gradient-index slab uses the exact Hankel-function solution of the
inverse-square profile ``eps(z) = eps1 - b^2/(z+L)^2``, and the magnetic
composite is a single Fresnel interface with ``mu1 != 1``.

Evanescent incidence (``kpar > omega/c``) uses
``k_perp0 = +i sqrt(kpar^2 - k0^2)``.
"""
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .constants import C
from .errors import ConfigError, DomainError
from .specfun import hankel2_logderiv

STATUS_OK = "ok"
STATUS_RP_UNDEFINED = "rp_undefined"
STATUS_DOMAIN_ERROR = "domain_error"

CSV_HEADER = "omega_rad_s,kpar_rad_m,re_rs,im_rs,re_rp,im_rp,status"

# reflectance-map extents (rad/s and rad/m); plain defaults, overridable
DEFAULT_MAP_OMEGA = (1.0e13, 5.0e15)
DEFAULT_MAP_KPAR = (0.0, 5.0e15 / C)
DEFAULT_MAP_POINTS = 200

_NAN = complex(math.nan, math.nan)


@dataclass(frozen=True)
class IdealPMC:
    pass


@dataclass(frozen=True)
class IdealPEC:
    pass


@dataclass(frozen=True)
class WindowedPMC:
    """Ideal PMC response restricted to a sharp ``(omega, kpar)`` window.

    Each range is half-open ``[min, max)``; ``None`` means unbounded and
    equal bounds give an empty window.
    """

    omega_min: Optional[float] = None
    omega_max: Optional[float] = None
    kpar_min: Optional[float] = None
    kpar_max: Optional[float] = None

    def __post_init__(self):
        for lo, hi, name in ((self.omega_min, self.omega_max, "omega"), (self.kpar_min, self.kpar_max, "kpar")):
            for v in (lo, hi):
                if v is not None and not (v >= 0.0):
                    raise ConfigError(f"{name} window bounds must be >= 0, got {v!r}")
            if lo is not None and hi is not None and lo > hi:
                raise ConfigError(f"{name}_min > {name}_max in window")

    @property
    def bounds(self):
        """Window as floats with 0 / inf standing in for absent bounds."""
        return (
            0.0 if self.omega_min is None else float(self.omega_min),
            math.inf if self.omega_max is None else float(self.omega_max),
            0.0 if self.kpar_min is None else float(self.kpar_min),
            math.inf if self.kpar_max is None else float(self.kpar_max),
        )

    @property
    def is_empty(self):
        w0, w1, k0, k1 = self.bounds
        return not (w0 < w1 and k0 < k1)

    def contains(self, omega, kpar):
        w0, w1, k0, k1 = self.bounds
        return w0 <= omega < w1 and k0 <= kpar < k1


@dataclass(frozen=True)
class GradientIndex:
    """Inverse-square profile ``eps1 - b^2/(z+L)^2`` filling ``z > 0``.

    Parameters
    ----------
    eps1 : float
        Asymptotic permittivity, > 1.
    b, L : float
        Profile lengths in metres.
    pmc_duality : bool
        Report ``r_p = -r_s`` instead of leaving ``r_p`` undefined.
    convention : {"physical", "k0_scaled"}
        ``"physical"`` uses the dimensionally consistent surface impedance
        ``s = i beta [H2'/H2 + 1/(2 beta L)]``. ``"k0_scaled"`` multiplies it by
        an extra ``k0``, which makes the result depend on the length unit
        (nanometres here); it exists for comparison.
    """

    eps1: float
    b: float
    L: float
    pmc_duality: bool = False
    convention: str = "physical"

    def __post_init__(self):
        if not self.eps1 > 1.0:
            raise ConfigError(f"eps1 must exceed 1, got {self.eps1!r}")
        for name in ("b", "L"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0.0):
                raise ConfigError(f"{name} must be positive, got {v!r}")
        if self.convention not in ("physical", "k0_scaled"):
            raise ConfigError(f"unknown gradient-index convention {self.convention!r}")

    @property
    def surface_eps(self):
        """Permittivity at ``z = 0``; may be negative."""
        return self.eps1 - (self.b / self.L) ** 2


@dataclass(frozen=True)
class MagneticComposite:
    mu1: float
    eps1: float

    def __post_init__(self):
        if not (self.mu1 >= 1.0 and self.eps1 >= 1.0):
            raise ConfigError("magnetic composite needs mu1 >= 1 and eps1 >= 1")


SurfaceModel = Union[IdealPMC, IdealPEC, WindowedPMC, GradientIndex, MagneticComposite]


@dataclass(frozen=True)
class ReflectionCoefficients:
    r_s: complex
    r_p: complex
    r_p_defined: bool = True


def _kperp(eps_mu, k0, kpar):
    a = eps_mu * k0 * k0 - kpar * kpar
    if a >= 0.0:
        return complex(math.sqrt(a), 0.0)
    return complex(0.0, math.sqrt(-a))


def _gradient_rs(surface, omega, kpar):
    k0 = omega / C
    b, L = surface.b, surface.L
    if surface.convention == "k0_scaled":
        k0, kpar, b, L = k0 * 1e-9, kpar * 1e-9, b * 1e9, L * 1e9
    beta2 = surface.eps1 * k0 * k0 - kpar * kpar
    if beta2 <= 0.0:
        raise DomainError(
            f"beta^2 = {beta2:.4g} <= 0 at omega={omega!r}, kpar={kpar!r}: "
            "complex Hankel argument is outside the supported range"
        )
    beta = math.sqrt(beta2)
    nu = math.sqrt(k0 * k0 * b * b + 0.25)
    x = beta * L
    g = hankel2_logderiv(nu, x) + 1.0 / (2.0 * x)
    s = 1j * beta * g
    if surface.convention == "k0_scaled":
        s *= k0
    kp0 = _kperp(1.0, k0, kpar)
    return (kp0 - s) / (kp0 + s)


def reflection(surface, omega, kpar):
    """Fresnel coefficients ``(r_s, r_p)`` at angular frequency and in-plane wavevector.

    Raises
    ------
    DomainError
        For non-positive ``omega``, negative ``kpar``, or a gradient-index
        point whose Hankel argument would be complex.
    """
    if not (omega > 0.0 and math.isfinite(omega)):
        raise DomainError(f"omega must be positive, got {omega!r}")
    if not (kpar >= 0.0 and math.isfinite(kpar)):
        raise DomainError(f"kpar must be >= 0, got {kpar!r}")
    if isinstance(surface, IdealPMC):
        return ReflectionCoefficients(1.0 + 0j, -1.0 + 0j)
    if isinstance(surface, IdealPEC):
        return ReflectionCoefficients(-1.0 + 0j, 1.0 + 0j)
    if isinstance(surface, WindowedPMC):
        if surface.contains(omega, kpar):
            return ReflectionCoefficients(1.0 + 0j, -1.0 + 0j)
        return ReflectionCoefficients(0j, 0j)
    if isinstance(surface, GradientIndex):
        rs = complex(_gradient_rs(surface, omega, kpar))
        if surface.pmc_duality:
            return ReflectionCoefficients(rs, -rs)
        return ReflectionCoefficients(rs, _NAN, False)
    if isinstance(surface, MagneticComposite):
        k0 = omega / C
        kp0 = _kperp(1.0, k0, kpar)
        kp1 = _kperp(surface.eps1 * surface.mu1, k0, kpar)
        rs = (surface.mu1 * kp0 - kp1) / (surface.mu1 * kp0 + kp1)
        return ReflectionCoefficients(complex(rs), _NAN, False)
    raise ConfigError(f"unknown surface model {surface!r}")


@dataclass
class ReflectanceMap:
    """Row-major (omega-major) grid of reflection coefficients."""

    omega: np.ndarray
    kpar: np.ndarray
    r_s: np.ndarray
    r_p: np.ndarray
    status: np.ndarray

    @property
    def propagating(self):
        """Mask of cells with ``kpar < omega / c``."""
        return self.kpar[None, :] < self.omega[:, None] / C

    def pmc_fraction(self, tol=0.1):
        """Share of valid propagating cells with ``|r_s - 1| < tol``."""
        mask = self.propagating & (self.status != STATUS_DOMAIN_ERROR)
        if not mask.any():
            return math.nan
        return float(np.mean(np.abs(self.r_s[mask] - 1.0) < tol))

    def rows(self):
        for i, w in enumerate(self.omega):
            for j, k in enumerate(self.kpar):
                yield w, k, self.r_s[i, j], self.r_p[i, j], self.status[i, j]

    def write_csv(self, fh):
        fh.write(CSV_HEADER + "\n")
        for w, k, rs, rp, st in self.rows():
            rs, rp = complex(rs), complex(rp)
            fh.write(",".join((repr(float(w)), repr(float(k)), repr(rs.real), repr(rs.imag),
                               repr(rp.real), repr(rp.imag), st)) + "\n")


def _check_grid(grid, name, allow_zero):
    g = np.asarray(grid, dtype=float)
    if g.ndim != 1 or g.size == 0:
        raise ConfigError(f"{name} grid must be a non-empty 1-D list")
    if np.any(np.diff(g) <= 0.0):
        raise ConfigError(f"{name} grid must be strictly increasing")
    if g[0] < 0.0 or (g[0] == 0.0 and not allow_zero):
        raise ConfigError(f"{name} grid must be positive")
    return g


def reflectance_map(surface, omega_grid, kpar_grid):
    """Evaluate :func:`reflection` on the outer product of two grids.

    Cells that raise :class:`DomainError` are kept with status
    ``"domain_error"`` and NaN coefficients; cells whose ``r_p`` is not
    defined by the model carry ``"rp_undefined"``.
    """
    om = _check_grid(omega_grid, "omega", allow_zero=False)
    kp = _check_grid(kpar_grid, "kpar", allow_zero=True)
    rs = np.empty((om.size, kp.size), dtype=complex)
    rp = np.empty((om.size, kp.size), dtype=complex)
    status = np.empty((om.size, kp.size), dtype=object)
    for i, w in enumerate(om):
        for j, k in enumerate(kp):
            try:
                r = reflection(surface, float(w), float(k))
            except DomainError:
                rs[i, j] = rp[i, j] = _NAN
                status[i, j] = STATUS_DOMAIN_ERROR
                continue
            rs[i, j] = r.r_s
            rp[i, j] = r.r_p
            status[i, j] = STATUS_OK if r.r_p_defined else STATUS_RP_UNDEFINED
    return ReflectanceMap(om, kp, rs, rp, status)


def default_map_grids(points=DEFAULT_MAP_POINTS, omega_range=DEFAULT_MAP_OMEGA, kpar_range=DEFAULT_MAP_KPAR):
    """Uniform ``(omega, kpar)`` grids for the reflectance map."""
    return np.linspace(*omega_range, points), np.linspace(*kpar_range, points)


PRESET_GRADIENT = GradientIndex(eps1=100.0, b=1000e-9, L=120e-9)
