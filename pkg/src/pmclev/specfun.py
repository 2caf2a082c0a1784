"""Real-order Bessel functions J_nu, Y_nu and the Hankel log-derivative.

The core evaluates J, J', Y, Y' for real order ``nu >= 0`` and real ``x > 0``
in a scaled form ``value = mantissa * 2**exponent`` so that orders far above
the argument (where J underflows and Y overflows) stay representable.

Regimes
-------
* ``x >= 25`` and the Hankel asymptotic series converges to full precision:
  large-argument expansion.
* ``x >= 25`` and ``nu < x``: the expansion at the fractional orders
  ``mu`` and ``mu + 1`` followed by upward recurrence of both J and Y.
* ``x < 2``: CF1 continued fraction for J'/J, Miller-type downward recurrence
  to a fractional order ``|mu| <= 1/2`` and Temme's series for Y_mu; J_mu is
  fixed by the Wronskian.
* otherwise: CF1 plus Steed's complex continued fraction CF2 for the
  fractional order, again normalized by the Wronskian.

In the continued-fraction regimes Y is carried to the requested order by
the (stable) upward recurrence.
"""
import math
from typing import NamedTuple

import numpy as np

from ._backend import njit
from .errors import DomainError

NU_MAX = 2000.0
X_MAX = 1.0e5

_EPS = 1.0e-16
_FPMIN = 1.0e-300
_SCALE_BITS = 600
_BIG = 2.0 ** _SCALE_BITS
_INV_BIG = 2.0 ** -_SCALE_BITS

# Taylor coefficients of 1/Gamma(1 + x) about x = 0.
_RGAM = np.array([
    1.0, 0.57721566490153286, -0.65587807152025388, -0.042002635034095236,
    0.16653861138229149, -0.042197734555544337, -0.0096219715278769736,
    0.0072189432466630995, -0.0011651675918590651, -0.00021524167411495097,
    0.00012805028238811619, -2.0134854780788239e-5, -1.2504934821426707e-6,
    1.1330272319816959e-6, -2.0563384169776071e-7, 6.1160951044814158e-9,
    5.0020076444692229e-9, -1.1812745704870201e-9, 1.0434267116911005e-10,
    7.7822634399050713e-12, -3.6968056186422057e-12, 5.100370287454476e-13,
    -2.0583260535665068e-14, -5.348122539423018e-15, 1.2267786282382608e-15,
    -1.1812593016974588e-16, 1.1866922547516003e-18,
])


class BesselPair(NamedTuple):
    j: float
    y: float
    jp: float
    yp: float


@njit
def _temme_gammas(mu):
    # gam1 = (1/G(1-mu) - 1/G(1+mu)) / (2 mu), gam2 = (1/G(1-mu) + 1/G(1+mu)) / 2
    # even = sum c_k mu^k (k even), odd = sum c_k mu^(k-1) (k odd)
    even = 0.0
    odd = 0.0
    p = 1.0
    mu2 = mu * mu
    for k in range(_RGAM.shape[0]):
        if k % 2 == 0:
            even += _RGAM[k] * p
        else:
            odd += _RGAM[k] * p
            p *= mu2
    gam1 = -odd
    gam2 = even
    gampl = even + mu * odd
    gammi = even - mu * odd
    return gam1, gam2, gampl, gammi


@njit
def _asymptotic_pq(nu, x):
    """Hankel P, Q series; returns (P, Q, converged)."""
    mu4 = 4.0 * nu * nu
    p = 1.0
    q = 0.0
    term = 1.0
    last = 1.0
    k = 1
    while k < 200:
        term *= (mu4 - (2.0 * k - 1.0) ** 2) / (8.0 * k * x)
        a = abs(term)
        if a > last and k > 2:
            break
        if k % 4 == 1:
            q += term
        elif k % 4 == 2:
            p -= term
        elif k % 4 == 3:
            q -= term
        else:
            p += term
        last = a
        if a < 1.0e-17 * (abs(p) + abs(q)):
            return p, q, True
        k += 1
    return p, q, last < 1.0e-14 * (abs(p) + abs(q))


@njit
def _asymptotic_jy(nu, x):
    p, q, ok = _asymptotic_pq(nu, x)
    if not ok:
        return 0.0, 0.0, False
    phi = (0.5 * nu + 0.25) * math.pi
    cx = math.cos(x)
    sx = math.sin(x)
    cp = math.cos(phi)
    sp = math.sin(phi)
    chi_c = cx * cp + sx * sp
    chi_s = sx * cp - cx * sp
    amp = math.sqrt(2.0 / (math.pi * x))
    j = amp * (p * chi_c - q * chi_s)
    y = amp * (p * chi_s + q * chi_c)
    return j, y, True


@njit
def _jy_core(nu, x):
    """Scaled J, J', Y, Y'.

    Returns ``(jm, jpm, je, ym, ypm, ye, status)`` with
    ``J = jm * 2**je``, ``J' = jpm * 2**je`` and likewise for Y.
    ``status`` is 0 on success, 1 if a continued fraction failed.
    """
    if x >= 25.0:
        j0, y0, ok0 = _asymptotic_jy(nu, x)
        if ok0:
            j1, y1, ok1 = _asymptotic_jy(nu + 1.0, x)
            if ok1:
                jp = nu / x * j0 - j1
                yp = nu / x * y0 - y1
                return j0, jp, 0, y0, yp, 0, 0
        if nu < x:
            # below the turning point both recurrences are neutrally stable,
            # so start from small orders and go up (CF1 would need ~x steps)
            mu = nu - math.floor(nu)
            jl, yl, ok0 = _asymptotic_jy(mu, x)
            jc, yc, ok1 = _asymptotic_jy(mu + 1.0, x)
            if ok0 and ok1:
                n = int(math.floor(nu))
                for i in range(n):
                    fac = 2.0 * (mu + 1.0 + i) / x
                    jn = fac * jc - jl
                    yn = fac * yc - yl
                    jl = jc
                    jc = jn
                    yl = yc
                    yc = yn
                jp = nu / x * jl - jc
                yp = nu / x * yl - yc
                return jl, jp, 0, yl, yp, 0, 0

    xmin = 2.0
    if x < xmin:
        nl = int(nu + 0.5)
    else:
        nl = max(0, int(nu - x + 1.5))
    xmu = nu - nl
    xmu2 = xmu * xmu
    xi = 1.0 / x
    xi2 = 2.0 * xi
    w = xi2 / math.pi

    # CF1: h = J'_nu / J_nu
    maxit = int(4.0 * x) + 20000
    isign = 1.0
    h = nu * xi
    if h < _FPMIN:
        h = _FPMIN
    b = xi2 * nu
    d = 0.0
    c = h
    converged = False
    for _ in range(maxit):
        b += xi2
        d = b - d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = b - 1.0 / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        dl = c * d
        h = dl * h
        if d < 0.0:
            isign = -isign
        if abs(dl - 1.0) < _EPS:
            converged = True
            break
    if not converged:
        return 0.0, 0.0, 0, 0.0, 0.0, 0, 1

    # downward recurrence nu -> xmu, rescaled by exact powers of two
    rjl = isign
    rjpl = h * rjl
    rjl1 = rjl
    rjp1 = rjpl
    jshift = 0
    fact = nu * xi
    for _ in range(nl):
        rjtemp = fact * rjl + rjpl
        fact -= xi
        rjpl = fact * rjtemp - rjl
        rjl = rjtemp
        if abs(rjl) > _BIG:
            rjl *= _INV_BIG
            rjpl *= _INV_BIG
            jshift += _SCALE_BITS
    if rjl == 0.0:
        rjl = _EPS
    f = rjpl / rjl

    if x < xmin:
        x2 = 0.5 * x
        pimu = math.pi * xmu
        if abs(pimu) < _EPS:
            fact = 1.0
        else:
            fact = pimu / math.sin(pimu)
        d = -math.log(x2)
        e = xmu * d
        if abs(e) < _EPS:
            fact2 = 1.0
        else:
            fact2 = math.sinh(e) / e
        gam1, gam2, gampl, gammi = _temme_gammas(xmu)
        ff = 2.0 / math.pi * fact * (gam1 * math.cosh(e) + gam2 * fact2 * d)
        e = math.exp(e)
        p = e / (gampl * math.pi)
        q = 1.0 / (e * math.pi * gammi)
        pimu2 = 0.5 * pimu
        if abs(pimu2) < _EPS:
            fact3 = 1.0
        else:
            fact3 = math.sin(pimu2) / pimu2
        r = math.pi * pimu2 * fact3 * fact3
        c = 1.0
        d = -x2 * x2
        total = ff + r * q
        total1 = p
        converged = False
        for i in range(1, 10000):
            ff = (i * ff + p + q) / (i * i - xmu2)
            c *= d / i
            p /= i - xmu
            q /= i + xmu
            dl = c * (ff + r * q)
            total += dl
            dl1 = c * p - i * dl
            total1 += dl1
            if abs(dl) < (1.0 + abs(total)) * _EPS:
                converged = True
                break
        if not converged:
            return 0.0, 0.0, 0, 0.0, 0.0, 0, 1
        rymu = -total
        ry1 = -total1 * xi2
        rymup = xmu * xi * rymu - ry1
        rjmu = w / (rymup - f * rymu)
    else:
        a = 0.25 - xmu2
        p = -0.5 * xi
        q = 1.0
        br = 2.0 * x
        bi = 2.0
        fact = a * xi / (p * p + q * q)
        cr = br + q * fact
        ci = bi + p * fact
        den = br * br + bi * bi
        dr = br / den
        di = -bi / den
        dlr = cr * dr - ci * di
        dli = cr * di + ci * dr
        temp = p * dlr - q * dli
        q = p * dli + q * dlr
        p = temp
        converged = False
        for i in range(2, 100000):
            a += 2.0 * (i - 1)
            bi += 2.0
            dr = a * dr + br
            di = a * di + bi
            if abs(dr) + abs(di) < _FPMIN:
                dr = _FPMIN
            fact = a / (cr * cr + ci * ci)
            cr = br + cr * fact
            ci = bi - ci * fact
            if abs(cr) + abs(ci) < _FPMIN:
                cr = _FPMIN
            den = dr * dr + di * di
            dr /= den
            di /= -den
            dlr = cr * dr - ci * di
            dli = cr * di + ci * dr
            temp = p * dlr - q * dli
            q = p * dli + q * dlr
            p = temp
            if abs(dlr - 1.0) + abs(dli) < _EPS:
                converged = True
                break
        if not converged:
            return 0.0, 0.0, 0, 0.0, 0.0, 0, 1
        gam = (p - f) / q
        rjmu = math.sqrt(w / ((p - f) * gam + q))
        if rjl < 0.0:
            rjmu = -rjmu
        rymu = rjmu * gam
        rymup = rymu * (p + q / gam)
        ry1 = xmu * xi * rymu - rymup

    ratio = rjmu / rjl
    jm = rjl1 * ratio
    jpm = rjp1 * ratio
    je = -jshift

    ye = 0
    for i in range(1, nl + 1):
        rytemp = (xmu + i) * xi2 * ry1 - rymu
        rymu = ry1
        ry1 = rytemp
        if abs(ry1) > _BIG:
            rymu *= _INV_BIG
            ry1 *= _INV_BIG
            ye += _SCALE_BITS
    ypm = nu * xi * rymu - ry1
    return jm, jpm, je, rymu, ypm, ye, 0


@njit
def _hankel2_logderiv_core(nu, x):
    jm, jpm, je, ym, ypm, ye, status = _jy_core(nu, x)
    s = max(je, ye)
    js = math.ldexp(1.0, je - s) if je - s > -1100 else 0.0
    ys = math.ldexp(1.0, ye - s) if ye - s > -1100 else 0.0
    num = complex(jpm * js, -ypm * ys)
    den = complex(jm * js, -ym * ys)
    return num / den, status


def _check_domain(nu, x):
    if not (math.isfinite(nu) and math.isfinite(x)):
        raise DomainError(f"non-finite Bessel argument (nu={nu}, x={x})")
    if x <= 0.0 or x > X_MAX:
        raise DomainError(f"Bessel argument x={x} outside (0, {X_MAX:g}]")
    if nu < 0.0 or nu > NU_MAX:
        raise DomainError(f"Bessel order nu={nu} outside [0, {NU_MAX:g}]")


def _to_float(m, e, name):
    if m == 0.0:
        return 0.0
    mant, exp2 = math.frexp(m)
    total = exp2 + e
    if total > 1024:
        raise OverflowError(f"{name} overflows double precision (~2**{total})")
    if total < -1021:
        raise OverflowError(f"{name} underflows double precision (~2**{total})")
    return math.ldexp(mant, total)


def bessel_jy(nu, x):
    """J_nu(x), Y_nu(x) and their x-derivatives for real order.

    Parameters
    ----------
    nu : float
        Order, ``0 <= nu <= 2000``.
    x : float
        Argument, ``0 < x <= 1e5``.

    Returns
    -------
    BesselPair
        ``(j, y, jp, yp)``.

    Raises
    ------
    DomainError
        Arguments outside the supported range.
    OverflowError
        If any of the four values is not representable as a normal double;
        use :func:`hankel2_logderiv` for ratios in that regime.
    """
    nu = float(nu)
    x = float(x)
    _check_domain(nu, x)
    jm, jpm, je, ym, ypm, ye, status = _jy_core(nu, x)
    if status:
        raise ArithmeticError(f"Bessel continued fraction failed (nu={nu}, x={x})")
    return BesselPair(
        _to_float(jm, je, "J"),
        _to_float(ym, ye, "Y"),
        _to_float(jpm, je, "J'"),
        _to_float(ypm, ye, "Y'"),
    )


def hankel2_logderiv(nu, x):
    """H2'_nu(x) / H2_nu(x) with H2 = J - iY.

    Evaluated from the scaled core so it stays finite where J and Y
    individually under- or overflow (order much larger than argument).
    """
    nu = float(nu)
    x = float(x)
    _check_domain(nu, x)
    val, status = _hankel2_logderiv_core(nu, x)
    if status:
        raise ArithmeticError(f"Bessel continued fraction failed (nu={nu}, x={x})")
    return complex(val)
