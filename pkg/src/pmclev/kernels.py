"""Hot numeric kernels with a numba and a pure-numpy implementation.

Every public function here dispatches on :data:`pmclev._backend.USE_NUMBA`.
The ``*_nb`` variants are scalar loops compiled with numba; the ``*_np``
variants are vectorized numpy code implementing the same algorithm (same
node sets, subdivision order and truncation rules), so the two agree to
rounding.

Material parameters travel as ``(kind, p)`` with ``p`` a length-4 float array:

* Lorentz ``(eps_inf, omega_L, omega_T, gamma)``
* Drude ``(eps_inf, omega_P, gamma, 0)``
* Constant ``(eps, 0, 0, 0)``
"""
import math

import numpy as np

from ._backend import USE_NUMBA, njit
from .constants import C

KIND_CONSTANT = 0
KIND_LORENTZ = 1
KIND_DRUDE = 2

# Gauss-Kronrod 7/15 nodes and weights on [-1, 1] (QUADPACK qk15)
XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0,
])
WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])

# full 15-point rule laid out left to right, with the embedded Gauss weights
_X15 = np.concatenate((-XGK[:-1], XGK[::-1]))
_WK15 = np.concatenate((WGK[:-1], WGK[::-1]))
_WG15 = np.zeros(15)
_WG15[1] = _WG15[13] = WG[0]
_WG15[3] = _WG15[11] = WG[1]
_WG15[5] = _WG15[9] = WG[2]
_WG15[7] = WG[3]

SEED_BREAKS = np.array([1.0, 5.0, 10.0, 20.0])
W_STEP = 20.0


# ---------------------------------------------------------------------------
# Clausius-Mossotti factor on the imaginary axis


@njit
def xi_imag(kind, p, omega, sgn):
    """xi(i*omega) for sgn=+1, xi(-i*omega) (conjugated response) for sgn=-1."""
    if kind == KIND_CONSTANT:
        return 3.0 * (p[0] - 1.0) / (p[0] + 2.0)
    if kind == KIND_LORENTZ:
        t = omega * omega + sgn * p[3] * omega
        n = p[0] * (p[1] * p[1] + t)
        d = p[2] * p[2] + t
        return 3.0 * (n - d) / (n + 2.0 * d)
    d = omega * omega + sgn * p[2] * omega
    n = p[0] * d + p[1] * p[1]
    return 3.0 * (n - d) / (n + 2.0 * d)


def _xi_imag_np(kind, p, omega, sgn):
    omega = np.asarray(omega, dtype=float)
    if kind == KIND_CONSTANT:
        return np.full(omega.shape, 3.0 * (p[0] - 1.0) / (p[0] + 2.0))
    if kind == KIND_LORENTZ:
        t = omega * omega + sgn * p[3] * omega
        n = p[0] * (p[1] * p[1] + t)
        d = p[2] * p[2] + t
    else:
        d = omega * omega + sgn * p[2] * omega
        n = p[0] * d + p[1] * p[1]
    return 3.0 * (n - d) / (n + 2.0 * d)


@njit
def _xi_imag_array_nb(kind, p, omega, sgn):
    out = np.empty(omega.shape[0])
    for i in range(omega.shape[0]):
        out[i] = xi_imag(kind, p, omega[i], sgn)
    return out


def xi_imag_array(kind, p, omega, sgn):
    omega = np.ascontiguousarray(omega, dtype=float)
    if USE_NUMBA:
        return _xi_imag_array_nb(kind, p, omega, float(sgn))
    return _xi_imag_np(kind, p, omega, float(sgn))


# ---------------------------------------------------------------------------
# Zero-temperature frequency integral in w = 2*omega*z/c
#
# order=3: integrand xi(i c w / 2z) * K(w) with the K-windowed kernel
#          K(w) = [G(u1) - G(u2)] / 6, u = sqrt(a^2 + w^2), a = 2 k z,
#          G(u) = exp(-u) (u^3 + 3u^2 + 6u + 6); full window gives P3(w) e^-w
# order=2: integrand xi * P2(w) e^-w (closed-form potential)


@njit
def _g6(u):
    return math.exp(-u) * (((u / 6.0 + 0.5) * u + 1.0) * u + 1.0)


@njit
def _casimir_integrand(kind, p, z, a1, a2, order, sgn, w):
    om = C * w / (2.0 * z)
    x = xi_imag(kind, p, om, sgn)
    if order == 2:
        return x * math.exp(-w) * ((0.5 * w + 1.0) * w + 1.0)
    k = _g6(math.sqrt(a1 * a1 + w * w))
    if a2 < math.inf:
        k -= _g6(math.sqrt(a2 * a2 + w * w))
    return x * k


def _casimir_integrand_np(kind, p, z, a1, a2, order, sgn, w):
    om = C * w / (2.0 * z)
    x = _xi_imag_np(kind, p, om, sgn)
    if order == 2:
        return x * np.exp(-w) * ((0.5 * w + 1.0) * w + 1.0)

    def g6(u):
        return np.exp(-u) * (((u / 6.0 + 0.5) * u + 1.0) * u + 1.0)

    k = g6(np.sqrt(a1 * a1 + w * w))
    if a2 < math.inf:
        k = k - g6(np.sqrt(a2 * a2 + w * w))
    return x * k


@njit
def _panel_nb(kind, p, z, a1, a2, order, sgn, a, b):
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    rk = 0.0
    rg = 0.0
    for i in range(15):
        f = _casimir_integrand(kind, p, z, a1, a2, order, sgn, c + h * _X15[i])
        rk += _WK15[i] * f
        rg += _WG15[i] * f
    return rk * h, abs(rk - rg) * h


def _panel_np(kind, p, z, a1, a2, order, sgn, a, b):
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    f = _casimir_integrand_np(kind, p, z, a1, a2, order, sgn, c + h * _X15)
    # explicit left-to-right accumulation to mirror the compiled loop
    rk = 0.0
    rg = 0.0
    for i in range(15):
        rk += _WK15[i] * f[i]
        rg += _WG15[i] * f[i]
    return rk * h, abs(rk - rg) * h


@njit
def _adaptive_nb(kind, p, z, a1, a2, order, sgn, breaks, epsabs, epsrel, limit):
    """Global adaptive G7-K15 over consecutive ``breaks``.

    Returns ``(value, abserr, status)``; status 1 means the interval limit
    was reached before the tolerance.
    """
    lo = np.empty(limit)
    hi = np.empty(limit)
    res = np.empty(limit)
    err = np.empty(limit)
    n = 0
    for i in range(breaks.shape[0] - 1):
        lo[n] = breaks[i]
        hi[n] = breaks[i + 1]
        res[n], err[n] = _panel_nb(kind, p, z, a1, a2, order, sgn, lo[n], hi[n])
        n += 1
    while True:
        total = 0.0
        etot = 0.0
        worst = 0
        for i in range(n):
            total += res[i]
            etot += err[i]
            if err[i] > err[worst]:
                worst = i
        if etot <= max(epsabs, epsrel * abs(total)):
            return total, etot, 0
        if n >= limit:
            return total, etot, 1
        a = lo[worst]
        b = hi[worst]
        m = 0.5 * (a + b)
        hi[worst] = m
        res[worst], err[worst] = _panel_nb(kind, p, z, a1, a2, order, sgn, a, m)
        lo[n] = m
        hi[n] = b
        res[n], err[n] = _panel_nb(kind, p, z, a1, a2, order, sgn, m, b)
        n += 1


def _adaptive_np(kind, p, z, a1, a2, order, sgn, breaks, epsabs, epsrel, limit):
    lo = list(breaks[:-1])
    hi = list(breaks[1:])
    res = []
    err = []
    for a, b in zip(lo, hi):
        r, e = _panel_np(kind, p, z, a1, a2, order, sgn, a, b)
        res.append(r)
        err.append(e)
    while True:
        total = 0.0
        etot = 0.0
        worst = 0
        for i in range(len(res)):
            total += res[i]
            etot += err[i]
            if err[i] > err[worst]:
                worst = i
        if etot <= max(epsabs, epsrel * abs(total)):
            return total, etot, 0
        if len(res) >= limit:
            return total, etot, 1
        a = lo[worst]
        b = hi[worst]
        m = 0.5 * (a + b)
        hi[worst] = m
        res[worst], err[worst] = _panel_np(kind, p, z, a1, a2, order, sgn, a, m)
        lo.append(m)
        hi.append(b)
        r, e = _panel_np(kind, p, z, a1, a2, order, sgn, m, b)
        res.append(r)
        err.append(e)


def tail_bound(kind, p, z, order, w, sgn=1.0):
    """Upper bound on the integral over ``[w, inf)``.

    Uses ``|xi|`` non-increasing along the imaginary axis beyond ``w`` and
    ``int_w^inf t^n/n! e^-t dt = e^-w sum_{m<=n} w^m/m!``.
    """
    x = abs(float(xi_imag(kind, p, C * w / (2.0 * z), sgn)))
    s = 0.0
    for n in range(order + 1):
        term = 1.0
        for m in range(n + 1):
            if m:
                term *= w / m
            s += term
    return x * math.exp(-w) * s


def casimir_integral(kind, p, z, order=3, kmin=0.0, kmax=math.inf, omin=0.0, omax=math.inf,
                     epsrel=1e-10, tail_rtol=1e-10, limit=2000, sgn=1.0):
    """Dimensionless frequency integral behind the zero-temperature force.

    ``int xi(i c w / 2z) K(w) dw`` over the (imaginary) frequency window
    ``[omin, omax]`` with the transverse-momentum window ``[kmin, kmax]``
    folded into ``K`` in closed form. The upper limit starts at ``w = 20``
    and is pushed out in steps of 20 until the analytic tail bound drops
    below ``tail_rtol`` of the running value. ``sgn=-1`` integrates the
    conjugated response ``xi(-i omega)`` instead.

    Returns
    -------
    value, abserr, status : float, float, int
        ``status`` is nonzero if the adaptive rule hit ``limit``.
    """
    a1 = 2.0 * kmin * z
    a2 = 2.0 * kmax * z
    wlo = 2.0 * omin * z / C
    whi = 2.0 * omax * z / C
    if not (wlo < whi and a1 < a2):
        return 0.0, 0.0, 0
    if order == 2 and (a1 != 0.0 or a2 != math.inf):
        raise ValueError("order=2 kernel is only defined for the full K window")
    adaptive = _adaptive_nb if USE_NUMBA else _adaptive_np
    value = 0.0
    abserr = 0.0
    start = wlo
    stop = min(whi, max(wlo, 0.0) + W_STEP)
    while True:
        inner = SEED_BREAKS[(SEED_BREAKS > start) & (SEED_BREAKS < stop)]
        breaks = np.concatenate(([start], inner, [stop]))
        v, e, status = adaptive(kind, p, z, a1, a2, order, float(sgn), breaks, 0.0, epsrel, limit)
        if status:
            return float(value + v), float(abserr + e), int(status)
        value += v
        abserr += e
        if stop >= whi:
            return float(value), float(abserr), 0
        tail = tail_bound(kind, p, z, order, stop, sgn)
        if tail <= tail_rtol * abs(value):
            return float(value), float(abserr + tail), 0
        start = stop
        stop = min(whi, stop + W_STEP)


# ---------------------------------------------------------------------------
# Matsubara sums  sum_{n>=1} xi(+-i w_n) P3(w_n) e^{-w_n},  w_n = n w1


@njit
def _matsubara_nb(kind, p, z, w1, rtol, max_terms):
    sp = 0.0
    sm = 0.0
    small = 0
    n = 0
    while n < max_terms:
        n += 1
        w = n * w1
        om = C * w / (2.0 * z)
        pe = math.exp(-w) * (((w / 6.0 + 0.5) * w + 1.0) * w + 1.0)
        tp = xi_imag(kind, p, om, 1.0) * pe
        tm = xi_imag(kind, p, om, -1.0) * pe
        sp += tp
        sm += tm
        if max(abs(tp), abs(tm)) <= rtol * max(abs(sp), abs(sm)):
            small += 1
            if small >= 3:
                return sp, sm, n, 0
        else:
            small = 0
    return sp, sm, n, 1


def _matsubara_np(kind, p, z, w1, rtol, max_terms):
    sp = 0.0
    sm = 0.0
    small = 0
    n0 = 0
    chunk = 256
    while n0 < max_terms:
        m = min(chunk, max_terms - n0)
        idx = np.arange(m)
        w = (idx + n0 + 1) * w1
        om = C * w / (2.0 * z)
        pe = np.exp(-w) * (((w / 6.0 + 0.5) * w + 1.0) * w + 1.0)
        tp = _xi_imag_np(kind, p, om, 1.0) * pe
        tm = _xi_imag_np(kind, p, om, -1.0) * pe
        # cumsum is sequential, so partial sums match the scalar loop
        csp = np.cumsum(np.concatenate(([sp], tp)))[1:]
        csm = np.cumsum(np.concatenate(([sm], tm)))[1:]
        ok = np.maximum(np.abs(tp), np.abs(tm)) <= rtol * np.maximum(np.abs(csp), np.abs(csm))
        last_bad = np.maximum.accumulate(np.where(ok, -1 - small, idx))
        run = idx - last_bad
        hit = np.nonzero(run >= 3)[0]
        if hit.size:
            i = hit[0]
            return csp[i], csm[i], n0 + i + 1, 0
        small = int(run[-1])
        sp = csp[-1]
        sm = csm[-1]
        n0 += m
        chunk = min(2 * chunk, 1 << 20)
    return sp, sm, n0, 1


def matsubara_sums(kind, p, z, w1, rtol=1e-12, max_terms=100000):
    """Return ``(S_plus, S_minus, n_terms, status)``.

    ``S_plus`` uses ``xi(i w_n)``, ``S_minus`` the conjugated response
    ``xi(-i w_n)``. Summation stops once a term is below ``rtol`` of the
    partial sum for three consecutive ``n``; status 1 flags the cap.
    """
    fn = _matsubara_nb if USE_NUMBA else _matsubara_np
    sp, sm, n, status = fn(kind, p, z, w1, rtol, max_terms)
    return float(sp), float(sm), int(n), int(status)


# ---------------------------------------------------------------------------
# s-polarized transfer matrix (reflection recursion) for layered media


@njit
def _kz_nb(eps, k0, kpar):
    a = eps * k0 * k0 - kpar * kpar
    if a >= 0.0:
        return complex(math.sqrt(a), 0.0)
    return complex(0.0, -math.sqrt(-a))


@njit
def _tmm_rs_nb(eps, d, eps_term, k0, kpar):
    kn = _kz_nb(eps_term, k0, kpar)
    gam = 0.0 + 0.0j
    ph = 1.0 + 0.0j
    for j in range(eps.shape[0] - 1, -1, -1):
        kj = _kz_nb(eps[j], k0, kpar)
        r = (kj - kn) / (kj + kn)
        t = gam * ph
        gam = (r + t) / (1.0 + r * t)
        ph = np.exp(-2j * kj * d[j])
        kn = kj
    a = k0 * k0 - kpar * kpar
    if a >= 0.0:
        kv = complex(math.sqrt(a), 0.0)
    else:
        kv = complex(0.0, math.sqrt(-a))
    r = (kv - kn) / (kv + kn)
    t = gam * ph
    return (r + t) / (1.0 + r * t)


@njit
def _tmm_grid_nb(eps, d, eps_term, k0, kpar):
    out = np.empty(k0.shape[0], dtype=np.complex128)
    for i in range(k0.shape[0]):
        out[i] = _tmm_rs_nb(eps, d, eps_term, k0[i], kpar[i])
    return out


def _kz_np(eps, k0, kpar):
    a = eps * k0 * k0 - kpar * kpar
    return np.where(a >= 0.0, np.sqrt(np.abs(a)) + 0j, -1j * np.sqrt(np.abs(a)))


def _tmm_grid_np(eps, d, eps_term, k0, kpar):
    kn = _kz_np(eps_term, k0, kpar)
    gam = np.zeros(k0.shape, dtype=complex)
    ph = np.ones(k0.shape, dtype=complex)
    for j in range(eps.shape[0] - 1, -1, -1):
        kj = _kz_np(eps[j], k0, kpar)
        r = (kj - kn) / (kj + kn)
        t = gam * ph
        gam = (r + t) / (1.0 + r * t)
        ph = np.exp(-2j * kj * d[j])
        kn = kj
    a = k0 * k0 - kpar * kpar
    kv = np.where(a >= 0.0, np.sqrt(np.abs(a)) + 0j, 1j * np.sqrt(np.abs(a)))
    r = (kv - kn) / (kv + kn)
    t = gam * ph
    return (r + t) / (1.0 + r * t)


def tmm_rs_grid(eps, d, eps_term, k0, kpar):
    """Reflection amplitude of a layer stack for many ``(k0, kpar)`` pairs.

    Layers are listed from the vacuum side down; ``eps_term`` fills the
    half-space below. Convention ``exp(+i omega t)``: inside the stack
    ``kz`` takes the branch with ``Im kz <= 0``, so the round-trip phase
    factor never exceeds one in modulus and no rescaling is needed. The
    vacuum wavevector uses ``+i sqrt(kpar^2 - k0^2)`` for evanescent
    incidence, the same branch as the analytic reflection formula.
    """
    eps = np.ascontiguousarray(eps, dtype=float)
    d = np.ascontiguousarray(d, dtype=float)
    k0 = np.ascontiguousarray(k0, dtype=float)
    kpar = np.ascontiguousarray(kpar, dtype=float)
    if USE_NUMBA:
        return _tmm_grid_nb(eps, d, float(eps_term), k0, kpar)
    return _tmm_grid_np(eps, d, float(eps_term), k0, kpar)
