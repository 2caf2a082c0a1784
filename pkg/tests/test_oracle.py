import math

import numpy as np
import pytest

from pmclev import oracle
from pmclev.constants import C, HBAR
from pmclev.errors import DomainError
from pmclev.force import kernel_rpc, kernel_rpc_imag
from pmclev.surface import PRESET_GRADIENT, reflection


def test_uniform_vacuum_profile_is_transparent():
    prof = oracle.LayeredProfile(np.array([0.0, 1e-7, 3e-7]), np.array([1.0, 1.0]), 1.0)
    assert abs(oracle.transfer_matrix_rs(prof, 1e15, 1e6)) < 1e-15


@pytest.mark.parametrize("frac", [0.0, 0.5, 1.5])
def test_single_interface_fresnel(frac):
    w = 1e15
    k0 = w / C
    k = frac * k0
    eps = 4.0
    prof = oracle.LayeredProfile(np.array([0.0, 2e-7]), np.array([eps]), eps)
    kz0 = complex(math.sqrt(k0 * k0 - k * k)) if frac < 1 else 1j * math.sqrt(k * k - k0 * k0)
    kz1 = math.sqrt(eps * k0 * k0 - k * k)
    ref = (kz0 - kz1) / (kz0 + kz1)
    assert oracle.transfer_matrix_rs(prof, w, k) == pytest.approx(ref, abs=1e-12)


def test_lossless_stack_energy_bound():
    prof = oracle.discretize_profile(100.0, 1e-6, 120e-9, n_layers=2000)
    w = np.linspace(1e13, 5e15, 30)
    f = np.linspace(0.0, 0.99, 30)
    W, F = np.meshgrid(w, f)
    r = oracle.transfer_matrix_rs_grid(prof, W, F * W / C)
    assert np.all(np.abs(r) <= 1 + 1e-12)


def test_discretize_requires_deep_enough_stack():
    zmin = oracle.minimal_z_max(100.0, 1e-6, 120e-9)
    with pytest.raises(DomainError, match=f"{zmin!r}"):
        oracle.discretize_profile(100.0, 1e-6, 120e-9, z_max=1e-6)
    prof = oracle.discretize_profile(100.0, 1e-6, 120e-9, n_layers=10)
    assert prof.layer_boundaries[-1] == pytest.approx(zmin)
    assert abs(prof.terminal_eps - 100.0) <= 1e-4 * 100.0 * 1.0001


def test_layered_profile_validation():
    with pytest.raises(DomainError):
        oracle.LayeredProfile(np.array([0.0, 1.0]), np.array([1.0, 2.0]), 1.0)
    with pytest.raises(DomainError):
        oracle.LayeredProfile(np.array([0.1, 1.0]), np.array([1.0]), 1.0)


def test_tmm_converges_and_matches_analytic():
    w = np.linspace(2e13, 5e15, 20)
    f = np.linspace(0.0, 0.98, 20)
    W, F = np.meshgrid(w, f, indexing="ij")
    K = F * W / C
    g = PRESET_GRADIENT
    r1 = oracle.transfer_matrix_rs_grid(oracle.discretize_profile(g.eps1, g.b, g.L, n_layers=10000), W, K)
    r2 = oracle.transfer_matrix_rs_grid(oracle.discretize_profile(g.eps1, g.b, g.L, n_layers=20000), W, K)
    assert np.max(np.abs(r1 - r2)) < 1e-4
    ana = np.array([[reflection(g, a, b).r_s for a, b in zip(ra, rb)] for ra, rb in zip(W, K)])
    assert np.max(np.abs(ana - r1)) < 1e-3


def test_kernel_quadrature_static_value():
    z = 3e-7
    assert oracle.kernel_quadrature(0.0, z) == pytest.approx(-3 * HBAR / (8 * math.pi * z ** 4), rel=1e-10)


def test_kernel_closed_form_unit_argument():
    z = 4e-7
    w = C / (2 * z)
    ref = -3 * HBAR / (8 * math.pi * z ** 4) * (8.0 / 3.0) * math.exp(-1.0)
    assert kernel_rpc_imag(w, z) == pytest.approx(ref, rel=1e-14)
    assert oracle.kernel_quadrature(w, z) == pytest.approx(ref, rel=1e-9)


def test_kernel_quadrature_grid():
    worst = 0.0
    for w in np.logspace(11, 16, 10):
        for z in np.logspace(-7.5, -5.5, 10):
            worst = max(worst, abs(kernel_rpc_imag(w, z) / oracle.kernel_quadrature(w, z) - 1))
    assert worst < 1e-6


def test_kernel_continuation_reduces_on_imaginary_axis():
    z = 5e-7
    for w in (1e12, 1e14, 3e15):
        assert kernel_rpc(1j * w, z).real == pytest.approx(kernel_rpc_imag(w, z), rel=1e-13)


def test_kernel_continuation_matches_quadrature():
    rng = np.random.default_rng(7)
    for _ in range(20):
        re = 10 ** rng.uniform(13, 15.5)
        nu = complex(re, re * 10 ** rng.uniform(-4, -2))
        z = 10 ** rng.uniform(-7, -6)
        ref = oracle.kernel_quadrature_complex(nu, z)
        assert abs(kernel_rpc(nu, z) - ref) < 1e-6 * abs(ref)


def test_contour_residue_simple_pole():
    res = oracle.contour_residue(lambda w: 2.5 / (w - (1 + 1j)), 1 + 1j, 0.1)
    assert res == pytest.approx(2.5, rel=1e-13)
