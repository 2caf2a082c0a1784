import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from pmclev import oracle
from pmclev.constants import C, HBAR
from pmclev.errors import ConfigError, ConvergenceError, DomainError
from pmclev.force import (Conductor, MatsubaraForce, NonEquilibriumForce, PMCForce, PowerLawForce,
                          ThermalState, WindowedForce, energy_zero_t_pmc, force_equilibrium_matsubara,
                          force_nonequilibrium, force_zero_t_pmc, force_zero_t_powerlaw,
                          force_zero_t_windowed, kernel_rpc_imag, powerlaw_coefficient)
from pmclev.materials import nanoparticle, weight
from pmclev.surface import WindowedPMC

PRESETS = ("sic", "au", "si")


def test_kernel_static_and_negative():
    z = 5e-7
    assert kernel_rpc_imag(0.0, z) == -3 * HBAR / (8 * math.pi * z ** 4)
    w = np.logspace(10, 17, 50)
    assert np.all(kernel_rpc_imag(w, z) < 0)
    k = kernel_rpc_imag(w, z)
    assert np.all(np.diff(k) >= -1e-15 * np.abs(k[:-1]))


def test_sic_force_crosses_weight_near_600nm(sic):
    mg = weight(sic)
    assert force_zero_t_pmc(sic, 0.55e-6) > mg > force_zero_t_pmc(sic, 0.65e-6)


def test_full_output_error_estimate(sic):
    b = force_zero_t_pmc(sic, 6e-7, full_output=True)
    assert b.total == b.f0 == force_zero_t_pmc(sic, 6e-7)
    assert 0 < b.est_error <= 1e-8 * b.total


def test_array_z(sic):
    zs = np.array([3e-7, 6e-7, 9e-7])
    np.testing.assert_array_equal(force_zero_t_pmc(sic, zs), [force_zero_t_pmc(sic, z) for z in zs])


@pytest.mark.parametrize("name", PRESETS)
def test_pmc_pec_antisymmetry(name):
    p = nanoparticle(name, 50e-9)
    for z in (2e-7, 6e-7, 1e-6):
        assert force_zero_t_pmc(p, z, Conductor.PEC) == -force_zero_t_pmc(p, z, Conductor.PMC)
        assert force_zero_t_powerlaw(p, z, -1) == -force_zero_t_powerlaw(p, z, 1)
        for t in (300.0, 700.0):
            assert force_equilibrium_matsubara(p, z, t, -1).total == -force_equilibrium_matsubara(p, z, t, 1).total
            th = ThermalState(t, 2 * t)
            assert force_nonequilibrium(p, z, th, -1).total == -force_nonequilibrium(p, z, th, 1).total


def test_sign_validation(sic):
    with pytest.raises(ConfigError):
        force_zero_t_pmc(sic, 6e-7, 2)
    with pytest.raises(DomainError):
        force_zero_t_pmc(sic, -1.0)
    with pytest.raises(ConfigError):
        ThermalState(-1.0, 300.0)


@pytest.mark.parametrize("name", PRESETS)
def test_monotonic_decreasing(name):
    p = nanoparticle(name, 50e-9)
    f = force_zero_t_pmc(p, np.linspace(1e-7, 5e-6, 200))
    assert np.all(np.diff(f) < 0)


def test_volume_scaling(sic):
    big = nanoparticle("sic", 100e-9)
    for z in (3e-7, 6e-7, 2e-6):
        assert force_zero_t_pmc(big, z) / force_zero_t_pmc(sic, z) == pytest.approx(8.0, rel=1e-12)


def test_powerlaw_values(sic, si):
    assert force_zero_t_powerlaw(sic, 6e-7) == pytest.approx(1.59e-17, rel=5e-3)
    assert force_zero_t_powerlaw(sic, 6e-7) / force_zero_t_powerlaw(sic, 1.2e-6) == pytest.approx(32.0, rel=1e-14)
    z_si = (powerlaw_coefficient(si) / weight(si)) ** 0.2
    assert z_si == pytest.approx(659e-9, rel=2e-3)
    assert 0.96 <= force_zero_t_pmc(si, 6e-7) / force_zero_t_powerlaw(si, 6e-7) <= 1.0


def test_sic_exact_over_powerlaw_ratio_physical(sic):
    # xi(i w) >= xi(i inf) for SiC, so the exact force sits above the power law
    # and the gap grows with z: a few percent below 1 um
    zs = np.logspace(-9, -6, 60)
    ratio = force_zero_t_pmc(sic, zs) / force_zero_t_powerlaw(sic, zs)
    assert np.all(ratio >= 1.0) and np.all(np.diff(ratio) > 0)
    assert ratio[-1] < 1.06
    assert 1.02 < force_zero_t_pmc(sic, 6e-7) / force_zero_t_powerlaw(sic, 6e-7) < 1.04


@pytest.mark.xfail(strict=True, reason="the exact/power-law ratio exceeds 1.01 above ~150 nm; see notes")
def test_sic_exact_over_powerlaw_ratio_band(sic):
    zs = np.logspace(-9, -6, 60)
    ratio = force_zero_t_pmc(sic, zs) / force_zero_t_powerlaw(sic, zs)
    assert np.all((ratio >= 0.94) & (ratio <= 1.01))


@pytest.mark.parametrize("name", PRESETS)
def test_closed_form_energy_is_force_antiderivative(name):
    p = nanoparticle(name, 50e-9)
    z = 4e-7
    body = integrate.quad(lambda s: force_zero_t_pmc(p, s), z, 2e-5, epsabs=0, epsrel=1e-11, limit=200,
                          points=[1e-6, 4e-6])[0]
    tail = energy_zero_t_pmc(p, 2e-5)
    assert energy_zero_t_pmc(p, z) == pytest.approx(body + tail, rel=1e-8)


# windowed -------------------------------------------------------------------


def test_windowed_empty_is_zero(sic):
    assert force_zero_t_windowed(sic, 6e-7, WindowedPMC(1e14, 1e14)) == 0.0
    assert force_zero_t_windowed(sic, 6e-7, WindowedPMC(None, None, 5e6, 5e6), method="real") == 0.0


def test_windowed_full_window_limit(sic):
    for z in (2e-7, 6e-7, 1e-6):
        win = WindowedPMC(0.0, 20 * C / (2 * z), 0.0, 20 / (2 * z))
        assert force_zero_t_windowed(sic, z, win) == pytest.approx(force_zero_t_pmc(sic, z), rel=1e-3)
    assert force_zero_t_windowed(sic, 6e-7, WindowedPMC()) == pytest.approx(force_zero_t_pmc(sic, 6e-7), rel=1e-12)


def test_windowed_real_needs_upper_bound(sic):
    with pytest.raises(ConfigError, match="force_zero_t_pmc"):
        force_zero_t_windowed(sic, 6e-7, WindowedPMC(1e13, None), method="real")


def test_windowed_real_path_runs(sic):
    f = force_zero_t_windowed(sic, 6e-7, WindowedPMC(1e13, 1e15, None, None), method="real")
    assert math.isfinite(f)


def test_windowed_full_output(sic):
    b = force_zero_t_windowed(sic, 6e-7, WindowedPMC(1e13, 1e15), full_output=True)
    assert b.total == b.f0 and b.est_error <= 1e-4 * abs(b.total)


@settings(max_examples=25, deadline=None)
@given(st.floats(1e11, 1e15), st.floats(1.5, 1e3), st.floats(0.2e-6, 1e-6))
def test_windowed_between_zero_and_full(wmin, span, z):
    sic = nanoparticle("sic", 50e-9)
    f = force_zero_t_windowed(sic, z, WindowedPMC(wmin, wmin * span))
    assert 0 < f < force_zero_t_pmc(sic, z)


def test_windowed_converges_as_window_grows(sic):
    z = 6e-7
    full = force_zero_t_pmc(sic, z)
    errs = [full - force_zero_t_windowed(sic, z, WindowedPMC(1e13 / s, 1e15 * s)) for s in (1, 10, 100, 1000)]
    assert all(b < a for a, b in zip(errs, errs[1:]))
    assert errs[-1] < 1e-3 * full


# thermal --------------------------------------------------------------------


def test_matsubara_zero_t_limit(sic):
    b = force_equilibrium_matsubara(sic, 6e-7, 1e-3, max_terms=10 ** 8)
    assert b.total == pytest.approx(force_zero_t_pmc(sic, 6e-7), rel=1e-6)


def test_matsubara_zero_temperature_routes(sic):
    assert force_equilibrium_matsubara(sic, 6e-7, 0.0).total == force_zero_t_pmc(sic, 6e-7)


def test_matsubara_cap_raises(sic):
    with pytest.raises(ConvergenceError, match="max_terms"):
        force_equilibrium_matsubara(sic, 6e-7, 1e-3)


def test_matsubara_room_temperature(sic):
    b = force_equilibrium_matsubara(sic, 6e-7, 300.0)
    assert 20 < b.truncation_terms < 100
    assert b.total == pytest.approx(b.f_st + b.f_env, rel=1e-15)
    assert abs(b.total / force_zero_t_pmc(sic, 6e-7) - 1) < 0.01


@pytest.mark.parametrize("name", ("sic", "au", "si"))
@pytest.mark.parametrize("t", (0.0, 300.0, 1500.0))
def test_nonequilibrium_reduces_to_equilibrium(name, t):
    p = nanoparticle(name, 50e-9)
    b = force_nonequilibrium(p, 6e-7, ThermalState(t, t, t))
    assert b.f_mat == 0.0
    eq = force_equilibrium_matsubara(p, 6e-7, t).total
    assert b.total == pytest.approx(eq, rel=1e-8)


@pytest.mark.parametrize("name", ("sic", "au"))
@pytest.mark.parametrize("temps", [(300.0, 700.0), (300.0, 0.0), (0.0, 300.0), (700.0, 300.0)])
def test_nonequilibrium_shift_matches_real_axis(name, temps):
    p = nanoparticle(name, 50e-9)
    t_em, t_np = temps
    z = 6e-7
    shift = force_nonequilibrium(p, z, ThermalState(t_em, t_np)).total - \
        force_nonequilibrium(p, z, ThermalState(t_em, t_em)).total
    ref = oracle.nonequilibrium_shift_real_axis(p, z, t_em, t_np)
    assert shift == pytest.approx(ref, rel=1e-6)


def test_nonequilibrium_breakdown_invariant(sic):
    for sign in (1, -1):
        b = force_nonequilibrium(sic, 6e-7, ThermalState(300.0, 700.0, 300.0), sign)
        assert b.total == pytest.approx(sign * (b.f_st + b.f_env + b.f_mat + b.f_rad), rel=1e-15)
        assert b.f_mat != 0.0


def test_nonequilibrium_constant_material_note(si):
    b = force_nonequilibrium(si, 6e-7, ThermalState(300.0, 700.0))
    assert b.f_mat == 0.0 and b.notes


def test_nonequilibrium_short_distance_robust(sic):
    b = force_nonequilibrium(sic, 6e-7, ThermalState(300.0, 700.0, 300.0))
    assert abs(b.total / force_zero_t_pmc(sic, 6e-7) - 1) < 0.05


def test_force_models(sic):
    z = 6e-7
    assert PMCForce().force(sic, z) == force_zero_t_pmc(sic, z)
    assert PMCForce(-1).force(sic, z) == -force_zero_t_pmc(sic, z)
    assert PowerLawForce().energy(sic, z) == pytest.approx(powerlaw_coefficient(sic) / (4 * z ** 4))
    assert MatsubaraForce(300.0).force(sic, z) == force_equilibrium_matsubara(sic, z, 300.0).total
    th = ThermalState(300.0, 500.0)
    assert NonEquilibriumForce(th).force(sic, z) == force_nonequilibrium(sic, z, th).total
    assert WindowedForce(WindowedPMC()).energy(sic, z) is None
    assert len({m.descriptor for m in (PMCForce(), PMCForce(-1), PowerLawForce(), MatsubaraForce(300.0))}) == 4
