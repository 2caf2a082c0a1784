import io
import math

import numpy as np
import pytest

from pmclev.constants import G
from pmclev.errors import DomainError, NoLevitationError
from pmclev.force import Conductor, ForceModel, PMCForce, PowerLawForce, force_zero_t_pmc
from pmclev.levitation import (Trajectory, find_equilibrium, harmonic_frequency,
                               potential, simulate_trajectory)
from pmclev.materials import nanoparticle, weight


class QuadratureOnly(ForceModel):
    """PMC force without its closed-form energy, to exercise the quadrature path."""

    descriptor = "zero_t_pmc_quadrature"

    def force(self, particle, z):
        return force_zero_t_pmc(particle, z)


@pytest.fixture(scope="module")
def sic_eq(sic):
    return find_equilibrium(sic, PMCForce())


@pytest.mark.parametrize("name, z_ref", [("sic", 600e-9), ("au", 440e-9), ("si", 660e-9)])
def test_equilibrium_heights(name, z_ref):
    p = nanoparticle(name, 50e-9)
    sol = find_equilibrium(p, PMCForce())
    assert sol.z0 == pytest.approx(z_ref, rel=0.05)
    assert abs(force_zero_t_pmc(p, sol.z0) - weight(p)) < 1e-6 * weight(p)


def test_pec_does_not_levitate(sic):
    with pytest.raises(NoLevitationError):
        find_equilibrium(sic, PMCForce(Conductor.PEC))


def test_bracket_without_sign_change(sic):
    with pytest.raises(NoLevitationError):
        find_equilibrium(sic, PMCForce(), bracket=(1e-6, 5e-6))


def test_trap_frequency(sic, sic_eq):
    assert sic_eq.omega_trap == pytest.approx(9013.0, rel=0.02)
    assert sic_eq.omega_trap == pytest.approx(math.sqrt(5 * G / sic_eq.z0), rel=0.005)
    assert sic_eq.nu == pytest.approx(1.4e3, rel=0.05)
    assert sic_eq.period == pytest.approx(0.7e-3, rel=0.03)


def test_powerlaw_trap_frequency(sic):
    sol = find_equilibrium(sic, PowerLawForce())
    assert sol.omega_trap ** 2 == pytest.approx(5 * G / sol.z0, rel=1e-6)


@pytest.mark.parametrize("radius", [25e-9, 100e-9])
def test_volume_independence(sic_eq, radius):
    sol = find_equilibrium(nanoparticle("sic", radius), PMCForce())
    assert sol.z0 == pytest.approx(sic_eq.z0, rel=1e-10)
    assert sol.omega_trap == pytest.approx(sic_eq.omega_trap, rel=1e-10)


def test_solution_json_keys(sic_eq):
    d = sic_eq.to_dict()
    assert list(d) == ["z0_m", "u0_J", "omega_rad_s", "nu_Hz", "period_s"]
    assert d["period_s"] == pytest.approx(2 * math.pi / d["omega_rad_s"])


def test_potential_quadrature_matches_closed_form(sic):
    for z in (3e-7, 6e-7, 2e-6, 1.5e-5):
        assert potential(sic, QuadratureOnly(), z) == pytest.approx(potential(sic, PMCForce(), z), rel=1e-8)


def test_potential_derivative_is_net_force(sic):
    z, h = 5e-7, 1e-10
    du = (potential(sic, PMCForce(), z + h) - potential(sic, PMCForce(), z - h)) / (2 * h)
    assert -du == pytest.approx(force_zero_t_pmc(sic, z) - weight(sic), rel=1e-5)


def test_potential_single_well(sic, sic_eq):
    zs = np.linspace(0.2e-6, 3e-6, 300)
    u = np.array([potential(sic, PMCForce(), z) for z in zs])
    d = np.diff(u)
    assert np.count_nonzero(np.diff(np.sign(d))) == 1
    assert abs(zs[np.argmin(u)] - sic_eq.z0) < zs[1] - zs[0]
    assert sic_eq.u0 == pytest.approx(potential(sic, PMCForce(), sic_eq.z0))


def test_potential_domain(sic):
    with pytest.raises(DomainError):
        potential(sic, PMCForce(), 0.0)


def test_harmonic_frequency_unstable(sic):
    with pytest.raises(DomainError):
        harmonic_frequency(sic, PMCForce(Conductor.PEC), 6e-7)


def _turning_energies(sic, tr):
    return [potential(sic, PMCForce(), zt) for zt in tr.turning_points]


def test_harmonic_trajectory(sic, sic_eq):
    tr = simulate_trajectory(sic, PMCForce(), 0.57e-6, 0.0, 5e-3, solution=sic_eq)
    assert tr.status == "ok"
    assert tr.period_estimate == pytest.approx(0.70e-3, rel=0.03)
    n_periods = tr.times[-1] / tr.period_estimate
    assert n_periods >= 5
    assert tr.energy_drift() < 1e-6
    e0 = tr.energies[0]
    for u in _turning_energies(sic, tr):
        assert abs(u - e0) < 1e-8 * abs(e0)
    lo, hi = min(tr.turning_points), max(tr.turning_points)
    assert tr.positions.min() >= lo * (1 - 1e-9) and tr.positions.max() <= hi * (1 + 1e-9)


@pytest.mark.slow
def test_anharmonic_trajectory(sic, sic_eq):
    tr = simulate_trajectory(sic, PMCForce(), 0.42e-6, 0.0, 4.5e-3, solution=sic_eq, dt=2e-8)
    assert tr.status == "ok"
    assert tr.times[-1] / tr.period_estimate >= 5
    assert tr.period_estimate > 1.1 * sic_eq.period
    assert tr.energy_drift() < 1e-6
    e0 = tr.energies[0]
    for u in _turning_energies(sic, tr):
        assert abs(u - e0) < 1e-8 * abs(e0)
    assert tr.positions.min() >= 0.42e-6 * (1 - 1e-9)


def test_stationary_at_equilibrium(sic, sic_eq):
    tr = simulate_trajectory(sic, PMCForce(), sic_eq.z0, 0.0, 1e-3, solution=sic_eq)
    assert np.max(np.abs(tr.positions - sic_eq.z0)) < 1e-12 * sic_eq.z0


def test_harmonic_limit_period(sic, sic_eq):
    tr = simulate_trajectory(sic, PMCForce(), sic_eq.z0 * (1 + 1e-3), 0.0, 3e-3, solution=sic_eq)
    assert tr.period_estimate == pytest.approx(sic_eq.period, rel=1e-4)


def test_step_size_guard(sic, sic_eq):
    with pytest.raises(DomainError, match="50"):
        simulate_trajectory(sic, PMCForce(), 0.57e-6, 0.0, 1e-3, dt=2e-5, solution=sic_eq)
    with pytest.raises(DomainError):
        simulate_trajectory(sic, PMCForce(), 20e-6, 0.0, 1e-3, solution=sic_eq)


def test_escape_truncates(sic, sic_eq):
    tr = simulate_trajectory(sic, PMCForce(), 0.6e-6, 0.05, 2e-3, solution=sic_eq)
    assert tr.status == "escaped"
    assert tr.times[-1] < 2e-3 and tr.period_estimate is None


def test_short_run_has_no_period(sic, sic_eq):
    tr = simulate_trajectory(sic, PMCForce(), 0.57e-6, 0.0, 1e-3, solution=sic_eq)
    assert tr.period_estimate is None


def test_trajectory_csv(sic, sic_eq):
    tr = simulate_trajectory(sic, PMCForce(), 0.57e-6, 0.0, 1e-5, solution=sic_eq)
    buf = io.StringIO()
    tr.write_csv(buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == Trajectory.CSV_HEADER == "t_s,z_m,v_m_s,E_J"
    assert len(lines) == 1 + tr.times.size
    assert float(lines[1].split(",")[1]) == 0.57e-6
