import math

import numpy as np
import pytest
from scipy import integrate

from pmclev import oracle
from pmclev.errors import ConfigError, DomainError
from pmclev.materials import (AU, SI, SIC, Constant, Drude, Lorentz, NanoparticleSpec, nanoparticle,
                              permittivity, polarizability_poles, preset, static_xi, weight, xi,
                              xi_imag)


def test_sic_static_permittivity():
    assert permittivity(SIC, 0.0).real == pytest.approx(6.7 * 18.253e13 ** 2 / 14.937e13 ** 2, rel=1e-14)
    assert permittivity(SIC, 0.0).real == pytest.approx(10.01, abs=0.01)


def test_constant_permittivity_and_xi():
    assert permittivity(SI, 3e14) == 12.25
    assert xi(SI, 1e15).real == pytest.approx(3 * 11.25 / 14.25, rel=1e-15)
    assert static_xi(SI) == pytest.approx(2.3684, abs=1e-4)


def test_drude_imaginary_axis():
    w = 1e14
    ref = 5.0 + 2.15e15 ** 2 / (w * w + 5.88e13 * w)
    val = permittivity(AU, 1j * w)
    assert val.real == pytest.approx(ref, rel=1e-13)
    assert abs(val.imag) <= 1e-13 * abs(val.real)


def test_drude_static_limit():
    assert xi_imag(AU, 1e-3) == pytest.approx(3.0, rel=1e-12)
    assert static_xi(AU) == pytest.approx(3.0, rel=1e-15)
    with pytest.raises(DomainError):
        permittivity(AU, 0.0)


def test_vacuum_limit():
    assert xi(Constant(1.0), 1e14) == 0.0


@pytest.mark.parametrize("model", [SIC, AU, SI])
def test_xi_imag_real_positive_nonincreasing(model):
    om = np.logspace(10, 17, 400)
    vals = np.array([xi_imag(model, w) for w in om])
    cvals = np.array([xi(model, 1j * w) for w in om])
    assert np.all(np.abs(cvals.imag) <= 1e-13 * np.abs(cvals.real))
    assert np.all(vals > 0) and np.all(vals <= 3.0)
    assert np.all(np.diff(vals) <= 1e-15 * vals[:-1])


@pytest.mark.parametrize("model", [SIC, AU])
def test_passivity_on_real_axis(model):
    om = np.logspace(11, 17, 300)
    assert all(permittivity(model, w).imag >= 0 for w in om)


def test_kramers_kronig_sic():
    # eps(i w) - eps_inf = (2/pi) int w' Im eps(w') / (w'^2 + w^2) dw'
    w = SIC.omega_T

    def f(wp):
        return wp * permittivity(SIC, wp).imag / (wp * wp + w * w)

    pts = [SIC.omega_T + k * SIC.gamma for k in (-50, -5, 0, 5, 50)]
    edges = [0.0] + pts + [100 * SIC.omega_L]
    total = sum(integrate.quad(f, a, b, limit=400)[0] for a, b in zip(edges[:-1], edges[1:]))
    kk = 2.0 / math.pi * total + SIC.eps_inf
    assert kk == pytest.approx(permittivity(SIC, 1j * w).real, rel=1e-2)


def test_sic_poles():
    poles = polarizability_poles(SIC)
    assert len(poles) == 2
    wt2 = (6.7 * 18.253e13 ** 2 + 2 * 14.937e13 ** 2) / 8.7
    re = math.sqrt(wt2 - SIC.gamma ** 2 / 4)
    for pr in poles:
        assert pr.pole.imag < 0
        assert abs(pr.pole.real) == pytest.approx(re, rel=1e-12)
        assert abs(pr.pole.real) == pytest.approx(1.7546e14, rel=1e-4)
        assert pr.pole.imag == pytest.approx(-4.483e11, rel=1e-3)


@pytest.mark.parametrize("model", [SIC, AU])
def test_poles_solve_and_residues_match_contour(model):
    eps0 = abs(model.eps_inf + 2.0)
    for pr in polarizability_poles(model):
        assert abs(permittivity(model, pr.pole) + 2.0) < 1e-9 * eps0
        ref = oracle.contour_residue(lambda w: xi(model, w), pr.pole, 0.1 * abs(pr.pole.imag))
        assert abs(pr.residue - ref) < 1e-6 * abs(ref)


def test_constant_has_no_poles():
    assert polarizability_poles(SI) == []


def test_weights():
    assert weight(nanoparticle("sic", 50e-9)) == pytest.approx(1.649e-17, rel=1e-3)
    assert weight(nanoparticle("au", 50e-9)) == pytest.approx(9.91e-17, rel=1e-3)
    assert weight(NanoparticleSpec(1e-30, 3210.0, SIC)) < 1e-80


def test_validation_errors():
    with pytest.raises(ConfigError):
        Lorentz(6.7, 1e14, 2e14, 1e11)
    with pytest.raises(ConfigError):
        Drude(0.5, 1e15, 1e13)
    with pytest.raises(ConfigError):
        Constant(0.5)
    with pytest.raises(ConfigError):
        NanoparticleSpec(-1.0, 3210.0, SIC)
    with pytest.raises(ConfigError):
        preset("unobtainium")


def test_point_dipole_warning():
    p = nanoparticle("sic", 50e-9)
    with pytest.warns(UserWarning):
        p.check_point_dipole(1e-7)
