import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, strategies as st

from psrsim.params import (MediumParams, alpha_m_two_color, amplitude_to_flux, derive,
                           flux_to_amplitude, mu_ge_two_color, two_color)

from oracles import envelope_flux_unit_si, units_si

PH2 = dict(eps_eg=0.52, mu_ee=0.87, mu_gg=0.80, mu_ge=0.055)


# frozen values of the unit conversion (checked against SI arithmetic below)
LENGTH_1E20_CM = 13.80
TIME_1E20_NS = 0.4603


def test_units_at_1e20_frozen():
    d = derive(MediumParams(n=1e20))
    assert d.length_unit_cm == pytest.approx(LENGTH_1E20_CM, rel=1e-3)
    assert d.time_unit_ns == pytest.approx(TIME_1E20_NS, rel=1e-3)


def test_units_match_si_arithmetic():
    for n in (1e20, 1e21, 2.6e22):
        d = derive(MediumParams(n=n))
        L, T = units_si(n)
        assert d.length_unit_cm == pytest.approx(L, rel=2e-5)
        assert d.time_unit_ns == pytest.approx(T, rel=2e-5)


def test_units_at_1e21_scale_down_tenfold():
    d20 = derive(MediumParams(n=1e20))
    d21 = derive(MediumParams(n=1e21))
    assert d21.length_unit_cm == pytest.approx(1.380, rel=1e-3)
    assert d21.time_unit_ns == pytest.approx(0.04603, rel=1e-3)
    assert d21.length_unit_cm * 10 == pytest.approx(d20.length_unit_cm, rel=1e-12)


def test_gammas():
    d = derive(MediumParams(n=1e21))
    assert d.gamma_plus == pytest.approx(15.1818, abs=1e-4)
    assert d.gamma_minus == pytest.approx(0.63636, abs=1e-5)
    assert d.gamma_plus > d.gamma_minus > 0


def test_tau_conversion():
    d = derive(MediumParams(n=1e21))
    assert d.tau2 == pytest.approx(10.0 / d.time_unit_ns)
    assert d.tau1 == pytest.approx(1e3 / d.time_unit_ns)
    assert d.tau_to_ns(d.ns_to_tau(3.7)) == pytest.approx(3.7)
    assert derive(MediumParams(n=1e21, T1=math.inf, T2=math.inf)).inv_tau1 == 0.0


def test_flux_unit_envelope_vs_si():
    for n in (1e20, 1e21):
        assert derive(MediumParams(n=n)).flux_unit == pytest.approx(envelope_flux_unit_si(n), rel=2e-5)


def test_printed_flux_convention_examples():
    d = derive(MediumParams(n=1e21, flux_convention="printed"))
    assert flux_to_amplitude(1.2e9, d) ** 2 == pytest.approx(1.0)
    assert flux_to_amplitude(1e-6, d) ** 2 == pytest.approx(8.33e-16, rel=1e-3)
    assert flux_to_amplitude(0.0, d) == 0.0


def test_flux_rejects_bad_input():
    d = derive(MediumParams(n=1e21))
    with pytest.raises(ValueError):
        flux_to_amplitude(-1.0, d)
    with pytest.raises(ValueError):
        flux_to_amplitude(float("nan"), d)


@pytest.mark.parametrize("kw", [dict(n=0), dict(n=-1), dict(n=1e21, eps_eg=0), dict(n=1e21, mu_ge=0),
                                dict(n=1e21, T1=4, T2=10), dict(n=1e21, T2=0), dict(n=float("nan"))])
def test_medium_validation(kw):
    with pytest.raises(ValueError):
        MediumParams(**kw)


def test_relaxation_free_medium_allowed():
    MediumParams(n=1e21, T1=math.inf, T2=math.inf)


def test_two_color_examples():
    c = two_color(0.26, MediumParams(n=1e21))
    assert (c.a1, c.a2, c.a12, c.a21) == pytest.approx((1, 1, 1, 1))
    c = two_color(0.13, MediumParams(n=1e21))
    assert c.a1 == pytest.approx(0.5)
    assert c.a2 == pytest.approx(1.5)
    assert c.a12 == pytest.approx(4.5)


@given(st.floats(1e18, 1e23))
def test_doubling_density(n):
    d1, d2 = derive(MediumParams(n=n)), derive(MediumParams(n=2 * n))
    assert d2.length_unit_cm == pytest.approx(0.5 * d1.length_unit_cm, rel=1e-12)
    assert d2.time_unit_ns == pytest.approx(0.5 * d1.time_unit_ns, rel=1e-12)
    assert d2.flux_unit == pytest.approx(2 * d1.flux_unit, rel=1e-12)


@given(st.floats(0.01, 0.51))
def test_two_color_alpha_symmetry(w):
    m = MediumParams(n=1e21)
    assert alpha_m_two_color(w, m) == pytest.approx(alpha_m_two_color(0.52 - w, m), rel=1e-12)
    assert mu_ge_two_color(w, m) == m.mu_ge


@given(st.floats(0.0, 1e12))
def test_flux_amplitude_roundtrip(p):
    d = derive(MediumParams(n=1e21))
    assert amplitude_to_flux(flux_to_amplitude(p, d), d) == pytest.approx(p, rel=1e-12, abs=1e-300)
