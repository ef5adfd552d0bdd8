import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from psrsim.params import MediumParams, derive
from psrsim.pulse import (PulseShape, area_equation_solve, compression_factor, count_pulses, cw_beta,
                          cw_compression, pulse_area, pulse_area_physical, split_count)
from psrsim.solver import InstabilityError

from oracles import area_closed_form, area_gain, area_si

M = MediumParams(n=1e21)
D = derive(M)


def rect_for_area(theta):
    # duration 1 ns; power from the SI oracle, so that the package route is independent
    unit = area_si(1.0)
    return PulseShape.rectangular(theta / unit, 1.0)


def test_zero_pulse():
    assert pulse_area(PulseShape.rectangular(0.0, 1.0), M) == 0.0


def test_rectangular_pi_pulse_by_independent_route():
    p = rect_for_area(math.pi)
    assert pulse_area(p, M) == pytest.approx(math.pi, rel=2e-5)
    assert pulse_area_physical(p, M) == pytest.approx(math.pi, rel=2e-5)
    # numerical quadrature of the flux itself
    fl, _ = quad(lambda t: float(p(t)), -1, 2, points=[0.0, 1.0])
    assert fl == pytest.approx(p.fluence(), rel=1e-10)
    assert split_count(pulse_area(p, M))[0] == 0


def test_lorentzian_and_sampled_fluence():
    p = PulseShape.lorentzian(2.0, 0.5, 3.0)
    fl, _ = quad(lambda t: float(p(t)), -np.inf, np.inf)
    assert p.fluence() == pytest.approx(fl, rel=1e-8)
    t = np.linspace(-200, 200, 400001)
    s = PulseShape.sampled(t, p(t))
    assert s.fluence() == pytest.approx(p.fluence(), rel=2e-3)


@given(st.floats(0.0, 1e10), st.floats(0.01, 100.0), st.floats(0.0, 8.0))
def test_area_linear(power, width, k):
    p = PulseShape.lorentzian(power, width)
    assert pulse_area(p.scaled(k), M) == pytest.approx(k * pulse_area(p, M), rel=1e-12, abs=1e-300)


def test_printed_convention_changes_area_route():
    mp = MediumParams(n=1e21, flux_convention="printed")
    p = PulseShape.rectangular(1.0, 1.0)
    ratio = pulse_area(p, mp) / pulse_area_physical(p, mp)
    assert ratio == pytest.approx(derive(M).flux_unit / derive(mp).flux_unit, rel=1e-12)


def test_split_count_examples():
    assert split_count(4 * math.pi) == (2, pytest.approx(0.0))
    n, r = split_count(math.pi)
    assert n == 0 and r == pytest.approx(math.pi)
    with pytest.raises(ValueError):
        split_count(-1.0)


def test_compression_examples():
    assert compression_factor(0.0, 5.0, "amplifier") == pytest.approx(1.0)
    theta = 2 * math.asin(0.1)
    e = compression_factor(theta, 10.0, "+")
    want = 1 / ((10 * 0.1 + math.sqrt(0.99)) ** 2 + 0.01)
    assert e == pytest.approx(want, rel=1e-14)
    assert e == pytest.approx(0.2509, rel=2e-3)


@given(st.floats(0.0, 50.0), st.floats(0.0, 20.0), st.sampled_from(["+", "-"]))
def test_compression_periodicity(theta, ax, sign):
    # theta -> theta + 2 pi flips sin and cos of theta/2 together
    a = compression_factor(theta, ax, sign)
    b = compression_factor(theta + 2 * math.pi, ax, sign)
    assert b == pytest.approx(a, rel=1e-9)


@given(st.floats(1e-6, 1e-3), st.floats(0.0, 20.0))
def test_cw_estimate_first_order(theta, ax):
    bt = cw_beta(theta, 3.0) * 3.0
    for sign in ("amplifier", "absorber"):
        exact = compression_factor(theta, ax, sign)
        full, lin = cw_compression(bt, ax, sign)
        assert abs(exact - lin) <= 10 * (theta * (1 + ax)) ** 2
        assert abs(exact - full) <= 10 * theta ** 2 * (1 + ax)


@given(st.floats(0.0, 30.0), st.floats(0.0, 10.0))
def test_plus_branch_is_absorber_gain(theta, x):
    assert compression_factor(theta, x, "+") == pytest.approx(float(area_gain(theta, x, -1)), rel=1e-10)
    assert compression_factor(theta, x, "-") == pytest.approx(float(area_gain(theta, x, +1)), rel=1e-10)


def test_zero_area_stays_zero():
    sol = area_equation_solve(5.0, 101, 5.0, "amplifier", 0.0)
    assert np.all(sol.theta == 0) and np.all(sol.Theta == 0)


@pytest.mark.parametrize("sigma", [1, -1])
def test_area_solver_against_closed_form(sigma):
    Th = 0.3
    errs = []
    for n in (401, 801, 1601):
        sol = area_equation_solve(4.0, n, 10.0, sigma, Th, stride=n - 1)
        s = np.clip(sol.tau[-1] - sol.xi, 0.0, None)
        want = area_closed_form(Th * s, sol.xi, sigma)
        errs.append(np.max(np.abs(sol.theta[-1] - want)))
    assert errs[-1] < 2e-3
    assert errs[0] / errs[-1] > 3.0


def _sech_inflow(area, centre=6.0, w=1.0):
    return lambda t: area / (math.pi * w) / math.cosh((t - centre) / w)


@settings(max_examples=6)
@given(st.integers(1, 3), st.floats(0.3, 0.8))
def test_absorber_split_count_matches(N, delta):
    # area 2 pi N + delta: N pulses emerge from an absorber
    area = 2 * math.pi * N + delta
    sol = area_equation_solve(4.0, 801, 22.0, -1, _sech_inflow(area))
    out = sol.Theta[:, -1]
    assert count_pulses(out) == split_count(area)[0]


@pytest.mark.parametrize("N", [1, 2])
def test_absorber_area_tends_to_multiple_of_2pi(N):
    area = 2 * math.pi * N - 0.5
    sol = area_equation_solve(40.0, 2001, 60.0, -1, _sech_inflow(area))
    out_area = np.trapezoid(sol.Theta[:, -1], sol.tau)
    assert out_area == pytest.approx(2 * math.pi * split_count(area)[0], abs=0.15)


def test_medium_variables():
    sol = area_equation_solve(2.0, 101, 2.0, 1, 0.2, gamma_minus=D.gamma_minus)
    r1, r2, r3 = sol.r1(), sol.r2(), sol.r3()
    np.testing.assert_allclose(r1 ** 2 + r2 ** 2 + r3 ** 2, 1.0, rtol=1e-12)
    assert sol.eR2()[-1, 0] == pytest.approx(0.2 / (4 * math.sqrt(1 + D.gamma_minus ** 2)))


def test_area_instability_detected():
    with pytest.raises(InstabilityError):
        area_equation_solve(2.0, 21, 2.0, 1, lambda t: math.nan if t > 0.5 else 0.1)


def test_pulse_shape_validation():
    with pytest.raises(ValueError):
        PulseShape.sampled([0, 1, 0.5], [1, 2, 3])
    with pytest.raises(ValueError):
        PulseShape.rectangular(1.0, 0.0)
    with pytest.raises(ValueError):
        compression_factor(1.0, 1.0, "sideways")
