import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from psrsim.params import MediumParams, derive, flux_to_amplitude
from psrsim.soliton import (analytic_residual, coefficients, integrate_profile, phase_rhs, soliton_size,
                            steady_bloch, steady_r3, steady_state_residual, tail_efold_length,
                            winding_number)

from oracles import phase_rhs_direct

M12 = MediumParams(n=2.6e22, T2=20.0, T1=1e3)
D12 = derive(M12)
E0_12 = float(flux_to_amplitude(2e6, D12))
L12 = D12.cm_to_xi(5.0)


@pytest.fixture(scope="module")
def absorber():
    return integrate_profile(E0_12, L12, "absorber", D12, num=8001)


@pytest.fixture(scope="module")
def emitter():
    return integrate_profile(E0_12, L12, "emitter", D12, num=8001)


def test_phase_rhs_edges_are_fixed_points():
    for phi in (0.0, 0.5 * math.pi, math.pi):
        assert phase_rhs(phi, 0.3, D12)[0] == pytest.approx(0.0, abs=1e-15)
    assert phase_rhs(0.25 * math.pi, 0.3, D12)[1] == pytest.approx(0.0, abs=1e-15)


def test_phase_rhs_direct_arithmetic():
    d = replace(D12, gamma_minus=0.6364, tau2=10.0, tau1=1e3)
    got = phase_rhs(math.pi / 8, 1.0, d)
    want = phase_rhs_direct(math.pi / 8, 1.0, 0.6364, 1e3, 10.0)
    assert got == pytest.approx(want, rel=1e-14)
    # and the frozen numbers
    assert got[0] == pytest.approx(1.7535412e-4, rel=1e-7)
    assert got[1] == pytest.approx(8.9276288e-3, rel=1e-7)


def test_soliton_size_examples():
    d = replace(D12, gamma_minus=0.5, tau2=10.0)
    assert soliton_size(1.0, d) == pytest.approx(401 / 80)
    assert soliton_size(1.0, d, "rederived") == pytest.approx(401 / 80)
    assert soliton_size(1e4, d) == pytest.approx(2 * 0.25 * 10, rel=1e-6)


@given(st.complex_numbers(max_magnitude=3.0), st.complex_numbers(max_magnitude=3.0))
def test_steady_r3_bounds(eR, eL):
    r3 = steady_r3(eR, eL, D12)
    assert -1.0 <= r3 < 0.0


@given(st.complex_numbers(max_magnitude=0.1), st.complex_numbers(max_magnitude=0.1))
def test_steady_bloch_is_stationary(eR, eL):
    from psrsim.bloch import degenerate_rates
    b = steady_bloch(eR, eL, D12)
    d1, d2, d3, _, _ = degenerate_rates(b.r1, b.r2, b.r3, eR, eL, D12.gamma_plus, D12.gamma_minus,
                                        D12.inv_tau1, D12.inv_tau2)
    scale = 1.0 / D12.tau2
    assert max(abs(d1), abs(d2), abs(d3)) <= 1e-9 * scale
    f, g = coefficients(eR, eL, D12)
    assert g == pytest.approx(D12.gamma_plus + D12.gamma_minus * b.r3)


@settings(max_examples=15)
@given(st.floats(1e-3, 0.03), st.floats(2.0, 60.0), st.sampled_from(["absorber", "emitter"]))
def test_profile_invariants(e0, l, region):
    p = integrate_profile(e0, l, region, D12, num=401)
    total = np.abs(p.eR) ** 2 + np.abs(p.eL) ** 2
    np.testing.assert_allclose(total, e0 ** 2, rtol=1e-12)
    lo, hi = (0.0, 0.5 * math.pi) if region == "absorber" else (0.5 * math.pi, math.pi)
    assert np.all((p.phi >= lo) & (p.phi <= hi))
    assert np.all((p.r3 >= -1.0) & (p.r3 < 0.0))
    dR = np.diff(np.abs(p.eR))
    assert np.all(dR >= -1e-15) or np.all(dR <= 1e-15)


def test_fig12_profile(absorber):
    p = absorber
    assert p.r3[0] < -0.99 and p.r3[-1] < -0.99
    mid = p.r3[len(p.r3) // 2]
    assert -0.9 <= mid <= -0.7
    total = np.abs(p.eR) ** 2 + np.abs(p.eL) ** 2
    assert np.max(np.abs(total / E0_12 ** 2 - 1)) < 1e-8


def test_analytic_residual_prefers_rederived(absorber):
    ar = analytic_residual(absorber, D12)
    assert ar.matches == "rederived"
    assert ar.rederived < 1e-8
    assert ar.printed > 1e3


def test_tail_length(absorber):
    t = tail_efold_length(absorber)
    assert t == pytest.approx(absorber.xi_s_rederived, rel=0.02)
    assert absorber.xi_s / t > 1e5


def test_centre_of_profile(absorber):
    k = len(absorber.xi) // 2
    assert abs(absorber.eR[k]) ** 2 == pytest.approx(0.5 * E0_12 ** 2, rel=1e-12)


def test_steady_state_residual(absorber):
    assert steady_state_residual(absorber, D12)["max"] < 1e-6


def test_printed_s_prime_is_not_stationary():
    p = integrate_profile(E0_12, L12, "absorber", D12, num=8001, s_variant="printed")
    assert steady_state_residual(p, D12)["max"] > 1e-3


def test_emitter_absorber_map(absorber, emitter):
    np.testing.assert_allclose(emitter.phi, math.pi - absorber.phi, atol=1e-9)
    np.testing.assert_allclose(np.abs(emitter.eR), np.abs(absorber.eR), rtol=1e-7, atol=1e-14)
    np.testing.assert_allclose(np.abs(emitter.eL), np.abs(absorber.eL), rtol=1e-7, atol=1e-14)
    # mirrored, the emitter's R flux is the absorber's L flux
    np.testing.assert_allclose(np.abs(emitter.eR[::-1]), np.abs(absorber.eL), rtol=1e-6, atol=1e-12)


def test_winding_examples(absorber):
    xi = np.linspace(0, 2 * math.pi, 401)
    assert winding_number(np.exp(2j * xi)).w == 2
    assert winding_number(np.full(10, 1 + 1j)).w == 0
    w = absorber.winding
    assert w.spinor and w.w == 0.5


def test_winding_rejects_zero_and_flags_unquantized():
    with pytest.raises(ValueError):
        winding_number(np.array([1, 0, 1j]))
    with pytest.raises(ValueError):
        winding_number(np.exp(1j * np.linspace(0, 1.5, 50)))
    assert math.isnan(winding_number(np.exp(1j * np.linspace(0, 1.5, 50)), strict=False).w)


def test_profile_input_validation():
    with pytest.raises(ValueError):
        integrate_profile(-1.0, 10.0, "absorber", D12)
    with pytest.raises(ValueError):
        integrate_profile(0.01, 10.0, "middle", D12)
