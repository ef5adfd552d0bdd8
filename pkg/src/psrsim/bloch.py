"""Local right-hand sides of the Maxwell-Bloch system.

The ``*_rates`` functions are written with plain arithmetic on real and
complex scalars so that the same source is used by the public wrappers
(where arguments may be numpy arrays) and by the numba kernels of the
solver.  Nothing here knows about the grid.

Notation: ``q = r1 - i r2`` is the complex medium coherence, ``P = eR eL``
the RL pair amplitude, ``inv_tau1 = 1/tau1`` and ``inv_tau2 = 1/tau2``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import DerivedParams, TwoColorCouplings


@dataclass
class BlochVector:
    """Rescaled Bloch vector; components may be scalars or arrays."""

    r1: float | np.ndarray
    r2: float | np.ndarray
    r3: float | np.ndarray

    def as_array(self) -> np.ndarray:
        return np.array([self.r1, self.r2, self.r3], dtype=float)

    def norm2(self):
        return self.r1 * self.r1 + self.r2 * self.r2 + self.r3 * self.r3


@dataclass
class GratingBloch:
    """Bloch vector with ``exp(+2i w x)`` grating amplitudes.

    The ``exp(-2i w x)`` components are the complex conjugates of
    ``rp1, rp2, rp3`` and are never stored.
    """

    r0: BlochVector
    rp1: complex | np.ndarray = 0j
    rp2: complex | np.ndarray = 0j
    rp3: complex | np.ndarray = 0j


@dataclass
class LocalFields:
    eR: complex | np.ndarray
    eL: complex | np.ndarray


def dark_state(p: float, theta0: float = 0.0) -> BlochVector:
    """Pure state with excited fraction ``p`` and coherence phase ``theta0``.

    >>> dark_state(0.5)
    BlochVector(r1=1.0, r2=0.0, r3=0.0)
    """
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"excited fraction p must lie in [0, 1], got {p}")
    amp = 2.0 * np.sqrt(p * (1.0 - p))
    return BlochVector(float(amp * np.cos(theta0)), float(amp * np.sin(theta0)), 2.0 * p - 1.0)


# ---------------------------------------------------------------------------
# rate cores (numba compatible)


def degenerate_rates(r1, r2, r3, eR, eL, gp, gm, inv_tau1, inv_tau2):
    """Degenerate single-mode rates ``(dr1, dr2, dr3, src_R, src_L)``."""
    P = eR * eL
    aR = eR.real * eR.real + eR.imag * eR.imag
    aL = eL.real * eL.real + eL.imag * eL.imag
    stark = 4.0 * (gm * aR + gm * aL)
    d1 = stark * r2 + 8.0 * P.imag * r3 - r1 * inv_tau2
    d2 = -stark * r1 + 8.0 * P.real * r3 - r2 * inv_tau2
    d3 = -8.0 * (P.real * r2 + P.imag * r1) - (r3 + 1.0) * inv_tau1
    q = r1 - 1j * r2
    g = gp + gm * r3
    sR = 0.5j * (g * eR + q * eL.conjugate())
    sL = 0.5j * (g * eL + q * eR.conjugate())
    return d1, d2, d3, sR, sL


def two_color_rates(r1, r2, r3, p1, p2, p3, eR, eL,
                    a1, a2, a12, a21, gp1, gm1, gp2, gm2, gm12, gm21,
                    inv_tau1, inv_tau2, grating):
    """Two-color rates with grating components.

    Returns ``(dr1, dr2, dr3, dp1, dp2, dp3, src_R, src_L)``.  The grating
    amplitudes are frozen (zero rates) when ``grating`` is false.  Written so
    that with zero grating and unit ``a`` coefficients every operation
    reproduces :func:`degenerate_rates` exactly.
    """
    P = eR * eL
    aR = eR.real * eR.real + eR.imag * eR.imag
    aL = eL.real * eL.real + eL.imag * eL.imag
    stark = 4.0 * (gm1 * aR + gm2 * aL)
    eRc = eR.conjugate()
    eLc = eL.conjugate()
    p1c = p1.conjugate()
    p2c = p2.conjugate()
    p3c = p3.conjugate()
    x12 = eR * eLc
    x21 = eL * eRc
    mR = eR * eR - eLc * eLc
    mL = eL * eL - eRc * eRc
    nR = eR * eR + eLc * eLc
    nL = eL * eL + eRc * eRc

    g1 = (4.0 * gm12 * x12 * p2c + 4.0 * gm21 * x21 * p2
          - 2j * mL * p3 - 2j * mR * p3c)
    g2 = (-4.0 * gm12 * x12 * p1c - 4.0 * gm21 * x21 * p1
          + 2.0 * nL * p3 + 2.0 * nR * p3c)
    g3 = (2j * mR * p1c + 2j * mL * p1
          - 2.0 * nL * p2 - 2.0 * nR * p2c)
    d1 = stark * r2 + 8.0 * P.imag * r3 + g1.real - r1 * inv_tau2
    d2 = -stark * r1 + 8.0 * P.real * r3 + g2.real - r2 * inv_tau2
    d3 = -8.0 * (P.real * r2 + P.imag * r1) + g3.real - (r3 + 1.0) * inv_tau1

    if grating:
        dp1 = (4.0 * gm12 * x12 * r2 - 2j * mR * r3
               + stark * p2 + 8.0 * P.imag * p3 - p1 * inv_tau2)
        dp2 = (-4.0 * gm12 * x12 * r1 + 2.0 * nR * r3
               - stark * p1 + 8.0 * P.real * p3 - p2 * inv_tau2)
        dp3 = (2j * r1 * mR - 2.0 * r2 * nR
               - 8.0 * (P.real * p2 + P.imag * p1) - p3 * inv_tau1)
    else:
        dp1 = 0j * p1
        dp2 = 0j * p2
        dp3 = 0j * p3

    q = r1 - 1j * r2
    qp = p1 - 1j * p2
    qm = p1c - 1j * p2c
    sR = 0.5j * (a1 * (gp1 + gm1 * r3) * eR + gm12 * p3 * eL
                 + a12 * q * eLc + qp * eRc)
    sL = 0.5j * (a2 * (gp2 + gm2 * r3) * eL + gm21 * p3c * eR
                 + a21 * q * eRc + qm * eLc)
    return d1, d2, d3, dp1, dp2, dp3, sR, sL


def single_mode_rates(r1, r2, r3, e, gp, gm, inv_tau1, inv_tau2):
    """Rates for a single R-moving mode (propagation model, no L-mover).

    Returns ``(dr1, dr2, dr3, src)``.  The medium couples to ``e**2`` rather
    than to the RL pair ``eR eL``.
    """
    E2 = e * e
    a = e.real * e.real + e.imag * e.imag
    d1 = 4.0 * r3 * E2.imag + 4.0 * gm * r2 * a - r1 * inv_tau2
    d2 = 4.0 * r3 * E2.real - 4.0 * gm * r1 * a - r2 * inv_tau2
    d3 = -4.0 * (r1 * E2.imag + r2 * E2.real) - (r3 + 1.0) * inv_tau1
    src = 0.5j * ((gp + gm * r3) * e + (r1 - 1j * r2) * e.conjugate())
    return d1, d2, d3, src


# ---------------------------------------------------------------------------
# public wrappers


def _check_finite(*values) -> None:
    for v in values:
        if not np.all(np.isfinite(v)):
            raise ValueError("non-finite input")


def _real(x):
    return np.asarray(x, dtype=float) if np.ndim(x) else float(x)


def _cplx(x):
    return np.asarray(x, dtype=complex) if np.ndim(x) else complex(x)


def bloch_rhs_degenerate(r: BlochVector, f: LocalFields, d: DerivedParams) -> BlochVector:
    """``d r / d tau`` for the degenerate model."""
    r1, r2, r3 = _real(r.r1), _real(r.r2), _real(r.r3)
    eR, eL = _cplx(f.eR), _cplx(f.eL)
    _check_finite(r1, r2, r3, eR, eL)
    d1, d2, d3, _, _ = degenerate_rates(r1, r2, r3, eR, eL, d.gamma_plus, d.gamma_minus,
                                        d.inv_tau1, d.inv_tau2)
    return BlochVector(d1, d2, d3)


def field_source_degenerate(r: BlochVector, f: LocalFields, d: DerivedParams):
    """Non-transport parts of ``(d_tau + d_xi) eR`` and ``(d_tau - d_xi) eL``."""
    r1, r2, r3 = _real(r.r1), _real(r.r2), _real(r.r3)
    eR, eL = _cplx(f.eR), _cplx(f.eL)
    _check_finite(r1, r2, r3, eR, eL)
    _, _, _, sR, sL = degenerate_rates(r1, r2, r3, eR, eL, d.gamma_plus, d.gamma_minus,
                                       d.inv_tau1, d.inv_tau2)
    return sR, sL


def rhs_two_color(g: GratingBloch, f: LocalFields, c: TwoColorCouplings,
                  d: DerivedParams, grating: bool = True):
    """Full two-color right-hand side.

    Returns
    -------
    (GratingBloch, (complex, complex))
        Time derivative of the medium state and the two field sources.
    """
    r1, r2, r3 = _real(g.r0.r1), _real(g.r0.r2), _real(g.r0.r3)
    p1, p2, p3 = _cplx(g.rp1), _cplx(g.rp2), _cplx(g.rp3)
    eR, eL = _cplx(f.eR), _cplx(f.eL)
    _check_finite(r1, r2, r3, p1, p2, p3, eR, eL)
    out = two_color_rates(r1, r2, r3, p1, p2, p3, eR, eL,
                          *_coupling_args(c), d.inv_tau1, d.inv_tau2, grating)
    d1, d2, d3, dp1, dp2, dp3, sR, sL = out
    return GratingBloch(BlochVector(d1, d2, d3), dp1, dp2, dp3), (sR, sL)


def rhs_single_mode(r: BlochVector, e, d: DerivedParams):
    """``(d r / d tau, source)`` for the single R-mode propagation model."""
    r1, r2, r3 = _real(r.r1), _real(r.r2), _real(r.r3)
    e = _cplx(e)
    _check_finite(r1, r2, r3, e)
    d1, d2, d3, s = single_mode_rates(r1, r2, r3, e, d.gamma_plus, d.gamma_minus,
                                      d.inv_tau1, d.inv_tau2)
    return BlochVector(d1, d2, d3), s


def _coupling_args(c: TwoColorCouplings) -> tuple:
    return (c.a1, c.a2, c.a12, c.a21,
            c.gamma_pm_1[0], c.gamma_pm_1[1], c.gamma_pm_2[0], c.gamma_pm_2[1],
            c.gamma_pm_12[1], c.gamma_pm_21[1])
