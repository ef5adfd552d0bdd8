"""Physical parameters, unit conversions and derived dimensionless constants.

All dynamics run in units of the inverse coupling length ``1/alpha_m``:
``xi = alpha_m * x`` and ``tau = alpha_m * c * t``.  Field envelopes are
normalised so that ``|e|^2 = flux / flux_unit``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

HBARC_EV_NM = 197.327
HBARC_EV_CM = HBARC_EV_NM * 1e-7
C_CM_PER_NS = 29.979
EV_J = 1.602176634e-19

# pH2 vibrational transition v=1 -> 0 and its two-photon couplings (1e-24 cm^3)
PH2_EPS_EG = 0.52
PH2_MU_EE = 0.87
PH2_MU_GG = 0.80
PH2_MU_GE = 0.055

# Literal flux unit quoted for n = 1e21 cm^-3, in W/mm^2.
PRINTED_FLUX_UNIT = 1.2e9
PRINTED_FLUX_DENSITY = 1e21

FLUX_CONVENTIONS = ("envelope", "printed")


@dataclass(frozen=True)
class MediumParams:
    """Target description.

    Parameters
    ----------
    n : float
        Number density of active molecules (cm^-3).
    eps_eg : float
        Level splitting (eV).
    mu_ee, mu_gg, mu_ge : float
        Two-photon couplings in units of 1e-24 cm^3.
    T1, T2 : float
        Population and phase relaxation times (ns).  ``math.inf`` switches
        the corresponding relaxation off.
    flux_convention : {"envelope", "printed"}
        How ``|e|^2 = 1`` maps to a physical flux.  ``"envelope"`` uses
        ``2 c eps_eg n`` (field written as ``E exp(-i w t) + c.c.``);
        ``"printed"`` uses the literal 1.2e9 W/mm^2 at 1e21 cm^-3.
    """

    n: float
    eps_eg: float = PH2_EPS_EG
    mu_ee: float = PH2_MU_EE
    mu_gg: float = PH2_MU_GG
    mu_ge: float = PH2_MU_GE
    T1: float = 1e3
    T2: float = 10.0
    flux_convention: str = "envelope"

    def __post_init__(self) -> None:
        validate_medium(self)


def validate_medium(m: MediumParams) -> None:
    for name in ("n", "eps_eg", "mu_ee", "mu_gg", "mu_ge", "T1", "T2"):
        v = getattr(m, name)
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise TypeError(f"{name} must be a real number, got {v!r}")
        if math.isnan(v):
            raise ValueError(f"{name} is NaN")
    if not math.isfinite(m.n) or m.n <= 0:
        raise ValueError(f"n must be positive and finite, got {m.n}")
    if not math.isfinite(m.eps_eg) or m.eps_eg <= 0:
        raise ValueError(f"eps_eg must be positive, got {m.eps_eg}")
    if not math.isfinite(m.mu_ge) or m.mu_ge <= 0:
        raise ValueError(f"mu_ge must be positive, got {m.mu_ge}")
    if not (math.isfinite(m.mu_ee) and math.isfinite(m.mu_gg)):
        raise ValueError("mu_ee and mu_gg must be finite")
    for name in ("T2", "T1"):
        if getattr(m, name) <= 0:
            raise ValueError(f"{name} must be positive, got {getattr(m, name)}")
    # T1 = T2 = inf (no relaxation at all) is the one admissible equality
    if not (m.T1 > m.T2 / 2 or (math.isinf(m.T1) and math.isinf(m.T2))):
        raise ValueError(f"need T1 > T2/2, got T1={m.T1}, T2={m.T2}")
    if m.flux_convention not in FLUX_CONVENTIONS:
        raise ValueError(f"flux_convention must be one of {FLUX_CONVENTIONS}, "
                         f"got {m.flux_convention!r}")


@dataclass(frozen=True)
class DerivedParams:
    """Dimensionless constants derived from a :class:`MediumParams`."""

    alpha_m: float          # cm^-1
    length_unit_cm: float
    time_unit_ns: float
    gamma_plus: float
    gamma_minus: float
    tau1: float
    tau2: float
    flux_unit: float        # W/mm^2 for |e|^2 = 1

    @property
    def inv_tau1(self) -> float:
        return 0.0 if math.isinf(self.tau1) else 1.0 / self.tau1

    @property
    def inv_tau2(self) -> float:
        return 0.0 if math.isinf(self.tau2) else 1.0 / self.tau2

    def ns_to_tau(self, t_ns):
        return t_ns / self.time_unit_ns

    def tau_to_ns(self, tau):
        return tau * self.time_unit_ns

    def cm_to_xi(self, x_cm):
        return x_cm * self.alpha_m

    def xi_to_cm(self, xi):
        return xi * self.length_unit_cm


def alpha_m(eps_eg: float, n: float, mu_ge: float) -> float:
    """Inverse coupling length ``(eps_eg/2) n mu_ge`` in cm^-1."""
    eps_cm = eps_eg / HBARC_EV_CM
    return 0.5 * eps_cm * n * mu_ge * 1e-24


def flux_unit(m: MediumParams) -> float:
    """Physical flux in W/mm^2 carried by a dimensionless ``|e|^2 = 1``."""
    if m.flux_convention == "printed":
        return PRINTED_FLUX_UNIT * m.n / PRINTED_FLUX_DENSITY
    # 2 c eps n: W/cm^2 -> W/mm^2
    c_cm_s = C_CM_PER_NS * 1e9
    return 2.0 * c_cm_s * m.eps_eg * EV_J * m.n / 100.0


def derive(params: MediumParams) -> DerivedParams:
    """Derive the dimensionless model constants.

    Examples
    --------
    >>> d = derive(MediumParams(n=1e20))
    >>> round(d.length_unit_cm, 2), round(d.time_unit_ns, 3)
    (13.8, 0.46)
    """
    validate_medium(params)
    am = alpha_m(params.eps_eg, params.n, params.mu_ge)
    length = 1.0 / am
    tu = length / C_CM_PER_NS
    return DerivedParams(
        alpha_m=am,
        length_unit_cm=length,
        time_unit_ns=tu,
        gamma_plus=(params.mu_ee + params.mu_gg) / (2.0 * params.mu_ge),
        gamma_minus=(params.mu_ee - params.mu_gg) / (2.0 * params.mu_ge),
        tau1=params.T1 / tu,
        tau2=params.T2 / tu,
        flux_unit=flux_unit(params),
    )


def flux_to_amplitude(power, d: DerivedParams):
    """Dimensionless amplitude ``|e|`` for a flux in W/mm^2."""
    p = np.asarray(power, dtype=float)
    if np.any(np.isnan(p)) or np.any(p < 0):
        raise ValueError(f"flux must be non-negative, got {power!r}")
    return _scalar(np.sqrt(p / d.flux_unit))


def amplitude_to_flux(e, d: DerivedParams):
    """Physical flux in W/mm^2 of a (possibly complex) amplitude."""
    a = np.abs(np.asarray(e))
    return _scalar(a * a * d.flux_unit)


@dataclass(frozen=True)
class TwoColorCouplings:
    """Couplings for an R-mover of frequency omega1 and L-mover of omega2.

    ``gamma_pm_*`` are ``(gamma_plus, gamma_minus)`` pairs.
    """

    omega1: float
    omega2: float
    a1: float
    a2: float
    a12: float
    a21: float
    gamma_pm_1: tuple[float, float]
    gamma_pm_2: tuple[float, float]
    gamma_pm_12: tuple[float, float]
    gamma_pm_21: tuple[float, float]


def two_color(omega1: float, params: MediumParams) -> TwoColorCouplings:
    """Two-color couplings for ``omega1 + omega2 = eps_eg``.

    The couplings ``mu_ab`` are taken frequency independent, so every
    ``gamma_pm`` pair equals the degenerate one.
    """
    eps = params.eps_eg
    if not (0.0 < omega1 < eps):
        raise ValueError(f"omega1 must lie in (0, {eps}) eV, got {omega1}")
    omega2 = eps - omega1
    a1 = 2.0 * omega1 / eps
    a2 = 2.0 * omega2 / eps
    gp = (params.mu_ee + params.mu_gg) / (2.0 * params.mu_ge)
    gm = (params.mu_ee - params.mu_gg) / (2.0 * params.mu_ge)
    pair = (gp, gm)
    return TwoColorCouplings(
        omega1=omega1, omega2=omega2, a1=a1, a2=a2,
        # 2 w_j^2/(w_i eps) written as a_j^2/a_i: exactly 1 when degenerate
        a12=a2 * a2 / a1, a21=a1 * a1 / a2,
        gamma_pm_1=pair, gamma_pm_2=pair, gamma_pm_12=pair, gamma_pm_21=pair,
    )


def mu_ge_two_color(omega: float, params: MediumParams, eps_pe: float | None = None) -> float:
    """Off-diagonal coupling for the color split ``(omega, eps_eg - omega)``.

    With ``eps_pe=None`` the coupling is the degenerate constant.  Given an
    intermediate-state gap ``eps_pe`` (eV, measured from |e>) the energy
    denominators ``(eps_pg + eps_pe)/((eps_pe + w)(eps_pg - w))`` are applied,
    normalised to ``mu_ge`` at ``w = eps_eg/2``.
    """
    eps = params.eps_eg
    if not (0.0 < omega < eps):
        raise ValueError(f"omega must lie in (0, {eps}) eV, got {omega}")
    if eps_pe is None:
        return params.mu_ge
    eps_pg = eps_pe + eps

    def den(w):
        return (eps_pe + w) * (eps_pg - w)

    return params.mu_ge * den(0.5 * eps) / den(omega)


def alpha_m_two_color(omega: float, params: MediumParams, eps_pe: float | None = None) -> float:
    """Inverse coupling length for a two-color split, in cm^-1."""
    return alpha_m(params.eps_eg, params.n, mu_ge_two_color(omega, params, eps_pe))


def _scalar(a: np.ndarray):
    return float(a) if a.ndim == 0 else a
