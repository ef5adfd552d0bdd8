"""Steady-state (time independent) soliton profiles.

Setting all time derivatives to zero eliminates the medium in favour of the
fields.  The total flux ``|eR|^2 + |eL|^2 = e0^2`` is then constant and the
profile reduces to the angle ``phi`` and relative phase ``S``::

    eR = e0 cos(phi),   eL = e0 exp(iS) sin(phi)

with ``phi(l/2)`` at the centre of a fundamental region and ``S(l/2) = 0``.

Two versions of ``S'`` and of the tail length are kept side by side:
``"printed"`` carries ``e0^2`` where the steady limit of the dynamical
equations gives ``e0^4`` (``"rederived"``).  The ``phi'`` equation is the
same in both.  Profiles are integrated with the re-derived ``S'`` by
default because it is the one the dynamical right-hand side balances.

To compare with the time-dependent solver the profile-gauge fields are
multiplied by a common gauge phase ``exp(+-i theta_R)`` that carries the
forward-scattering rotation; see :meth:`SolitonProfile.dynamical_fields`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .bloch import BlochVector, degenerate_rates
from .params import DerivedParams

REGIONS = {"absorber": (0.0, 0.5 * math.pi), "emitter": (0.5 * math.pi, math.pi)}
S_VARIANTS = ("printed", "rederived")


# ---------------------------------------------------------------------------
# algebraic pieces


def _denominator(phi, e0, d: DerivedParams):
    e4 = e0 ** 4
    return (1.0 + 16.0 * d.gamma_minus ** 2 * e4 * d.tau2 ** 2
            + 16.0 * e4 * d.tau1 * d.tau2 * np.sin(2.0 * phi) ** 2)


def phase_rhs(phi, e0: float, d: DerivedParams, variant: str = "printed"):
    """``(dphi/dxi, dS/dxi)``.

    ``variant="printed"`` evaluates ``S' = 16 g- e0^2 tau2^2 cos(2phi)/D``;
    ``"rederived"`` uses ``e0^4`` in place of ``e0^2``.
    """
    if variant not in S_VARIANTS:
        raise ValueError(f"variant must be one of {S_VARIANTS}")
    D = _denominator(phi, e0, d)
    dphi = 2.0 * e0 ** 2 * d.tau2 * np.sin(2.0 * phi) / D
    k = e0 ** 2 if variant == "printed" else e0 ** 4
    dS = 16.0 * d.gamma_minus * k * d.tau2 ** 2 * np.cos(2.0 * phi) / D
    return dphi, dS


def steady_r3(eR, eL, d: DerivedParams):
    """Population difference of the stationary medium in given fields."""
    s = np.abs(eR) ** 2 + np.abs(eL) ** 2
    at = 4.0 * d.gamma_minus * s * d.tau2
    num = 1.0 + at * at
    return -num / (num + 64.0 * d.tau1 * d.tau2 * np.abs(eR * eL) ** 2)


def coefficients(eR, eL, d: DerivedParams):
    """Coefficient functions ``(f, g)`` of the stationary field equations.

    The stationary coherence is ``r1 - i r2 = -2 f`` and the refractive
    coefficient is ``g = gamma_plus + gamma_minus r3``.
    """
    eR = np.asarray(eR, dtype=complex)
    eL = np.asarray(eL, dtype=complex)
    s = np.abs(eR) ** 2 + np.abs(eL) ** 2
    at = 4.0 * d.gamma_minus * s * d.tau2
    D = 1.0 + at * at + 64.0 * d.tau1 * d.tau2 * np.abs(eR * eL) ** 2
    f = 4.0 * d.tau2 * eR * eL * (at - 1j) / D
    g = d.gamma_plus + d.gamma_minus * steady_r3(eR, eL, d)
    return f, g


def steady_bloch(eR, eL, d: DerivedParams) -> BlochVector:
    f, _ = coefficients(eR, eL, d)
    q = -2.0 * f
    return BlochVector(q.real, -q.imag, steady_r3(eR, eL, d))


def soliton_size(e0: float, d: DerivedParams, variant: str = "printed") -> float:
    """e-folding size; ``"printed"`` divides by ``8 tau2 e0^4``, ``"rederived"`` by ``8 tau2 e0^2``."""
    if variant not in S_VARIANTS:
        raise ValueError(f"variant must be one of {S_VARIANTS}")
    A = 16.0 * d.gamma_minus ** 2 * d.tau2 ** 2 * e0 ** 4 + 1.0
    k = e0 ** 4 if variant == "printed" else e0 ** 2
    return A / (8.0 * d.tau2 * k)


# ---------------------------------------------------------------------------
# profiles


@dataclass(frozen=True)
class Winding:
    """Accumulated phase of a loop in units of 2 pi."""

    value: float
    w: float
    spinor: bool


@dataclass
class SolitonProfile:
    e0: float
    l: float
    kind: str
    xi: np.ndarray
    phi: np.ndarray
    S: np.ndarray
    theta_R: np.ndarray
    eR: np.ndarray
    eL: np.ndarray
    r1: np.ndarray
    r2: np.ndarray
    r3: np.ndarray
    xi_s: float
    xi_s_rederived: float
    winding: Winding
    s_variant: str

    def dynamical_fields(self) -> tuple[np.ndarray, np.ndarray]:
        """Fields in the frame of the time-dependent equations."""
        g = np.exp(1j * self.theta_R)
        return self.eR * g, self.eL * np.conj(g)


def _gauge_rate(phi, e0, d: DerivedParams):
    # d theta_R / d xi: half the refractive rate minus the stationary
    # coherence's dispersive pull
    eL2 = (e0 * np.sin(phi)) ** 2
    at = 4.0 * d.gamma_minus * e0 ** 2 * d.tau2
    D = _denominator(phi, e0, d)
    r3 = -(1.0 + at * at) / D
    return 0.5 * (d.gamma_plus + d.gamma_minus * r3) - 4.0 * at * d.tau2 * eL2 / D


def integrate_profile(e0: float, l: float, region: str, d: DerivedParams, num: int = 4001,
                      s_variant: str = "rederived", rtol: float = 1e-11,
                      atol: float = 1e-13) -> SolitonProfile:
    """Integrate the stationary profile outward from ``xi = l/2``.

    Parameters
    ----------
    e0 : float
        Total-flux amplitude (dimensionless).
    l : float
        Target length in units of ``1/alpha_m``.
    region : {"absorber", "emitter"}
        Fundamental region ``[0, pi/2]`` or ``[pi/2, pi]``.
    num : int
        Number of output nodes (uniform, both ends included).

    Uses the adaptive Dormand-Prince 5(4) pair.
    """
    if not (e0 > 0 and math.isfinite(e0)):
        raise ValueError(f"e0 must be positive, got {e0}")
    if not (l > 0 and math.isfinite(l)):
        raise ValueError(f"l must be positive, got {l}")
    if region not in REGIONS:
        raise ValueError(f"region must be one of {tuple(REGIONS)}")
    lo, hi = REGIONS[region]
    phi_mid = 0.5 * (lo + hi)

    def rhs(_, y):
        dphi, dS = phase_rhs(y[0], e0, d, s_variant)
        return [dphi, dS, _gauge_rate(y[0], e0, d)]

    xi = np.linspace(0.0, l, num)
    mid = 0.5 * l
    y0 = [phi_mid, 0.0, 0.0]
    left = xi[xi < mid][::-1]
    right = xi[xi > mid]
    parts = []
    for pts in (left, right):
        if len(pts) == 0:
            parts.append(np.zeros((3, 0)))
            continue
        sol = solve_ivp(rhs, (mid, pts[-1]), y0, method="RK45", t_eval=pts,
                        rtol=rtol, atol=atol)
        if not sol.success:
            raise RuntimeError(f"profile integration failed: {sol.message}")
        parts.append(sol.y)
    centre = np.array(y0)[:, None] if np.any(xi == mid) else np.zeros((3, 0))
    Y = np.concatenate([parts[0][:, ::-1], centre, parts[1]], axis=1)
    phi, S, theta = Y
    eR = e0 * np.cos(phi) + 0j
    eL = e0 * np.exp(1j * S) * np.sin(phi)
    b = steady_bloch(eR, eL, d)
    loop = np.concatenate([phi, math.pi - phi[::-1]]) if region == "absorber" \
        else np.concatenate([math.pi - phi, phi[::-1]])
    return SolitonProfile(
        e0=e0, l=l, kind=region, xi=xi, phi=phi, S=S, theta_R=theta, eR=eR, eL=eL,
        r1=b.r1, r2=b.r2, r3=b.r3,
        xi_s=soliton_size(e0, d, "printed"),
        xi_s_rederived=soliton_size(e0, d, "rederived"),
        winding=winding_number(np.exp(1j * loop), strict=False),
        s_variant=s_variant,
    )


@dataclass(frozen=True)
class AnalyticResidual:
    """Largest deviation from the implicit solution, relative to ``max|xi - l/2|/(4 tau1)``."""

    printed: float
    rederived: float

    @property
    def matches(self) -> str:
        return "rederived" if self.rederived < self.printed else "printed"


def analytic_residual(profile: SolitonProfile, d: DerivedParams, edge_tol: float = 1e-12) -> AnalyticResidual:
    """Evaluate ``2eR^2 - e0^2 + C ln(eR^2/(e0^2 - eR^2)) + (xi - l/2)/(4 tau1)``.

    ``C`` is ``A/(32 tau1 tau2 e0^4)`` as printed, or ``A/(32 tau1 tau2 e0^2)``
    as re-derived from the ``phi'`` equation.  Points where either field
    fraction is below ``edge_tol`` are excluded (log singularity).
    """
    e0 = profile.e0
    eR2 = np.abs(profile.eR) ** 2
    frac = eR2 / e0 ** 2
    ok = (frac > edge_tol) & (frac < 1.0 - edge_tol)
    if not np.any(ok):
        raise ValueError("no profile points away from the log singularity")
    A = 16.0 * d.gamma_minus ** 2 * d.tau2 ** 2 * e0 ** 4 + 1.0
    rhs = -(profile.xi[ok] - 0.5 * profile.l) / (4.0 * d.tau1)
    base = 2.0 * eR2[ok] - e0 ** 2
    log = np.log(eR2[ok] / (e0 ** 2 - eR2[ok]))
    scale = 0.5 * profile.l / (4.0 * d.tau1)
    out = {}
    for name, k in (("printed", e0 ** 4), ("rederived", e0 ** 2)):
        C = A / (32.0 * d.tau1 * d.tau2 * k)
        out[name] = float(np.max(np.abs(base + C * log - rhs)) / scale)
    return AnalyticResidual(**out)


def tail_efold_length(profile: SolitonProfile) -> float:
    """e-folding length of the weaker field at the left edge of the profile."""
    # eL is the vanishing field at xi = 0 in either region
    y = np.log(np.abs(profile.eL[:3]) ** 2)
    slope = (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * (profile.xi[1] - profile.xi[0]))
    return float(1.0 / abs(slope))


def steady_state_residual(profile: SolitonProfile, d: DerivedParams, margin: int = 2) -> dict:
    """Time derivatives obtained by inserting the profile into the dynamics.

    Spatial derivatives of the (dynamical-frame) fields are taken with a
    fourth-order centred stencil; ``margin`` end nodes are skipped.
    """
    eR, eL = profile.dynamical_fields()
    h = profile.xi[1] - profile.xi[0]
    sl = slice(margin, len(profile.xi) - margin)

    def ddx(f):
        g = np.empty_like(f)
        g[2:-2] = (f[:-4] - 8.0 * f[1:-3] + 8.0 * f[3:-1] - f[4:]) / (12.0 * h)
        g[:2] = g[-2:] = np.nan
        return g

    d1, d2, d3, sR, sL = degenerate_rates(profile.r1, profile.r2, profile.r3, eR, eL,
                                          d.gamma_plus, d.gamma_minus, d.inv_tau1, d.inv_tau2)
    dR = -ddx(eR) + sR
    dL = ddx(eL) + sL
    out = {
        "r1": float(np.max(np.abs(d1[sl]))),
        "r2": float(np.max(np.abs(d2[sl]))),
        "r3": float(np.max(np.abs(d3[sl]))),
        "eR": float(np.max(np.abs(dR[sl]))),
        "eL": float(np.max(np.abs(dL[sl]))),
    }
    out["max"] = max(out.values())
    return out


def winding_number(Z, closed: bool = False, tol: float = 0.1, strict: bool = True) -> Winding:
    """Winding of the phase of ``Z`` along its samples.

    Sums the wrapped phase increments between consecutive samples (and from
    the last back to the first when ``closed``).  Totals within ``tol`` of an
    integer give that integer; within ``tol`` of a half-odd integer the loop
    is flagged as spinorial.  Anything else raises, or with ``strict=False``
    returns ``w = nan``.
    """
    Z = np.asarray(Z, dtype=complex)
    if Z.ndim != 1 or len(Z) < 2:
        raise ValueError("need a 1D array of at least two samples")
    mag = np.abs(Z)
    if not np.all(np.isfinite(Z)) or mag.min() <= 1e-12 * max(mag.max(), 1e-300):
        raise ValueError("Z must be finite and bounded away from zero")
    z = np.append(Z, Z[0]) if closed else Z
    total = float(np.sum(np.angle(z[1:] / z[:-1]))) / (2.0 * math.pi)
    k = round(total)
    if abs(total - k) <= tol:
        return Winding(total, float(k), False)
    h = math.floor(total) + 0.5
    if abs(total - h) <= tol:
        return Winding(total, h, True)
    if not strict:
        return Winding(total, math.nan, False)
    raise ValueError(f"accumulated phase {total:.4f} x 2pi is neither integer nor half-integer")


def flux_table(profile: SolitonProfile, d: DerivedParams) -> dict[str, np.ndarray]:
    """Physical columns for CSV export."""
    return {
        "x_cm": d.xi_to_cm(profile.xi),
        "flux_R_W_mm2": np.abs(profile.eR) ** 2 * d.flux_unit,
        "flux_L_W_mm2": np.abs(profile.eL) ** 2 * d.flux_unit,
        "r3": profile.r3,
        "phi_rad": profile.phi,
        "S_rad": profile.S,
    }
