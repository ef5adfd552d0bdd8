"""Single-mode pulse propagation: area, splitting and compression.

For an R-moving pulse without relaxation, a gauge rotation removes the
forward-scattering phase and the medium follows the area function
``theta(xi, tau) = int Theta dtau`` with::

    (d_tau + d_xi) Theta = sigma sin(theta) Theta
    eR^2 = Theta / (4 sqrt(1 + gamma_-^2))
    r3 = sigma cos(theta) / sqrt(1 + gamma_-^2)

``sigma = +1`` is an inverted (amplifying) medium, ``sigma = -1`` an
absorbing one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .params import C_CM_PER_NS, EV_J, HBARC_EV_CM, MediumParams, derive
from .solver import InstabilityError

PULSE_KINDS = ("sampled", "lorentzian", "rectangular")


@dataclass(frozen=True, eq=False)
class PulseShape:
    """Flux ``F(t)`` in W/mm^2 against time in ns.

    Build with :meth:`sampled`, :meth:`lorentzian` or :meth:`rectangular`.
    ``width_ns`` is the half width at half maximum of a Lorentzian and the
    duration of a rectangular pulse.
    """

    kind: str
    t_ns: np.ndarray | None = None
    values: np.ndarray | None = None
    amplitude: float = 0.0
    width_ns: float = 0.0
    start_ns: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in PULSE_KINDS:
            raise ValueError(f"kind must be one of {PULSE_KINDS}")
        if self.kind == "sampled":
            t, f = self.t_ns, self.values
            if t is None or f is None or len(t) != len(f) or len(t) < 2:
                raise ValueError("sampled pulse needs matching t and F arrays (>= 2 samples)")
            if np.any(np.diff(t) <= 0):
                raise ValueError("sample times must increase")
            if np.any(~np.isfinite(f)) or np.any(f < 0):
                raise ValueError("flux samples must be finite and non-negative")
        else:
            if not (self.amplitude >= 0 and math.isfinite(self.amplitude)):
                raise ValueError("amplitude must be non-negative")
            if not (self.width_ns > 0 and math.isfinite(self.width_ns)):
                raise ValueError("width must be positive")

    @classmethod
    def sampled(cls, t_ns, flux) -> "PulseShape":
        return cls("sampled", np.asarray(t_ns, dtype=float), np.asarray(flux, dtype=float))

    @classmethod
    def lorentzian(cls, peak: float, hwhm_ns: float, center_ns: float = 0.0) -> "PulseShape":
        return cls("lorentzian", amplitude=peak, width_ns=hwhm_ns, start_ns=center_ns)

    @classmethod
    def rectangular(cls, power: float, duration_ns: float, start_ns: float = 0.0) -> "PulseShape":
        return cls("rectangular", amplitude=power, width_ns=duration_ns, start_ns=start_ns)

    def __call__(self, t_ns):
        t = np.asarray(t_ns, dtype=float)
        if self.kind == "sampled":
            return np.interp(t, self.t_ns, self.values, left=0.0, right=0.0)
        if self.kind == "lorentzian":
            x = (t - self.start_ns) / self.width_ns
            return self.amplitude / (1.0 + x * x)
        inside = (t >= self.start_ns) & (t < self.start_ns + self.width_ns)
        return np.where(inside, self.amplitude, 0.0)

    def fluence(self) -> float:
        """``int F dt`` in W ns / mm^2."""
        if self.kind == "sampled":
            return float(np.trapezoid(self.values, self.t_ns))
        if self.kind == "lorentzian":
            return math.pi * self.amplitude * self.width_ns
        return self.amplitude * self.width_ns

    def scaled(self, k: float) -> "PulseShape":
        if self.kind == "sampled":
            return PulseShape.sampled(self.t_ns, k * self.values)
        return PulseShape(self.kind, amplitude=k * self.amplitude,
                          width_ns=self.width_ns, start_ns=self.start_ns)


def pulse_area(p: PulseShape, m: MediumParams) -> float:
    """Area ``4 sqrt(1 + gamma_-^2) int |e|^2 dtau`` of a pulse, in radians."""
    d = derive(m)
    return 4.0 * math.sqrt(1.0 + d.gamma_minus ** 2) * p.fluence() / (d.flux_unit * d.time_unit_ns)


def pulse_area_physical(p: PulseShape, m: MediumParams) -> float:
    """Same area from ``sqrt(mu_ge^2 + (mu_ee - mu_gg)^2/4) int F dt`` in physical units.

    The flux is converted to an energy density ``F/c`` and the effective
    coupling (cm^3) times that density, over hbar, gives a rate.  Agrees with
    :func:`pulse_area` for the ``"envelope"`` flux convention.
    """
    mu = math.sqrt(m.mu_ge ** 2 + 0.25 * (m.mu_ee - m.mu_gg) ** 2) * 1e-24
    c_cm_s = C_CM_PER_NS * 1e9
    hbar_ev_s = HBARC_EV_CM / c_cm_s
    fluence_ev_cm2 = p.fluence() * 100.0 * 1e-9 / EV_J   # W ns/mm^2 -> eV/cm^2
    return mu * fluence_ev_cm2 / c_cm_s / hbar_ev_s


def split_count(theta: float) -> tuple[int, float]:
    """Number of split pulses ``floor(theta / 2pi)`` and the leftover area."""
    if not math.isfinite(theta) or theta < 0:
        raise ValueError(f"area must be finite and non-negative, got {theta}")
    n = int(math.floor(theta / (2.0 * math.pi)))
    return n, theta - 2.0 * math.pi * n


_SIGNS = {"+": 1.0, "-": -1.0, "amplifier": 1.0, "absorber": -1.0}


def compression_factor(theta: float, alpha_m_x: float, sign: str = "amplifier") -> float:
    """``E = 1/((a sin(theta/2) +- cos(theta/2))^2 + sin(theta/2)^2)``, ``a = alpha_m x``.

    ``sign`` is ``"+"``/``"-"`` or the labels ``"amplifier"`` (``+``) and
    ``"absorber"`` (``-``).  In terms of the area equation, the ``+`` branch
    is ``d theta(x)/d theta(0)`` of an absorbing medium (``sigma = -1``).
    """
    s = _sign(sign)
    h = 0.5 * theta
    return 1.0 / ((alpha_m_x * math.sin(h) + s * math.cos(h)) ** 2 + math.sin(h) ** 2)


def cw_beta(theta: float, t: float) -> float:
    """Rate ``beta`` with ``theta/2 = beta t``, so that ``sin(theta/2) ~ beta t``."""
    return 0.5 * theta / t


def cw_compression(beta_t: float, alpha_m_x: float, sign: str = "amplifier") -> tuple[float, float]:
    """Small-area estimates ``1/((bt a +- 1)^2 + (bt)^2)`` and ``1/(1 +- 2 bt a)``."""
    s = _sign(sign)
    full = 1.0 / ((beta_t * alpha_m_x + s) ** 2 + beta_t ** 2)
    linear = 1.0 / (1.0 + s * 2.0 * beta_t * alpha_m_x)
    return full, linear


def _sign(sign: str) -> float:
    try:
        return _SIGNS[sign]
    except KeyError:
        raise ValueError(f"sign must be one of {tuple(_SIGNS)}, got {sign!r}") from None


# ---------------------------------------------------------------------------
# area equation on the unit-CFL grid


@dataclass
class AreaSolution:
    xi: np.ndarray
    tau: np.ndarray
    theta: np.ndarray      # (n_records, n_points)
    Theta: np.ndarray      # d theta / d tau
    sigma: float
    gamma_minus: float

    def eR2(self) -> np.ndarray:
        return self.Theta / (4.0 * math.sqrt(1.0 + self.gamma_minus ** 2))

    def r3(self) -> np.ndarray:
        return self.sigma * np.cos(self.theta) / math.sqrt(1.0 + self.gamma_minus ** 2)

    def r2(self) -> np.ndarray:
        return self.sigma * np.sin(self.theta)

    def r1(self) -> np.ndarray:
        return -self.gamma_minus * self.r3()


def _area_rates(theta, Theta, sigma):
    return Theta, sigma * np.sin(theta) * Theta


def _area_rk4(theta, Theta, sigma, h):
    a1, b1 = _area_rates(theta, Theta, sigma)
    a2, b2 = _area_rates(theta + 0.5 * h * a1, Theta + 0.5 * h * b1, sigma)
    a3, b3 = _area_rates(theta + 0.5 * h * a2, Theta + 0.5 * h * b2, sigma)
    a4, b4 = _area_rates(theta + h * a3, Theta + h * b3, sigma)
    return (theta + h / 6.0 * (a1 + 2 * a2 + 2 * a3 + a4),
            Theta + h / 6.0 * (b1 + 2 * b2 + 2 * b3 + b4))


def area_equation_solve(l: float, n_points: int, tau_end: float, sign,
                        inflow: Callable[[float], float] | float = 0.0,
                        theta0: np.ndarray | float = 0.0,
                        Theta0: np.ndarray | float = 0.0,
                        gamma_minus: float = 0.0,
                        stride: int = 1) -> AreaSolution:
    """Solve the area equation with the solver's split-step scheme.

    Parameters
    ----------
    l, n_points : float, int
        Domain ``[0, l]`` with ``n_points`` nodes; ``dtau = dxi``.
    sign : {+1, -1, "amplifier", "absorber", "+", "-"}
        Medium sign ``sigma``.
    inflow : callable or float
        ``Theta(0, tau)``, the area rate entering at ``xi = 0``.
    theta0, Theta0 : array or float
        Initial ``theta`` and ``Theta`` on the grid.
    gamma_minus : float
        Only used to convert to field and medium variables.
    stride : int
        Record every ``stride``-th step (plus ``tau = 0``).
    """
    sigma = float(sign) if isinstance(sign, (int, float)) else _sign(sign)
    if sigma not in (1.0, -1.0):
        raise ValueError("sign must be +1 or -1")
    if n_points < 2 or l <= 0 or tau_end <= 0:
        raise ValueError("need l > 0, tau_end > 0 and at least two nodes")
    xi = np.linspace(0.0, l, n_points)
    h = xi[1] - xi[0]
    src = inflow if callable(inflow) else (lambda _t, v=float(inflow): v)
    th = np.broadcast_to(np.asarray(theta0, dtype=float), (n_points,)).copy()
    Th = np.broadcast_to(np.asarray(Theta0, dtype=float), (n_points,)).copy()
    nsteps = int(math.ceil(tau_end / h - 1e-9))
    Th[0] = src(0.0)
    taus, thetas, Thetas = [0.0], [th.copy()], [Th.copy()]
    for k in range(nsteps):
        t = k * h
        Th[0] = src(t)
        th, Th = _area_rk4(th, Th, sigma, 0.5 * h)
        Th[1:] = Th[:-1].copy()
        Th[0] = src(t + h)
        th, Th = _area_rk4(th, Th, sigma, 0.5 * h)
        Th[0] = src(t + h)
        if not (np.all(np.isfinite(th)) and np.all(np.isfinite(Th))):
            bad = int(np.argmin(np.isfinite(th) & np.isfinite(Th)))
            raise InstabilityError(bad, t + h)
        if (k + 1) % stride == 0:
            taus.append((k + 1) * h)
            thetas.append(th.copy())
            Thetas.append(Th.copy())
    return AreaSolution(xi, np.array(taus), np.array(thetas), np.array(Thetas), sigma, gamma_minus)


def count_pulses(signal: np.ndarray, rel_height: float = 0.1) -> int:
    """Number of separated local maxima above ``rel_height`` of the global maximum."""
    from scipy.signal import find_peaks

    s = np.asarray(signal, dtype=float)
    if s.max() <= 0:
        return 0
    peaks, _ = find_peaks(s, height=rel_height * s.max(), prominence=rel_height * s.max())
    return len(peaks)
