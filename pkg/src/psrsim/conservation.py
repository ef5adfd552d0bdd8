"""Integrated conservation-law residuals of recorded runs.

Each balance is evaluated at every stored sample.  The time integrals of
the boundary fluxes (and of the stored population, for the tau1 leakage)
use the trapezoid rule over every solver step: a run record carries them
as running columns, so the result does not depend on the series stride.
Plain state lists are integrated over the states given.  The reported
drifts are ``max_k |balance_k| / (tau_K - tau_0)``.

* chirality:  d/dtau int(|eR|^2 - |eL|^2) + [|eR|^2 + |eL|^2]_0^l = 0
* energy:     d/dtau int(r3 + 4(|eR|^2 + |eL|^2)) + 4[|eR|^2 - |eL|^2]_0^l
              = -(1/tau1) int(r3 + 1)
* Bloch norm: |r|^2 constant in every cell when relaxation is off
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.integrate import cumulative_trapezoid

from . import _kernels as K
from .solver import GridState, RunRecord


@dataclass(frozen=True)
class ConservationReport:
    chirality_drift: float
    energy_drift: float
    bloch_norm_drift: float
    worst_cell: int
    energy_leakage: float = 0.0

    def as_row(self) -> dict:
        return {
            "chirality_drift_dimensionless": self.chirality_drift,
            "energy_drift_dimensionless": self.energy_drift,
            "energy_leakage_dimensionless": self.energy_leakage,
            "bloch_norm_drift_dimensionless": self.bloch_norm_drift,
            "worst_cell": self.worst_cell,
        }


@dataclass(frozen=True)
class EnergyBalance:
    """Energy residual and the separately reported tau1 leakage."""

    residual: float
    leakage: float


@dataclass
class _Series:
    tau: np.ndarray
    chirality: np.ndarray
    energy: np.ndarray
    chi_int: np.ndarray      # running int of the chirality boundary flux
    en_int: np.ndarray       # running int of the energy boundary flux
    stored_int: np.ndarray   # running int of int (r3 + 1) dxi
    norm_dev: np.ndarray
    worst: np.ndarray
    inv_tau1: float


def _states_series(states: Sequence[GridState], inv_tau1: float) -> _Series:
    r0 = states[0].r
    n0 = np.asarray(r0.r1) ** 2 + np.asarray(r0.r2) ** 2 + np.asarray(r0.r3) ** 2
    rows = []
    for st in states:
        aR = np.abs(st.eR) ** 2
        aL = np.abs(st.eL) ** 2
        r = st.r
        nr = r.r1 ** 2 + r.r2 ** 2 + r.r3 ** 2
        dev = np.abs(nr - n0)
        rows.append((
            st.tau,
            np.trapezoid(aR - aL, st.xi),
            np.trapezoid(r.r3 + 4.0 * (aR + aL), st.xi),
            (aR[-1] + aL[-1]) - (aR[0] + aL[0]),
            (aR[-1] - aL[-1]) - (aR[0] - aL[0]),
            np.trapezoid(r.r3 + 1.0, st.xi),
            dev.max(),
            int(dev.argmax()),
        ))
    tau, chi, en, chi_f, en_f, stored, dev, worst = (np.array(c) for c in zip(*rows))
    return _Series(tau, chi, en, cumulative_trapezoid(chi_f, tau, initial=0.0),
                   cumulative_trapezoid(en_f, tau, initial=0.0),
                   cumulative_trapezoid(stored, tau, initial=0.0), dev, worst, inv_tau1)


def _series(segment, inv_tau1: float | None = None) -> _Series:
    if isinstance(segment, RunRecord):
        s = segment.series
        it1 = segment.derived.inv_tau1 if inv_tau1 is None else inv_tau1
        out = _Series(s[:, K.COL_TAU], s[:, K.COL_CHIRALITY], s[:, K.COL_ENERGY],
                      s[:, K.COL_CHI_FLUX_INT], s[:, K.COL_EN_FLUX_INT], s[:, K.COL_STORED_INT],
                      s[:, K.COL_NORM_DEV], s[:, K.COL_WORST].astype(int), it1)
    else:
        states = list(segment)
        if len(states) < 2:
            raise ValueError("need at least two consecutive stored states")
        out = _states_series(states, 0.0 if inv_tau1 is None else inv_tau1)
    if len(out.tau) < 2:
        raise ValueError("need at least two consecutive stored states")
    if np.any(np.diff(out.tau) <= 0):
        raise ValueError("stored states must be in increasing time order")
    return out


def _drift(balance: np.ndarray, tau: np.ndarray) -> float:
    return float(np.max(np.abs(balance)) / (tau[-1] - tau[0]))


def chirality_balance(segment) -> np.ndarray:
    """Accumulated chirality balance at every stored sample."""
    s = _series(segment)
    return (s.chirality - s.chirality[0]) + s.chi_int


def chirality(segment) -> float:
    """Chirality drift per unit tau over a record or list of states."""
    s = _series(segment)
    return _drift(chirality_balance(segment), s.tau)


def energy(segment, tau1_infinite: bool | None = None, inv_tau1: float | None = None) -> EnergyBalance:
    """Energy balance residual per unit tau.

    With ``tau1_infinite`` true the raw balance is the residual.  Otherwise
    the accumulated leakage ``-(1/tau1) int int (r3 + 1)`` is subtracted
    first and reported on its own as ``leakage``.  By default the flag
    follows the record's medium (``inv_tau1`` must be given for plain state
    lists with finite tau1).
    """
    s = _series(segment, inv_tau1)
    raw = (s.energy - s.energy[0]) + 4.0 * s.en_int
    leak = -s.inv_tau1 * s.stored_int
    if tau1_infinite is None:
        tau1_infinite = s.inv_tau1 == 0.0
    res = raw if tau1_infinite else raw - leak
    return EnergyBalance(_drift(res, s.tau), _drift(leak, s.tau))


def bloch_norm(segment) -> tuple[float, int]:
    """Largest ``| |r|^2 - |r(0)|^2 |`` over cells and samples, and its cell."""
    s = _series(segment)
    k = int(np.argmax(s.norm_dev))
    return float(s.norm_dev[k]), int(s.worst[k])


def report(segment, inv_tau1: float | None = None) -> ConservationReport:
    s = _series(segment, inv_tau1)
    en = energy(segment, inv_tau1=inv_tau1)
    dev, worst = bloch_norm(segment)
    return ConservationReport(
        chirality_drift=chirality(segment),
        energy_drift=en.residual,
        bloch_norm_drift=dev / (s.tau[-1] - s.tau[0]),
        worst_cell=worst,
        energy_leakage=en.leakage,
    )


def rl_mixing_residual(r1, r2, r3, eR, eL, d) -> float:
    """Largest violation of ``(d_tau + d_xi)|eR|^2 = r1 Im(eR eL) + r2 Re(eR eL)``.

    Checks both movers using the degenerate sources, over arrays of states.
    """
    from .bloch import BlochVector, LocalFields, field_source_degenerate

    sR, sL = field_source_degenerate(BlochVector(r1, r2, r3), LocalFields(eR, eL), d)
    P = np.asarray(eR) * np.asarray(eL)
    target = np.asarray(r1) * P.imag + np.asarray(r2) * P.real
    gR = 2.0 * (np.conj(eR) * sR).real
    gL = 2.0 * (np.conj(eL) * sL).real
    return float(max(np.max(np.abs(gR - target)), np.max(np.abs(gL - target))))
