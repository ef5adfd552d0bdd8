"""Compiled inner loops of the unit-CFL split-step integrator.

State is packed per model into a real array ``U[var, cell]``:

* degenerate   (7 rows): r1 r2 r3 | Re eR, Im eR | Re eL, Im eL
* two-color   (13 rows): r1 r2 r3 | rp1 rp2 rp3 (re, im pairs) | eR | eL
* single mode  (5 rows): r1 r2 r3 | Re eR, Im eR

The local rates come from :mod:`psrsim.bloch` compiled as-is.
"""
from __future__ import annotations

import numba as nb
import numpy as np

from . import bloch

DEGENERATE = 0
TWO_COLOR = 1
SINGLE_MODE = 2

NVARS = {DEGENERATE: 7, TWO_COLOR: 13, SINGLE_MODE: 5}
FIELD_ROWS = {DEGENERATE: (3, 5), TWO_COLOR: (9, 11), SINGLE_MODE: (3, -1)}

# series columns
COL_TAU = 0
COL_R_OUT = 1        # |eR|^2 at xi = l
COL_L_OUT = 2        # |eL|^2 at xi = 0
COL_STORED = 3       # int (r3 + 1) dxi
COL_CHIRALITY = 4    # int (|eR|^2 - |eL|^2) dxi
COL_ENERGY = 5       # int (r3 + 4(|eR|^2 + |eL|^2)) dxi
COL_CHI_FLUX = 6     # (|eR|^2 + |eL|^2) at l minus at 0
COL_EN_FLUX = 7      # (|eR|^2 - |eL|^2) at l minus at 0
COL_NORM_DEV = 8     # max_j | |r_j|^2 - |r_j(0)|^2 |
COL_NORM_MAX = 9     # max_j |r_j|^2
COL_WORST = 10       # argmax of the norm deviation
# running time integrals, trapezoid rule over every step (not just stored rows)
COL_CHI_FLUX_INT = 11
COL_EN_FLUX_INT = 12
COL_STORED_INT = 13
NCOLS = 14

# running-integral state: previous integrands, then the three integrals
ACC_SIZE = 6

_deg = nb.njit(cache=True)(bloch.degenerate_rates)
_two = nb.njit(cache=True)(bloch.two_color_rates)
_one = nb.njit(cache=True)(bloch.single_mode_rates)


@nb.njit(cache=True)
def _src_degenerate(U, p, h):
    gp, gm, it1, it2 = p[0], p[1], p[2], p[3]
    hh = 0.5 * h
    h6 = h / 6.0
    for j in range(U.shape[1]):
        r1 = U[0, j]
        r2 = U[1, j]
        r3 = U[2, j]
        eR = complex(U[3, j], U[4, j])
        eL = complex(U[5, j], U[6, j])
        a1, a2, a3, aR, aL = _deg(r1, r2, r3, eR, eL, gp, gm, it1, it2)
        b1, b2, b3, bR, bL = _deg(r1 + hh * a1, r2 + hh * a2, r3 + hh * a3,
                                  eR + hh * aR, eL + hh * aL, gp, gm, it1, it2)
        c1, c2, c3, cR, cL = _deg(r1 + hh * b1, r2 + hh * b2, r3 + hh * b3,
                                  eR + hh * bR, eL + hh * bL, gp, gm, it1, it2)
        d1, d2, d3, dR, dL = _deg(r1 + h * c1, r2 + h * c2, r3 + h * c3,
                                  eR + h * cR, eL + h * cL, gp, gm, it1, it2)
        U[0, j] = r1 + h6 * (a1 + 2.0 * b1 + 2.0 * c1 + d1)
        U[1, j] = r2 + h6 * (a2 + 2.0 * b2 + 2.0 * c2 + d2)
        U[2, j] = r3 + h6 * (a3 + 2.0 * b3 + 2.0 * c3 + d3)
        eR = eR + h6 * (aR + 2.0 * bR + 2.0 * cR + dR)
        eL = eL + h6 * (aL + 2.0 * bL + 2.0 * cL + dL)
        U[3, j] = eR.real
        U[4, j] = eR.imag
        U[5, j] = eL.real
        U[6, j] = eL.imag


@nb.njit(cache=True)
def _two_at(r1, r2, r3, q1, q2, q3, eR, eL, p):
    return _two(r1, r2, r3, q1, q2, q3, eR, eL,
                p[4], p[5], p[6], p[7], p[8], p[9], p[10], p[11], p[12], p[13],
                p[2], p[3], p[14] != 0.0)


@nb.njit(cache=True)
def _src_two_color(U, p, h):
    hh = 0.5 * h
    h6 = h / 6.0
    for j in range(U.shape[1]):
        r1 = U[0, j]
        r2 = U[1, j]
        r3 = U[2, j]
        q1 = complex(U[3, j], U[4, j])
        q2 = complex(U[5, j], U[6, j])
        q3 = complex(U[7, j], U[8, j])
        eR = complex(U[9, j], U[10, j])
        eL = complex(U[11, j], U[12, j])
        a = _two_at(r1, r2, r3, q1, q2, q3, eR, eL, p)
        b = _two_at(r1 + hh * a[0], r2 + hh * a[1], r3 + hh * a[2], q1 + hh * a[3],
                    q2 + hh * a[4], q3 + hh * a[5], eR + hh * a[6], eL + hh * a[7], p)
        c = _two_at(r1 + hh * b[0], r2 + hh * b[1], r3 + hh * b[2], q1 + hh * b[3],
                    q2 + hh * b[4], q3 + hh * b[5], eR + hh * b[6], eL + hh * b[7], p)
        d = _two_at(r1 + h * c[0], r2 + h * c[1], r3 + h * c[2], q1 + h * c[3],
                    q2 + h * c[4], q3 + h * c[5], eR + h * c[6], eL + h * c[7], p)
        U[0, j] = r1 + h6 * (a[0] + 2.0 * b[0] + 2.0 * c[0] + d[0])
        U[1, j] = r2 + h6 * (a[1] + 2.0 * b[1] + 2.0 * c[1] + d[1])
        U[2, j] = r3 + h6 * (a[2] + 2.0 * b[2] + 2.0 * c[2] + d[2])
        q1 = q1 + h6 * (a[3] + 2.0 * b[3] + 2.0 * c[3] + d[3])
        q2 = q2 + h6 * (a[4] + 2.0 * b[4] + 2.0 * c[4] + d[4])
        q3 = q3 + h6 * (a[5] + 2.0 * b[5] + 2.0 * c[5] + d[5])
        eR = eR + h6 * (a[6] + 2.0 * b[6] + 2.0 * c[6] + d[6])
        eL = eL + h6 * (a[7] + 2.0 * b[7] + 2.0 * c[7] + d[7])
        U[3, j] = q1.real
        U[4, j] = q1.imag
        U[5, j] = q2.real
        U[6, j] = q2.imag
        U[7, j] = q3.real
        U[8, j] = q3.imag
        U[9, j] = eR.real
        U[10, j] = eR.imag
        U[11, j] = eL.real
        U[12, j] = eL.imag


@nb.njit(cache=True)
def _src_single(U, p, h):
    gp, gm, it1, it2 = p[0], p[1], p[2], p[3]
    hh = 0.5 * h
    h6 = h / 6.0
    for j in range(U.shape[1]):
        r1 = U[0, j]
        r2 = U[1, j]
        r3 = U[2, j]
        e = complex(U[3, j], U[4, j])
        a1, a2, a3, ae = _one(r1, r2, r3, e, gp, gm, it1, it2)
        b1, b2, b3, be = _one(r1 + hh * a1, r2 + hh * a2, r3 + hh * a3, e + hh * ae,
                              gp, gm, it1, it2)
        c1, c2, c3, ce = _one(r1 + hh * b1, r2 + hh * b2, r3 + hh * b3, e + hh * be,
                              gp, gm, it1, it2)
        d1, d2, d3, de = _one(r1 + h * c1, r2 + h * c2, r3 + h * c3, e + h * ce,
                              gp, gm, it1, it2)
        U[0, j] = r1 + h6 * (a1 + 2.0 * b1 + 2.0 * c1 + d1)
        U[1, j] = r2 + h6 * (a2 + 2.0 * b2 + 2.0 * c2 + d2)
        U[2, j] = r3 + h6 * (a3 + 2.0 * b3 + 2.0 * c3 + d3)
        e = e + h6 * (ae + 2.0 * be + 2.0 * ce + de)
        U[3, j] = e.real
        U[4, j] = e.imag


@nb.njit(cache=True)
def source_step(U, kind, p, h):
    """Classical RK4 over ``h`` on every cell independently."""
    if kind == DEGENERATE:
        _src_degenerate(U, p, h)
    elif kind == TWO_COLOR:
        _src_two_color(U, p, h)
    else:
        _src_single(U, p, h)


@nb.njit(cache=True)
def shift(U, iR, iL):
    n = U.shape[1]
    for j in range(n - 1, 0, -1):
        U[iR, j] = U[iR, j - 1]
        U[iR + 1, j] = U[iR + 1, j - 1]
    if iL >= 0:
        for j in range(n - 1):
            U[iL, j] = U[iL, j + 1]
            U[iL + 1, j] = U[iL + 1, j + 1]


@nb.njit(cache=True)
def inject(U, iR, iL, bR, bL):
    n = U.shape[1]
    U[iR, 0] = bR.real
    U[iR + 1, 0] = bR.imag
    if iL >= 0:
        U[iL, n - 1] = bL.real
        U[iL + 1, n - 1] = bL.imag


@nb.njit(cache=True)
def first_nonfinite(U):
    nv, n = U.shape
    for j in range(n):
        for v in range(nv):
            if not np.isfinite(U[v, j]):
                return j
    return -1


@nb.njit(cache=True)
def integrands(U, iR, iL, h):
    """Chirality flux, energy flux and stored population of the current state."""
    n = U.shape[1]
    stored = 0.0
    for j in range(n):
        w = h
        if j == 0 or j == n - 1:
            w = 0.5 * h
        stored += w * (U[2, j] + 1.0)
    aR0 = U[iR, 0] ** 2 + U[iR + 1, 0] ** 2
    aRl = U[iR, n - 1] ** 2 + U[iR + 1, n - 1] ** 2
    aL0 = 0.0
    aLl = 0.0
    if iL >= 0:
        aL0 = U[iL, 0] ** 2 + U[iL + 1, 0] ** 2
        aLl = U[iL, n - 1] ** 2 + U[iL + 1, n - 1] ** 2
    return (aRl + aLl) - (aR0 + aL0), (aRl - aLl) - (aR0 - aL0), stored


@nb.njit(cache=True)
def accumulate(U, iR, iL, h, acc):
    c, e, st = integrands(U, iR, iL, h)
    acc[3] += 0.5 * h * (acc[0] + c)
    acc[4] += 0.5 * h * (acc[1] + e)
    acc[5] += 0.5 * h * (acc[2] + st)
    acc[0] = c
    acc[1] = e
    acc[2] = st


@nb.njit(cache=True)
def start_integrals(U, iR, iL, h, acc):
    c, e, st = integrands(U, iR, iL, h)
    acc[0] = c
    acc[1] = e
    acc[2] = st
    acc[3] = 0.0
    acc[4] = 0.0
    acc[5] = 0.0


@nb.njit(cache=True)
def sample(U, iR, iL, h, norm0, row):
    """Fill one series row (all columns except the time)."""
    n = U.shape[1]
    stored = 0.0
    chi = 0.0
    en = 0.0
    dev = 0.0
    nmax = 0.0
    worst = 0
    for j in range(n):
        w = h
        if j == 0 or j == n - 1:
            w = 0.5 * h
        aR = U[iR, j] * U[iR, j] + U[iR + 1, j] * U[iR + 1, j]
        aL = 0.0
        if iL >= 0:
            aL = U[iL, j] * U[iL, j] + U[iL + 1, j] * U[iL + 1, j]
        r3 = U[2, j]
        stored += w * (r3 + 1.0)
        chi += w * (aR - aL)
        en += w * (r3 + 4.0 * (aR + aL))
        nr = U[0, j] * U[0, j] + U[1, j] * U[1, j] + r3 * r3
        dv = abs(nr - norm0[j])
        if dv > dev:
            dev = dv
            worst = j
        if nr > nmax:
            nmax = nr
    aR0 = U[iR, 0] ** 2 + U[iR + 1, 0] ** 2
    aRl = U[iR, n - 1] ** 2 + U[iR + 1, n - 1] ** 2
    aL0 = 0.0
    aLl = 0.0
    if iL >= 0:
        aL0 = U[iL, 0] ** 2 + U[iL + 1, 0] ** 2
        aLl = U[iL, n - 1] ** 2 + U[iL + 1, n - 1] ** 2
    row[COL_R_OUT] = aRl
    row[COL_L_OUT] = aL0
    row[COL_STORED] = stored
    row[COL_CHIRALITY] = chi
    row[COL_ENERGY] = en
    row[COL_CHI_FLUX] = (aRl + aLl) - (aR0 + aL0)
    row[COL_EN_FLUX] = (aRl - aLl) - (aR0 - aL0)
    row[COL_NORM_DEV] = dev
    row[COL_NORM_MAX] = nmax
    row[COL_WORST] = worst


@nb.njit(cache=True)
def advance(U, kind, p, h, iR, iL, bR, bL, nsteps, step0, stride, norm0, series, nrow, acc):
    """Advance ``nsteps`` steps of size ``h``; record every ``stride``-th step.

    ``acc`` carries the running time integrals between calls; an empty
    ``acc`` skips them.

    Returns ``(steps_done, rows_filled, bad_cell)`` where ``bad_cell`` is the
    first cell holding a non-finite value, or -1.
    """
    hh = 0.5 * h
    for s in range(nsteps):
        inject(U, iR, iL, bR, bL)
        source_step(U, kind, p, hh)
        shift(U, iR, iL)
        inject(U, iR, iL, bR, bL)
        source_step(U, kind, p, hh)
        inject(U, iR, iL, bR, bL)
        bad = first_nonfinite(U)
        if bad >= 0:
            return s + 1, nrow, bad
        if acc.shape[0] == ACC_SIZE:
            accumulate(U, iR, iL, h, acc)
        k = step0 + s + 1
        if k % stride == 0 and nrow < series.shape[0]:
            series[nrow, COL_TAU] = k * h
            sample(U, iR, iL, h, norm0, series[nrow])
            if acc.shape[0] == ACC_SIZE:
                series[nrow, COL_CHI_FLUX_INT] = acc[3]
                series[nrow, COL_EN_FLUX_INT] = acc[4]
                series[nrow, COL_STORED_INT] = acc[5]
            nrow += 1
    return nsteps, nrow, -1
