"""CSV writers.  Physical units in the column names; raw internals only in
columns suffixed ``_dimensionless``."""
from __future__ import annotations

import csv
import os
from pathlib import Path
from typing import Iterable

import numpy as np

from . import _kernels as K
from .conservation import ConservationReport
from .params import DerivedParams
from .solver import RunRecord, Snapshot

SERIES_HEADER = (
    "t_ns", "flux_right_out_W_mm2", "flux_left_out_W_mm2", "stored_energy_fraction",
    "tau_dimensionless", "chirality_dimensionless", "energy_dimensionless",
    "bloch_norm_dev_dimensionless",
)


def output_dir(default: str | os.PathLike) -> Path:
    """``$PSRSIM_OUTPUT_DIR`` if set, else ``default``; created if missing."""
    p = Path(os.environ.get("PSRSIM_OUTPUT_DIR") or default)
    p.mkdir(parents=True, exist_ok=True)
    return p


def _writer(fh):
    return csv.writer(fh, quoting=csv.QUOTE_MINIMAL, lineterminator="\n")


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def series_rows(rows: np.ndarray, d: DerivedParams, l: float) -> Iterable[list[str]]:
    for r in rows:
        yield [_fmt(v) for v in (
            d.tau_to_ns(r[K.COL_TAU]), r[K.COL_R_OUT] * d.flux_unit, r[K.COL_L_OUT] * d.flux_unit,
            r[K.COL_STORED] / (2.0 * l), r[K.COL_TAU], r[K.COL_CHIRALITY], r[K.COL_ENERGY],
            r[K.COL_NORM_DEV])]


class SeriesWriter:
    """Streams raw series blocks to ``series.csv``; usable as a run ``sink``."""

    def __init__(self, path: str | os.PathLike, d: DerivedParams, l: float):
        self._fh = open(path, "w", newline="")
        self._w = _writer(self._fh)
        self._w.writerow(SERIES_HEADER)
        self.d, self.l = d, l

    def __call__(self, rows: np.ndarray) -> None:
        self._w.writerows(series_rows(rows, self.d, self.l))

    def close(self) -> None:
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def write_series(record: RunRecord, path: str | os.PathLike) -> None:
    with SeriesWriter(path, record.derived, float(record.xi[-1])) as w:
        w(record.series)


def write_snapshot(snap: Snapshot, d: DerivedParams, path: str | os.PathLike) -> None:
    with open(path, "w", newline="") as fh:
        w = _writer(fh)
        w.writerow(("x_cm", "flux_R_W_mm2", "flux_L_W_mm2", "r1", "r2", "r3"))
        fR = np.abs(snap.eR) ** 2 * d.flux_unit
        fL = np.abs(snap.eL) ** 2 * d.flux_unit
        for row in zip(snap.x_cm, fR, fL, snap.r1, snap.r2, snap.r3):
            w.writerow([_fmt(v) for v in row])


def write_snapshots(record: RunRecord, directory: str | os.PathLike) -> list[Path]:
    out = []
    for snap in record.snapshots:
        p = Path(directory) / f"snapshot_t{snap.t_ns:.6g}ns.csv"
        write_snapshot(snap, record.derived, p)
        out.append(p)
    return out


def write_conservation(rep: ConservationReport, path: str | os.PathLike) -> None:
    row = rep.as_row()
    with open(path, "w", newline="") as fh:
        w = _writer(fh)
        w.writerow(row.keys())
        w.writerow([_fmt(v) for v in row.values()])


def write_table(columns: dict[str, np.ndarray], path: str | os.PathLike) -> None:
    """Columns of equal length, one CSV row per index."""
    with open(path, "w", newline="") as fh:
        w = _writer(fh)
        w.writerow(columns.keys())
        for row in zip(*columns.values()):
            w.writerow([_fmt(v) for v in row])


def write_rows(header: Iterable[str], rows: Iterable[Iterable], path: str | os.PathLike) -> None:
    with open(path, "w", newline="") as fh:
        w = _writer(fh)
        w.writerow(list(header))
        for r in rows:
            w.writerow([_fmt(v) for v in r])


def read_csv(path: str | os.PathLike) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]
