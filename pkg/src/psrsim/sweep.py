"""One-axis parameter sweeps over independent runs."""
from __future__ import annotations

import logging
import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .config import emit_config, with_value
from .conservation import report
from .io import SeriesWriter, write_conservation, write_rows, write_snapshots
from .solver import InstabilityError, Scenario, delay_time, peak_flux, released_fraction, run

log = logging.getLogger(__name__)

SUMMARY_HEADER = ("index", "value", "peak_flux_W_mm2", "delay_ns", "released_fraction", "status", "error")


@dataclass(frozen=True)
class SweepRow:
    index: int
    value: float
    peak_flux: float = math.nan
    delay_ns: float = math.nan
    released: float = math.nan
    status: str = "ok"
    error: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def as_tuple(self) -> tuple:
        return (self.index, self.value, self.peak_flux, self.delay_ns, self.released, self.status, self.error)


def run_to_dir(s: Scenario, directory: str | os.PathLike):
    """Run ``s`` streaming outputs into ``directory``; returns the record."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    (out / "config_resolved.txt").write_text(emit_config(s))
    d = s.derived()
    with SeriesWriter(out / "series.csv", d, s.l) as sink:
        try:
            rec = run(s, sink=sink)
        except InstabilityError as exc:
            if exc.record is not None:
                write_snapshots(exc.record, out)
            raise
    write_snapshots(rec, out)
    if len(rec.tau) >= 2:
        write_conservation(report(rec), out / "conservation.csv")
    return rec


def _one(args) -> SweepRow:
    i, base, axis, value, directory = args
    try:
        s = with_value(base, axis, value)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            rec = run_to_dir(s, Path(directory) / f"run_{i:03d}")
        dl = delay_time(rec)
        return SweepRow(i, float(value), peak_flux(rec), math.nan if dl is None else dl,
                        released_fraction(rec))
    except Exception as exc:  # recorded, the sweep goes on
        log.warning("sweep run %d (%s=%r) failed: %s", i, axis, value, exc)
        return SweepRow(i, float(value), status="failed", error=f"{type(exc).__name__}: {exc}")


def sweep(base: Scenario, axis: str, values: Sequence[float], directory: str | os.PathLike,
          workers: int = 1) -> list[SweepRow]:
    """Run ``base`` once per value of ``axis`` and write ``summary.csv``.

    Runs are independent; rows come back in input order whatever the worker
    count.  Failures are recorded in the summary and do not stop the sweep.
    ``axis`` is any numeric configuration key or ``trigger.power`` (both
    trigger powers).
    """
    if values:
        with_value(base, axis, values[0])  # validate the axis early
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    jobs = [(i, base, axis, float(v), str(out)) for i, v in enumerate(values)]
    if workers <= 1 or len(jobs) <= 1:
        rows = [_one(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            rows = list(ex.map(_one, jobs))
    write_rows(SUMMARY_HEADER, (r.as_tuple() for r in rows), out / "summary.csv")
    return rows


__all__ = ["SweepRow", "SUMMARY_HEADER", "run_to_dir", "sweep"]
