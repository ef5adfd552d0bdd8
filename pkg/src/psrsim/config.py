"""Flat ``key = value`` configuration files and the named figure presets.

Lines are ``section.key = value``; ``#`` starts a comment.  Every key has a
default except ``medium.n_cm3`` and ``sim.length_cm``.  ``inf`` is accepted
for relaxation times.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable

from .params import FLUX_CONVENTIONS, MediumParams, PH2_EPS_EG, PH2_MU_EE, PH2_MU_GE, PH2_MU_GG
from .solver import VARIANTS, Scenario, TriggerSpec
from .soliton import REGIONS


class ConfigError(ValueError):
    """Bad configuration, naming the offending line and key."""

    def __init__(self, msg: str, key: str | None = None, line: int | None = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key '{key}'")
        super().__init__(f"{', '.join(where)}: {msg}" if where else msg)
        self.key = key
        self.line = line


def _float(s: str) -> float:
    v = float(s)
    if math.isnan(v):
        raise ValueError("NaN is not allowed")
    return v


def _int(s: str) -> int:
    f = float(s)
    if not f.is_integer():
        raise ValueError(f"not an integer: {s}")
    return int(f)


def _opt_int(s: str) -> int | None:
    return None if s.strip().lower() in ("auto", "none", "") else _int(s)


def _opt_float(s: str) -> float | None:
    return None if s.strip().lower() in ("none", "") else _float(s)


def _times(s: str) -> tuple[float, ...]:
    return tuple(_float(x) for x in s.split(",") if x.strip())


def _choice(options) -> Callable[[str], str]:
    def parse(s: str) -> str:
        s = s.strip()
        if s not in options:
            raise ValueError(f"expected one of {tuple(options)}, got {s!r}")
        return s
    return parse


def _bool(s: str) -> bool:
    t = s.strip().lower()
    if t in ("true", "yes", "1", "on"):
        return True
    if t in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {s}")


# key -> (parser, default); None default means required
SCENARIO_KEYS: dict[str, tuple[Callable[[str], object], object]] = {
    "medium.n_cm3": (_float, None),
    "medium.eps_eg_eV": (_float, PH2_EPS_EG),
    "medium.mu_ee": (_float, PH2_MU_EE),
    "medium.mu_gg": (_float, PH2_MU_GG),
    "medium.mu_ge": (_float, PH2_MU_GE),
    "medium.flux_convention": (_choice(FLUX_CONVENTIONS), "envelope"),
    "relax.T1_ns": (_float, 1e3),
    "relax.T2_ns": (_float, 10.0),
    "sim.length_cm": (_float, None),
    "sim.grid_points": (_opt_int, None),
    "sim.t_end_ns": (_float, 10.0),
    "sim.variant": (_choice(VARIANTS), "degenerate"),
    "sim.omega1_eV": (_opt_float, None),
    "sim.check_resolution": (_bool, True),
    "trigger.power_left_W_mm2": (_float, 0.0),
    "trigger.power_right_W_mm2": (_float, 0.0),
    "trigger.phase_left_rad": (_float, 0.0),
    "trigger.phase_right_rad": (_float, 0.0),
    "init.p": (_float, 0.5),
    "init.theta0_rad": (_float, 0.0),
    "output.dir": (str.strip, "psr_out"),
    "output.series_stride": (_int, 10),
    "output.snapshot_times_ns": (_times, ()),
}

SOLITON_KEYS: dict[str, tuple[Callable[[str], object], object]] = {
    k: SCENARIO_KEYS[k] for k in (
        "medium.n_cm3", "medium.eps_eg_eV", "medium.mu_ee", "medium.mu_gg", "medium.mu_ge",
        "medium.flux_convention", "relax.T1_ns", "relax.T2_ns", "sim.length_cm", "output.dir")
}
SOLITON_KEYS.update({
    "soliton.total_flux_W_mm2": (_float, None),
    "soliton.region": (_choice(tuple(REGIONS)), "absorber"),
    "soliton.num_points": (_int, 8001),
})


def _lines(text: str):
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value'", line=no)
        key, value = (x.strip() for x in line.split("=", 1))
        yield no, key, value


def parse_values(text: str, keys=SCENARIO_KEYS) -> tuple[dict, dict]:
    """Parse text into typed values and the line number of each key."""
    vals: dict = {}
    where: dict = {}
    for no, key, value in _lines(text):
        if key not in keys:
            raise ConfigError("unknown key", key=key, line=no)
        if key in where:
            raise ConfigError(f"duplicate key (first on line {where[key]})", key=key, line=no)
        try:
            vals[key] = keys[key][0](value)
        except ValueError as exc:
            raise ConfigError(f"cannot parse {value!r}: {exc}", key=key, line=no) from None
        where[key] = no
    return vals, where


def _resolve(vals: dict, where: dict, keys) -> dict:
    out = {}
    for key, (_, default) in keys.items():
        if key in vals:
            out[key] = vals[key]
        elif default is None and key not in ("sim.grid_points", "sim.omega1_eV"):
            raise ConfigError("required key missing", key=key)
        else:
            out[key] = default
    return out


def _medium(v: dict) -> MediumParams:
    return MediumParams(n=v["medium.n_cm3"], eps_eg=v["medium.eps_eg_eV"], mu_ee=v["medium.mu_ee"],
                        mu_gg=v["medium.mu_gg"], mu_ge=v["medium.mu_ge"], T1=v["relax.T1_ns"],
                        T2=v["relax.T2_ns"], flux_convention=v["medium.flux_convention"])


def _blame(exc: Exception, where: dict) -> ConfigError:
    """Attach the most likely key to an invariant violation."""
    msg = str(exc)
    table = [("T1", "relax.T1_ns"), ("T2", "relax.T2_ns"), ("length", "sim.length_cm"),
             ("grid", "sim.grid_points"), ("t_end", "sim.t_end_ns"), ("init_p", "init.p"),
             ("snapshot", "output.snapshot_times_ns"), ("stride", "output.series_stride"),
             ("power_right", "trigger.power_right_W_mm2"), ("trigger", "trigger.power_left_W_mm2"),
             ("omega", "sim.omega1_eV"), ("n must", "medium.n_cm3"), ("n is NaN", "medium.n_cm3"),
             ("eps_eg", "medium.eps_eg_eV"), ("mu_ge", "medium.mu_ge"), ("mu_ee", "medium.mu_ee")]
    for token, key in table:
        if token in msg:
            return ConfigError(msg, key=key, line=where.get(key))
    return ConfigError(msg)


def scenario_from_values(v: dict, where: dict | None = None) -> Scenario:
    where = where or {}
    try:
        trig = TriggerSpec(v["trigger.power_left_W_mm2"], v["trigger.power_right_W_mm2"],
                           v["trigger.phase_left_rad"], v["trigger.phase_right_rad"])
        return Scenario(
            medium=_medium(v), length_cm=v["sim.length_cm"], grid_points=v["sim.grid_points"],
            t_end_ns=v["sim.t_end_ns"], variant=v["sim.variant"], omega1_eV=v["sim.omega1_eV"],
            trigger=trig, init_p=v["init.p"], init_theta0=v["init.theta0_rad"],
            snapshot_times_ns=v["output.snapshot_times_ns"], series_stride=v["output.series_stride"],
            output_dir=v["output.dir"], check_resolution=v["sim.check_resolution"])
    except ValueError as exc:
        raise _blame(exc, where) from None


def parse_config(text: str) -> Scenario:
    """Parse a run configuration into a validated :class:`Scenario`."""
    vals, where = parse_values(text)
    return scenario_from_values(_resolve(vals, where, SCENARIO_KEYS), where)


def scenario_values(s: Scenario) -> dict:
    m = s.medium
    return {
        "medium.n_cm3": m.n, "medium.eps_eg_eV": m.eps_eg, "medium.mu_ee": m.mu_ee,
        "medium.mu_gg": m.mu_gg, "medium.mu_ge": m.mu_ge, "medium.flux_convention": m.flux_convention,
        "relax.T1_ns": m.T1, "relax.T2_ns": m.T2,
        "sim.length_cm": s.length_cm, "sim.grid_points": s.grid_points, "sim.t_end_ns": s.t_end_ns,
        "sim.variant": s.variant, "sim.omega1_eV": s.omega1_eV, "sim.check_resolution": s.check_resolution,
        "trigger.power_left_W_mm2": s.trigger.power_left, "trigger.power_right_W_mm2": s.trigger.power_right,
        "trigger.phase_left_rad": s.trigger.phase_left, "trigger.phase_right_rad": s.trigger.phase_right,
        "init.p": s.init_p, "init.theta0_rad": s.init_theta0,
        "output.dir": s.output_dir, "output.series_stride": s.series_stride,
        "output.snapshot_times_ns": s.snapshot_times_ns,
    }


def _fmt(v) -> str:
    if v is None:
        return "none"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, tuple):
        return ", ".join(repr(float(x)) for x in v)
    return str(v)


def emit_values(v: dict) -> str:
    return "".join(f"{k} = {_fmt(x)}\n" for k, x in v.items())


def emit_config(s: Scenario) -> str:
    """Fully resolved configuration text; ``parse_config`` inverts it."""
    return emit_values(scenario_values(s))


# ---------------------------------------------------------------------------
# soliton jobs


@dataclass(frozen=True)
class SolitonJob:
    medium: MediumParams
    length_cm: float
    total_flux: float          # |E_R|^2 + |E_L|^2 in W/mm^2
    region: str = "absorber"
    num_points: int = 8001
    output_dir: str = "psr_out"

    def __post_init__(self) -> None:
        if not (self.length_cm > 0 and math.isfinite(self.length_cm)):
            raise ValueError("length must be positive")
        if not (self.total_flux > 0 and math.isfinite(self.total_flux)):
            raise ValueError("total flux must be positive")
        if self.region not in REGIONS:
            raise ValueError(f"region must be one of {tuple(REGIONS)}")
        if self.num_points < 16:
            raise ValueError("num_points must be >= 16")


def soliton_from_values(v: dict, where: dict | None = None) -> SolitonJob:
    where = where or {}
    try:
        return SolitonJob(_medium(v), v["sim.length_cm"], v["soliton.total_flux_W_mm2"],
                          v["soliton.region"], v["soliton.num_points"], v["output.dir"])
    except ValueError as exc:
        raise _blame(exc, where) from None


def parse_soliton_config(text: str) -> SolitonJob:
    vals, where = parse_values(text, SOLITON_KEYS)
    return soliton_from_values(_resolve(vals, where, SOLITON_KEYS), where)


def soliton_values(j: SolitonJob) -> dict:
    m = j.medium
    return {
        "medium.n_cm3": m.n, "medium.eps_eg_eV": m.eps_eg, "medium.mu_ee": m.mu_ee,
        "medium.mu_gg": m.mu_gg, "medium.mu_ge": m.mu_ge, "medium.flux_convention": m.flux_convention,
        "relax.T1_ns": m.T1, "relax.T2_ns": m.T2, "sim.length_cm": j.length_cm,
        "output.dir": j.output_dir, "soliton.total_flux_W_mm2": j.total_flux,
        "soliton.region": j.region, "soliton.num_points": j.num_points,
    }


# ---------------------------------------------------------------------------
# presets (literal figure values)

PRESETS: dict[str, dict[str, object]] = {
    # symmetric 1 MW/mm^2 CW trigger, complete inversion, 30 cm
    "fig2": {"medium.n_cm3": 1e21, "sim.length_cm": 30.0, "relax.T2_ns": 10.0, "relax.T1_ns": 1e3,
             "init.p": 1.0, "trigger.power_left_W_mm2": 1e6, "trigger.power_right_W_mm2": 1e6,
             "sim.t_end_ns": 150.0},
    # r1 = 1, symmetric trigger, 30 cm
    "fig3": {"medium.n_cm3": 1e21, "sim.length_cm": 30.0, "relax.T2_ns": 10.0, "relax.T1_ns": 1e3,
             "init.p": 0.5, "trigger.power_left_W_mm2": 1.0, "trigger.power_right_W_mm2": 1.0,
             "sim.t_end_ns": 10.0},
    # solid density, 2 cm, 1 uW/mm^2, r3 = -0.99 (0.5 % excitation)
    "fig10": {"medium.n_cm3": 2.6e22, "sim.length_cm": 2.0, "relax.T2_ns": 10.0, "relax.T1_ns": 1e3,
              "init.p": 0.005, "trigger.power_left_W_mm2": 1e-6, "trigger.power_right_W_mm2": 1e-6,
              "sim.t_end_ns": 5.0},
    # linear regime, 1.5 m, 1 mW/mm^2, (r3, r1, r2) = (0, 1, 0)
    "fig11": {"medium.n_cm3": 1e20, "sim.length_cm": 150.0, "relax.T2_ns": 10.0, "relax.T1_ns": 1e3,
              "init.p": 0.5, "trigger.power_left_W_mm2": 1e-3, "trigger.power_right_W_mm2": 1e-3,
              "sim.t_end_ns": 50.0},
    # helical absorber soliton
    "soliton12": {"medium.n_cm3": 2.6e22, "relax.T2_ns": 20.0, "relax.T1_ns": 1e3,
                  "sim.length_cm": 5.0, "soliton.total_flux_W_mm2": 2e6, "soliton.region": "absorber"},
}

# the other initial states shown with fig11, as excited fractions p
FIG11_POLARIZATIONS = {
    "r1": 0.5,
    "r3+": 0.5 * (1.0 + 1.0 / math.sqrt(2.0)),
    "r3-": 0.5 * (1.0 - 1.0 / math.sqrt(2.0)),
}
# the fig10 inset: r3 = -0.996 (0.2 % excitation)
FIG10_INSET_P = 0.002

SOLITON_PRESETS = ("soliton12",)


def _apply_overrides(name: str, overrides: dict[str, str] | None, keys) -> tuple[dict, dict]:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {tuple(PRESETS)}")
    vals = dict(PRESETS[name])
    if overrides:
        text = "".join(f"{k} = {v}\n" for k, v in overrides.items())
        extra, _ = parse_values(text, keys)
        vals.update(extra)
    return _resolve(vals, {}, keys), {}


def preset(name: str, overrides: dict[str, str] | None = None) -> Scenario:
    """Dynamical preset merged with textual ``overrides``."""
    if name in SOLITON_PRESETS:
        raise ConfigError(f"{name} is a soliton preset; use soliton_preset")
    v, where = _apply_overrides(name, overrides, SCENARIO_KEYS)
    return scenario_from_values(v, where)


def soliton_preset(name: str = "soliton12", overrides: dict[str, str] | None = None) -> SolitonJob:
    if name not in SOLITON_PRESETS:
        raise ConfigError(f"{name} is not a soliton preset")
    v, where = _apply_overrides(name, overrides, SOLITON_KEYS)
    return soliton_from_values(v, where)


# ---------------------------------------------------------------------------
# sweep axes

SWEEP_AXES = tuple(k for k, (p, _) in SCENARIO_KEYS.items() if p in (_float, _opt_int, _int, _opt_float)
                   and not k.startswith("output."))


def with_value(s: Scenario, key: str, value: float) -> Scenario:
    """Copy of ``s`` with one numeric key changed.

    ``trigger.power`` sets both trigger powers.
    """
    if key == "trigger.power":
        return replace(s, trigger=replace(s.trigger, power_left=float(value), power_right=float(value)))
    if key not in SWEEP_AXES:
        raise ConfigError(f"not a sweepable numeric key; choose from {SWEEP_AXES + ('trigger.power',)}", key=key)
    v = scenario_values(s)
    parser = SCENARIO_KEYS[key][0]
    v[key] = parser(repr(value) if isinstance(value, float) else str(value))
    return scenario_from_values(v)
