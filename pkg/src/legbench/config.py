"""Flat ``section.key = value`` configuration files.

Every key has a documented default, so an empty file is a complete
configuration. Vector values are whitespace- or comma-separated numbers;
gain matrices may also be written ``diag(a, b, c)`` or as a single scalar.
Lines starting with ``#`` are comments.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .controllers import AtjParams, ControllerModel, RefModelParams, SmcParams, TjParams
from .params import LegGeometry, LegInertial, LegParams, ParameterError
from .sim import DEVIATIONS, AtjSpec, Scenario, SimConfig, SmcSpec, TjSpec
from .trajectory import SwingPathSpec, TrapezoidProfile

CONTROLLER_NAMES = ("SMC", "TJ", "ATJ")


class ConfigError(ValueError):
    pass


class ParseError(ConfigError):
    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


class UnknownKey(ConfigError):
    def __init__(self, key: str, line: int | None = None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(f"{where}unknown key {key!r}")
        self.key = key
        self.line = line


class RangeError(ConfigError):
    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


# key -> (kind, default). kinds: float, int, bool, str, vec3, vec, names
_SCHEMA: dict[str, tuple[str, object]] = {
    "leg.l1": ("float", 0.12),
    "leg.l2": ("float", 0.36),
    "leg.l3": ("float", 0.36),
    "leg.lc1": ("float", 0.060),
    "leg.lc2": ("float", 0.180),
    "leg.lc3": ("float", 0.175),
    "leg.m1": ("float", 0.10),
    "leg.m2": ("float", 0.30),
    "leg.m3": ("float", 0.15),
    "leg.I1": ("float", 1.20e-4),
    "leg.I2": ("float", 3.24e-3),
    "leg.I3": ("float", 1.62e-3),
    "leg.g": ("float", 9.81),
    "path.S": ("float", 0.1),
    "path.H": ("float", 0.05),
    "path.start": ("vec3", (-0.65, 0.12, -0.1)),
    "path.a": ("float", 0.1),
    "path.t_a": ("float", 0.5),
    "path.t_f": ("float", 3.0),
    "path.branch": ("int", -1),
    "smc.lambda": ("vec3", (10.0, 10.0, 10.0)),
    "smc.eta": ("vec3", (10.0, 10.0, 10.0)),
    "smc.K": ("vec3", None),
    "smc.phi": ("float", 0.01),
    "tj.Kp": ("vec3", (700.0, 700.0, 700.0)),
    "tj.Kd": ("vec3", (7.0, 7.0, 7.0)),
    "atj.Gamma_pp": ("vec3", (20000.0, 20000.0, 40000.0)),
    "atj.Gamma_pI": ("vec3", (20000.0, 20000.0, 40000.0)),
    "atj.Gamma_dp": ("vec3", (300.0, 3000.0, 200.0)),
    "atj.Gamma_dI": ("vec3", (300.0, 3000.0, 200.0)),
    "atj.delta_p": ("float", 0.04),
    "atj.delta_d": ("float", 0.04),
    "atj.omega_n": ("float", 100.0),
    "atj.zeta": ("float", 0.9),
    "atj.per_axis": ("bool", False),
    "sim.dt_control": ("float", 1e-3),
    "sim.substeps": ("int", 4),
    "sim.t_end": ("float", 3.0),
    "sim.log_stride": ("int", 1),
    "run.controllers": ("names", CONTROLLER_NAMES),
    "run.deviation": ("vec3", DEVIATIONS[4]),
    "run.uncertainty_pct": ("float", 0.0),
    "sweep.pcts": ("vec", (0.0, 5.0, 10.0, 15.0, 20.0, 25.0)),
    "output.dir": ("str", "legbench_out"),
}

_LINE = re.compile(r"^\s*([A-Za-z_][\w]*(?:\.[A-Za-z_][\w]*)+)\s*=\s*(.*?)\s*$")
_DIAG = re.compile(r"^diag\s*\((.*)\)$", re.IGNORECASE)


def _numbers(text: str) -> list[float]:
    m = _DIAG.match(text)
    if m:
        text = m.group(1)
    parts = [p for p in re.split(r"[\s,]+", text.strip()) if p]
    return [float(p) for p in parts]


def _convert(kind: str, text: str):
    if kind == "float":
        (v,) = _numbers(text)
        return v
    if kind == "int":
        v = float(text)
        if v != int(v):
            raise ValueError(f"expected an integer, got {text!r}")
        return int(v)
    if kind == "bool":
        low = text.lower()
        if low in ("true", "yes", "1", "on"):
            return True
        if low in ("false", "no", "0", "off"):
            return False
        raise ValueError(f"expected a boolean, got {text!r}")
    if kind == "str":
        return text
    if kind == "vec3":
        if text.lower() in ("", "auto", "none"):
            return None
        vals = _numbers(text)
        if len(vals) == 1:
            vals = vals * 3
        if len(vals) != 3:
            raise ValueError(f"expected 1 or 3 numbers, got {len(vals)}")
        return tuple(vals)
    if kind == "vec":
        return tuple(_numbers(text))
    if kind == "names":
        names = tuple(p.upper() for p in re.split(r"[\s,]+", text.strip()) if p)
        for n in names:
            if n not in CONTROLLER_NAMES:
                raise ValueError(f"unknown controller {n!r}")
        if not names:
            raise ValueError("at least one controller required")
        return names
    raise AssertionError(kind)


def _format(kind: str, value) -> str:
    if value is None:
        return "auto"
    if kind in ("float",):
        return repr(float(value))
    if kind in ("vec3", "vec"):
        return " ".join(repr(float(v)) for v in value)
    if kind == "names":
        return " ".join(value)
    if kind == "bool":
        return "true" if value else "false"
    return str(value)


@dataclass(frozen=True)
class RunManifest:
    """Fully resolved configuration: every schema key mapped to its value."""

    values: dict = field(default_factory=lambda: {k: d for k, (_, d) in _SCHEMA.items()})

    def __getitem__(self, key: str):
        return self.values[key]

    @property
    def plant(self) -> LegParams:
        v = self.values
        geom = LegGeometry(**{k: v[f"leg.{k}"] for k in ("l1", "l2", "l3", "lc1", "lc2", "lc3")})
        inertial = LegInertial(**{k: v[f"leg.{k}"] for k in ("m1", "m2", "m3", "I1", "I2", "I3", "g")})
        return LegParams(geom, inertial)

    @property
    def path(self) -> SwingPathSpec:
        v = self.values
        profile = TrapezoidProfile(a=v["path.a"], t_a=v["path.t_a"], t_f=v["path.t_f"])
        return SwingPathSpec.starting_at(
            v["path.start"], S=v["path.S"], H=v["path.H"], profile=profile, geom=self.plant.geom
        )

    @property
    def sim(self) -> SimConfig:
        v = self.values
        return SimConfig(v["sim.dt_control"], v["sim.substeps"], v["sim.t_end"], v["sim.log_stride"])

    def controller(self, name: str):
        v = self.values
        if name == "SMC":
            params = SmcParams(lam=v["smc.lambda"], eta=v["smc.eta"], K=v["smc.K"], phi=v["smc.phi"])
            plant = self.plant
            return SmcSpec(params, ControllerModel(plant.geom, plant.inertial))
        if name == "TJ":
            return TjSpec(TjParams(Kp=v["tj.Kp"], Kd=v["tj.Kd"]))
        if name == "ATJ":
            return AtjSpec(
                AtjParams(
                    Gamma_pp=v["atj.Gamma_pp"],
                    Gamma_pI=v["atj.Gamma_pI"],
                    Gamma_dp=v["atj.Gamma_dp"],
                    Gamma_dI=v["atj.Gamma_dI"],
                    delta_p=v["atj.delta_p"],
                    delta_d=v["atj.delta_d"],
                    dt=v["sim.dt_control"],
                    ref_model=RefModelParams(v["atj.omega_n"], v["atj.zeta"]),
                    per_axis=v["atj.per_axis"],
                )
            )
        raise KeyError(name)

    @property
    def controllers(self) -> tuple[str, ...]:
        return self.values["run.controllers"]

    def scenario(self, name: str) -> Scenario:
        v = self.values
        return Scenario(
            controller=self.controller(name),
            path=self.path,
            deviation=v["run.deviation"],
            uncertainty_pct=v["run.uncertainty_pct"],
            plant=self.plant,
            branch=v["path.branch"],
        )

    @property
    def output_dir(self) -> Path:
        return Path(self.values["output.dir"])

    def dump(self) -> str:
        """Text form that :func:`parse_config` maps back to an equal manifest."""
        lines = []
        for key, (kind, _) in _SCHEMA.items():
            lines.append(f"{key} = {_format(kind, self.values[key])}")
        return "\n".join(lines) + "\n"


def _validate(values: dict):
    """Build every derived object once so range errors surface at load time."""
    m = RunManifest(values)
    try:
        m.plant
    except ParameterError as exc:
        raise RangeError(f"leg.{exc.key}", exc.message) from None
    for section, build in (("path", lambda: m.path), ("sim", lambda: m.sim)):
        try:
            build()
        except ValueError as exc:
            raise RangeError(section, str(exc)) from None
    for name, section in (("SMC", "smc"), ("TJ", "tj"), ("ATJ", "atj")):
        try:
            m.controller(name)
        except ValueError as exc:
            raise RangeError(section, str(exc)) from None
    if values["path.branch"] not in (-1, 1):
        raise RangeError("path.branch", "must be -1 or +1")
    if values["run.uncertainty_pct"] < 0:
        raise RangeError("run.uncertainty_pct", "must be >= 0")
    if any(p < 0 for p in values["sweep.pcts"]):
        raise RangeError("sweep.pcts", "entries must be >= 0")
    return m


def parse_config(text: str) -> RunManifest:
    values = {k: d for k, (_, d) in _SCHEMA.items()}
    seen: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _LINE.match(line)
        if not m:
            raise ParseError(lineno, f"expected 'section.key = value', got {raw.strip()!r}")
        key, val = m.group(1), m.group(2)
        if key not in _SCHEMA:
            raise UnknownKey(key, lineno)
        if key in seen:
            raise ParseError(lineno, f"duplicate key {key!r} (first set on line {seen[key]})")
        seen[key] = lineno
        try:
            values[key] = _convert(_SCHEMA[key][0], val)
        except ValueError as exc:
            raise ParseError(lineno, f"{key}: {exc}") from None
    return _validate(values)


def load_config(path) -> RunManifest:
    """Read and resolve a configuration file; a missing path means all defaults."""
    if path is None:
        return _validate({k: d for k, (_, d) in _SCHEMA.items()})
    return parse_config(Path(path).read_text())


def default_manifest() -> RunManifest:
    return load_config(None)
