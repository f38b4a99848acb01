"""Run configuration: a TOML document, overridable from the command line.

Example::

    baseline_m = 100.0
    species = "sr87"
    np_max = 160000

    [noise]
    phase_uncertainty = 1e-5

    [grid]
    freq_min_hz = 0.3
    freq_max_hz = 10.0
    points = 200
    log = true
"""

from __future__ import annotations

import math
import re
from dataclasses import asdict, dataclass, field, fields, replace

import numpy as np
import tomli
import tomli_w

from .core import AtomSpecies, DomainError, NoiseBudget, get_species


class ConfigError(DomainError):
    """Invalid configuration; ``field`` and ``line`` locate the problem when known."""

    def __init__(self, message, field=None, line=None):
        super().__init__(message)
        self.field = field
        self.line = line

    def to_record(self) -> dict:
        return {"error": "validation", "field": self.field, "line": self.line, "message": str(self)}


@dataclass(frozen=True)
class NoiseConfig:
    loss_per_pulse: float | None = None
    phase_uncertainty: float | None = None
    contrast: float = 1.0
    repetitions: float = 1.0
    initial_atoms: float = 1.0

    def validate(self):
        if (self.loss_per_pulse is None) == (self.phase_uncertainty is None):
            raise ConfigError("set exactly one of noise.loss_per_pulse and noise.phase_uncertainty",
                              field="noise")
        if self.loss_per_pulse is not None and not 0 <= self.loss_per_pulse < 1:
            raise ConfigError("loss per pulse must lie in [0, 1)", field="noise.loss_per_pulse")
        if self.phase_uncertainty is not None and not self.phase_uncertainty > 0:
            raise ConfigError("phase uncertainty must be positive", field="noise.phase_uncertainty")
        if not 0 < self.contrast <= 1:
            raise ConfigError("contrast must lie in (0, 1]", field="noise.contrast")
        if not self.repetitions > 0:
            raise ConfigError("repetitions must be positive", field="noise.repetitions")
        if not self.initial_atoms > 0:
            raise ConfigError("initial atom number must be positive", field="noise.initial_atoms")

    def budget(self) -> NoiseBudget:
        return NoiseBudget(
            loss_lambda=self.loss_per_pulse or 0.0,
            contrast_C=self.contrast,
            repetitions_nu=self.repetitions,
            initial_atoms_N0=self.initial_atoms,
            fixed_phase_uncertainty=self.phase_uncertainty,
        )


@dataclass(frozen=True)
class GridConfig:
    freq_min_hz: float = 0.01
    freq_max_hz: float = 10.0
    points: int = 200
    log: bool = True

    def validate(self):
        if not (self.freq_min_hz > 0 and math.isfinite(self.freq_max_hz)):
            raise ConfigError("grid frequencies must be positive and finite", field="grid.freq_min_hz")
        if self.points < 1:
            raise ConfigError("grid needs at least one point", field="grid.points")
        if self.points > 1 and not self.freq_min_hz < self.freq_max_hz:
            raise ConfigError("grid.freq_min_hz must be below grid.freq_max_hz", field="grid.freq_max_hz")

    def frequencies(self) -> np.ndarray:
        if self.points == 1:
            return np.array([float(self.freq_min_hz)])
        if self.log:
            return np.geomspace(self.freq_min_hz, self.freq_max_hz, self.points)
        return np.linspace(self.freq_min_hz, self.freq_max_hz, self.points)


@dataclass(frozen=True)
class OutputConfig:
    path: str = "-"
    format: str = "csv"
    workers: int = 0  # 0 means one per available core

    def validate(self):
        if self.format not in ("csv", "json"):
            raise ConfigError(f"unknown output format {self.format!r}", field="output.format")
        if self.workers < 0:
            raise ConfigError("workers must be >= 0", field="output.workers")


@dataclass(frozen=True)
class RunConfig:
    baseline_m: float = 100.0
    species: str = "sr87"
    mass_kg: float | None = None
    wavelength_m: float | None = None
    np_max: int = 160_000
    q_max: int = 10_000
    enforce_arm_separation: bool = True
    enforce_even_N: bool = True
    noise: NoiseConfig = field(default_factory=lambda: NoiseConfig(loss_per_pulse=1.1e-3))
    grid: GridConfig = field(default_factory=GridConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    def validate(self) -> RunConfig:
        if not (self.baseline_m > 0 and math.isfinite(self.baseline_m)):
            raise ConfigError("baseline must be positive", field="baseline_m")
        if (self.mass_kg is None) != (self.wavelength_m is None):
            raise ConfigError("mass_kg and wavelength_m must be given together", field="mass_kg")
        if self.mass_kg is not None and not (self.mass_kg > 0 and self.wavelength_m > 0):
            raise ConfigError("mass and wavelength must be positive", field="mass_kg")
        if self.mass_kg is None:
            try:
                get_species(self.species)
            except DomainError as exc:
                raise ConfigError(str(exc), field="species") from None
        if self.np_max < 7:
            raise ConfigError("np_max must be >= 7", field="np_max")
        if self.q_max < 1:
            raise ConfigError("q_max must be >= 1", field="q_max")
        self.noise.validate()
        self.grid.validate()
        self.output.validate()
        return self

    def atom(self) -> AtomSpecies:
        if self.mass_kg is not None:
            return AtomSpecies.from_wavelength(self.species, self.mass_kg, self.wavelength_m)
        return get_species(self.species)

    def to_dict(self) -> dict:
        # TOML has no null, so unset optionals are dropped
        def clean(d):
            return {k: clean(v) if isinstance(v, dict) else v for k, v in d.items() if v is not None}
        return clean(asdict(self))

    def dumps(self) -> str:
        return tomli_w.dumps(self.to_dict())


_SECTIONS = {"noise": NoiseConfig, "grid": GridConfig, "output": OutputConfig}


def _line_of(text, key):
    m = re.search(rf"^\s*{re.escape(key)}\s*=", text, re.M)
    return text.count("\n", 0, m.start()) + 1 if m else None


def _coerce(cls, name, value, prefix, text):
    kinds = {f.name: f.type for f in fields(cls)}
    where = f"{prefix}{name}"
    if name not in kinds:
        raise ConfigError(f"unknown key {where!r}", field=where, line=_line_of(text, name))
    kind = kinds[name]
    ok = True
    if "bool" in kind:
        ok = isinstance(value, bool)
    elif "int" in kind:
        ok = isinstance(value, int) and not isinstance(value, bool)
    elif "float" in kind:
        ok = isinstance(value, (int, float)) and not isinstance(value, bool)
        value = float(value) if ok else value
    elif "str" in kind:
        ok = isinstance(value, str)
    if not ok:
        raise ConfigError(f"{where} has the wrong type ({type(value).__name__})",
                          field=where, line=_line_of(text, name))
    return value


def from_dict(data: dict, text: str = "") -> RunConfig:
    top, sections = {}, {}
    for key, value in data.items():
        if key in _SECTIONS:
            if not isinstance(value, dict):
                raise ConfigError(f"[{key}] must be a table", field=key, line=_line_of(text, key))
            sections[key] = _SECTIONS[key](**{
                k: _coerce(_SECTIONS[key], k, v, f"{key}.", text) for k, v in value.items()})
        else:
            top[key] = _coerce(RunConfig, key, value, "", text)
    return RunConfig(**top, **sections).validate()


def loads(text: str) -> RunConfig:
    try:
        data = tomli.loads(text)
    except tomli.TOMLDecodeError as exc:
        m = re.search(r"line (\d+)", str(exc))
        raise ConfigError(f"malformed config: {exc}", line=int(m.group(1)) if m else None) from None
    return from_dict(data, text)


def load(path) -> RunConfig:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def with_overrides(cfg: RunConfig, **kw) -> RunConfig:
    """Apply non-None overrides; dotted names reach into sections ("grid.points")."""
    top, nested = {}, {}
    for key, value in kw.items():
        if value is None:
            continue
        if "." in key:
            sec, name = key.split(".", 1)
            nested.setdefault(sec, {})[name] = value
        else:
            top[key] = value
    noise = nested.pop("noise", None)
    if noise:
        # choosing one noise mode on the command line switches the other off
        if "phase_uncertainty" in noise and "loss_per_pulse" not in noise:
            noise["loss_per_pulse"] = None
        if "loss_per_pulse" in noise and "phase_uncertainty" not in noise:
            noise["phase_uncertainty"] = None
        top["noise"] = replace(cfg.noise, **noise)
    for sec, values in nested.items():
        top[sec] = replace(getattr(cfg, sec), **values)
    return replace(cfg, **top).validate()
