"""Flat key=value run configuration: parsing, validation, canonical form.

A config file holds one ``key = value`` per line, ``#`` comments and
blank lines. Unknown keys, bad types, duplicates and invariant
violations are rejected with the offending line number. Every run
artifact embeds the canonical serialization of the effective config and
its SHA-256, so outputs are traceable to the exact settings and two runs
with equal digests and seeds are byte-identical.
"""

from __future__ import annotations

import hashlib
import math
from dataclasses import dataclass, fields, replace

from .energy import EnergyParams
from .plume import PlumeParams, SearchVolume, SourceConfig

__all__ = [
    "VARIANTS",
    "ConfigError",
    "RunConfig",
    "parse_config",
    "parse_config_file",
    "serialize_config",
    "config_digest",
    "apply_override",
]

VARIANTS = ("muc-osl", "col-inf", "col-pf", "adap-pp")


class ConfigError(ValueError):
    """Config rejection carrying the offending key and line number."""

    def __init__(self, message: str, key: str | None = None,
                 line: int | None = None):
        self.key = key
        self.line = line
        prefix = ""
        if line is not None:
            prefix = f"line {line}: "
        super().__init__(prefix + message)


@dataclass(frozen=True)
class RunConfig:
    """Every knob of one simulation run. Field order is the canonical
    serialization order."""

    # plume physics
    release_rate: float = 5.0
    wind_speed: float = 1.0
    diffusivity: float = 1.0
    lifetime: float = 100.0
    sensor_radius: float = 1.0
    sense_interval: float = 1.0
    # search volume and planning grid
    area_x: float = 100.0
    area_y: float = 60.0
    area_z: float = 30.0
    grid_edge: float = 10.0
    # true source
    source_x: float = 10.0
    source_y: float = 30.0
    source_z: float = 25.0
    # swarm
    algo: str = "adap-pp"
    uav_count: int = 3
    comm_radius: float = 50.0
    k_max: int = 800
    declare_spread: float = 5.0
    success_radius: float = 5.0
    fly_speed: float = 1.0
    time_cap: float = 1200.0
    seed: int = 0
    # estimator
    particle_count: int = 100
    particle_min: int = 20
    particle_max: int = 160
    gamma1: float = 1.8
    gamma2: float = 4.0
    cue_window: int = 3
    cov_reg: float = 1e-6
    # planner
    entropy_weight: float = 50.0
    revisit_weight: float = 10.0
    conc_threshold: float | None = None  # None derives from the plume
    step_ceiling: int = 10
    # energy
    fly_power: float = 0.663
    hover_power: float = 0.47
    turn_energy: float = 3.415
    hover_duration: float = 1.0
    cap_coefficient: float = 1e-28
    cycles_per_bit: float = 1000.0
    cpu_freq: float = 1e9
    tx_power: float = 0.25
    tx_rate: float = 1e6
    energy_budget: float = 2000.0
    value_bits: int = 32

    def plume_params(self) -> PlumeParams:
        return PlumeParams(self.release_rate, self.wind_speed,
                           self.diffusivity, self.lifetime,
                           self.sensor_radius, self.sense_interval)

    def volume(self) -> SearchVolume:
        return SearchVolume(self.area_x, self.area_y, self.area_z,
                            self.grid_edge)

    def source(self) -> SourceConfig:
        return SourceConfig(self.source_x, self.source_y, self.source_z)

    def energy_params(self) -> EnergyParams:
        return EnergyParams(self.fly_power, self.hover_power,
                            self.turn_energy, self.hover_duration,
                            self.cap_coefficient, self.cycles_per_bit,
                            self.cpu_freq, self.tx_power, self.tx_rate,
                            self.energy_budget)

    def validate(self, lines: dict[str, int] | None = None) -> None:
        """Raise ConfigError on any invariant violation."""
        lines = lines or {}

        def fail(key: str, message: str) -> None:
            raise ConfigError(f"{key}: {message}", key=key,
                              line=lines.get(key))

        try:
            plume = self.plume_params()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        try:
            volume = self.volume()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        try:
            self.energy_params()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

        if self.algo not in VARIANTS:
            fail("algo", f"must be one of {', '.join(VARIANTS)}")
        if not self.source().inside(volume):
            fail("source_x", "source must lie inside the search volume")
        plume_scale = 2.0 * math.sqrt(self.diffusivity * self.lifetime)
        if not self.grid_edge < plume_scale:
            fail("grid_edge",
                 f"must be below twice the diffusion scale ({plume_scale:g})"
                 " so a plume is not stepped over")
        if self.uav_count < 1:
            fail("uav_count", "need at least one agent")
        if self.comm_radius < 0.0:
            fail("comm_radius", "must be non-negative")
        if self.k_max < 1:
            fail("k_max", "need at least one iteration")
        if self.declare_spread <= 0.0:
            fail("declare_spread", "must be positive")
        if self.success_radius <= 0.0:
            fail("success_radius", "must be positive")
        if self.fly_speed <= 0.0:
            fail("fly_speed", "must be positive")
        if self.time_cap <= 0.0:
            fail("time_cap", "must be positive")
        if self.seed < 0:
            fail("seed", "must be non-negative")
        if not 0 < self.particle_min <= self.particle_count \
                <= self.particle_max:
            fail("particle_count",
                 "need 0 < particle_min <= particle_count <= particle_max")
        if self.gamma1 <= 0.0 or self.gamma2 <= 0.0:
            fail("gamma1", "schedule exponents must be positive")
        if self.cue_window < 1:
            fail("cue_window", "must be at least 1")
        if self.cov_reg <= 0.0:
            fail("cov_reg", "must be positive")
        if self.entropy_weight < 0.0:
            fail("entropy_weight", "must be non-negative")
        if self.revisit_weight < 0.0:
            fail("revisit_weight", "must be non-negative")
        if self.conc_threshold is not None and self.conc_threshold <= 0.0:
            fail("conc_threshold", "must be positive or auto")
        if self.step_ceiling < 1:
            fail("step_ceiling", "must be at least 1")
        if self.value_bits < 1:
            fail("value_bits", "must be at least 1")


_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}
_INT_KEYS = {"uav_count", "k_max", "seed", "particle_count", "particle_min",
             "particle_max", "cue_window", "step_ceiling", "value_bits"}
_STR_KEYS = {"algo"}
_OPTIONAL_FLOAT_KEYS = {"conc_threshold"}


def _parse_value(key: str, raw: str, line: int | None):
    raw = raw.strip()
    if key in _STR_KEYS:
        return raw
    if key in _OPTIONAL_FLOAT_KEYS and raw == "auto":
        return None
    try:
        if key in _INT_KEYS:
            return int(raw)
        return float(raw)
    except ValueError:
        kind = "integer" if key in _INT_KEYS else "number"
        raise ConfigError(f"{key}: expected {kind}, got {raw!r}",
                          key=key, line=line) from None


def parse_config(text: str) -> RunConfig:
    """Parse config text into a validated RunConfig."""
    values: dict[str, object] = {}
    lines: dict[str, int] = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        stripped = raw_line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"expected 'key = value', got {stripped!r}",
                              line=lineno)
        key, _, raw_value = stripped.partition("=")
        key = key.strip()
        if key not in _FIELD_TYPES:
            raise ConfigError(f"unknown key {key!r}", key=key, line=lineno)
        if key in values:
            raise ConfigError(
                f"duplicate key {key!r} (first set on line {lines[key]})",
                key=key, line=lineno)
        values[key] = _parse_value(key, raw_value, lineno)
        lines[key] = lineno
    config = RunConfig(**values)
    config.validate(lines)
    return config


def parse_config_file(path: str) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def serialize_config(config: RunConfig) -> str:
    """Canonical text form: every key in field order, full precision."""
    out = []
    for f in fields(RunConfig):
        value = getattr(config, f.name)
        if value is None:
            rendered = "auto"
        elif isinstance(value, bool):
            rendered = str(int(value))
        elif isinstance(value, float):
            rendered = repr(value)
        else:
            rendered = str(value)
        out.append(f"{f.name} = {rendered}")
    return "\n".join(out) + "\n"


def config_digest(config: RunConfig) -> str:
    return hashlib.sha256(serialize_config(config).encode()).hexdigest()


def apply_override(config: RunConfig, key: str, raw_value: str) -> RunConfig:
    """Override one key (or the composite ``area`` =``XxYxZ``) from text."""
    if key == "area":
        parts = raw_value.lower().split("x")
        if len(parts) != 3:
            raise ConfigError(
                f"area: expected WIDTHxDEPTHxHEIGHT, got {raw_value!r}",
                key="area")
        try:
            dims = [float(p) for p in parts]
        except ValueError:
            raise ConfigError(
                f"area: expected numbers, got {raw_value!r}",
                key="area") from None
        updated = replace(config, area_x=dims[0], area_y=dims[1],
                          area_z=dims[2])
    elif key in _FIELD_TYPES:
        updated = replace(config, **{key: _parse_value(key, raw_value, None)})
    else:
        raise ConfigError(f"unknown key {key!r}", key=key)
    updated.validate()
    return updated
