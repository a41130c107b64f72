"""Scenario files: TOML schema, strict parsing and validation.

A scenario captures the city layout, the per-technology radio
configuration, the traffic model and the energy model.  Unknown keys are
rejected so a typo never silently falls back to a default.
"""

from __future__ import annotations

import hashlib
import json
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .types import (ChannelTimings, ConfigurationError, DEFAULT_RBU,
                    DEFAULT_TIMINGS, DutyCycleConfig, DutyCycleMode,
                    Technology, ValidationError)
from .sim.topology import DEFAULT_EXPONENTS, Environment


@dataclass(frozen=True)
class CityConfig:
    ue_count: int
    n_enb: int = 7
    sectors: int = 3
    inter_site_m: float = 1400.0
    city_radius_m: float = 1500.0
    indoor_ratio: float = 0.5
    urban_radius_m: float | None = None
    suburban_radius_m: float | None = None
    wall_loss_db: float = 15.0
    pl0_db: float = 32.0
    placement_seed: int = 1
    exponent_urban: float = DEFAULT_EXPONENTS[Environment.URBAN]
    exponent_suburban: float = DEFAULT_EXPONENTS[Environment.SUBURBAN]
    exponent_openarea: float = DEFAULT_EXPONENTS[Environment.OPENAREA]

    def exponents(self) -> dict[Environment, float]:
        return {Environment.URBAN: self.exponent_urban,
                Environment.SUBURBAN: self.exponent_suburban,
                Environment.OPENAREA: self.exponent_openarea}


@dataclass(frozen=True)
class RadioConfig:
    n_rb: int
    rbu: int
    bandwidth_hz: float
    dl_freq_mhz: float = 925.0
    ul_freq_mhz: float = 880.0
    enb_tx_dbm: float = 46.0
    ue_tx_dbm: float = 20.0
    noise_figure_db: float = 5.0
    t_pdcch: float = 0.0
    t_pdsch: float = 0.0
    t_pusch: float = 0.0
    t_d: float = 0.0
    t_dus: float = 0.0
    t_uds: float = 0.0
    t_ulack: float = 0.0
    t_dlack: float = 0.0

    def timings(self) -> ChannelTimings:
        return ChannelTimings(self.t_pdcch, self.t_pdsch, self.t_pusch,
                              self.t_d, self.t_dus, self.t_uds,
                              self.t_ulack, self.t_dlack)


@dataclass(frozen=True)
class TrafficConfig:
    reporting_period_s: float
    packet_bytes: int
    n_periods: int = 4
    scheduler: str = "round_robin"
    simultaneous_wakeup: bool = False
    enforce_deadline: bool = True
    core_delay_s: float = 0.020
    retry_cap: int = 8
    perfect_link: bool = False


@dataclass(frozen=True)
class EnergyConfig:
    battery_j: float = 18000.0
    clock_m: float = 0.001
    t_synch_s: float = 0.2
    duty_mode: str = "PSM"
    duty_period_s: float = 86400.0
    paging_window_s: float = 0.0

    def duty(self) -> DutyCycleConfig:
        return DutyCycleConfig(DutyCycleMode(self.duty_mode),
                               self.duty_period_s, self.paging_window_s)


@dataclass(frozen=True)
class Scenario:
    name: str
    city: CityConfig
    radio: dict[Technology, RadioConfig]
    traffic: TrafficConfig
    energy: EnergyConfig

    def radio_for(self, technology: Technology) -> RadioConfig:
        return self.radio[technology]


_REQUIRED = {
    ("city", "ue_count"),
    ("traffic", "reporting_period_s"),
    ("traffic", "packet_bytes"),
}

_RADIO_DEFAULTS = {
    Technology.EMTC: dict(n_rb=6, rbu=6, bandwidth_hz=1.08e6),
    Technology.NBIOT: dict(n_rb=2, rbu=1, bandwidth_hz=180e3),
}


def _build(cls, section: str, data: dict, defaults: dict | None = None):
    known = {f.name for f in fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ConfigurationError(
            f"[{section}]: unknown key(s) {sorted(unknown)}")
    merged = dict(defaults or {})
    merged.update(data)
    for sec, key in _REQUIRED:
        if sec == section and key not in merged:
            raise ConfigurationError(f"[{section}]: missing required "
                                     f"field '{key}'")
    try:
        return cls(**merged)
    except TypeError as exc:
        raise ConfigurationError(f"[{section}]: {exc}") from None


def _radio_config(tech: Technology, data: dict) -> RadioConfig:
    timings = DEFAULT_TIMINGS[tech]
    defaults = dict(_RADIO_DEFAULTS[tech])
    for name in ("t_pdcch", "t_pdsch", "t_pusch", "t_d", "t_dus", "t_uds",
                 "t_ulack", "t_dlack"):
        defaults[name] = getattr(timings, name)
    cfg = _build(RadioConfig, f"radio.{tech.value.lower()}", data, defaults)
    if not cfg.n_rb >= cfg.rbu >= 1:
        raise ValidationError(
            f"radio.{tech.value.lower()}: need n_rb >= rbu >= 1, "
            f"got n_rb={cfg.n_rb}, rbu={cfg.rbu}")
    if cfg.rbu > tech.max_rbu:
        raise ValidationError(
            f"radio.{tech.value.lower()}: rbu={cfg.rbu} exceeds the "
            f"{tech.value} per-UE maximum of {tech.max_rbu}")
    return cfg


def scenario_from_dict(data: dict, name: str = "inline") -> Scenario:
    top_known = {"city", "radio", "traffic", "energy"}
    unknown = set(data) - top_known
    if unknown:
        raise ConfigurationError(f"unknown top-level section(s) "
                                 f"{sorted(unknown)}")
    city = _build(CityConfig, "city", data.get("city", {}))
    if not 0.0 <= city.indoor_ratio <= 1.0:
        raise ValidationError("city.indoor_ratio must be in [0, 1]")
    radio_raw = data.get("radio", {})
    bad = set(radio_raw) - {"emtc", "nbiot"}
    if bad:
        raise ConfigurationError(f"[radio]: unknown subsection(s) "
                                 f"{sorted(bad)}")
    radio = {tech: _radio_config(tech, radio_raw.get(tech.value.lower(), {}))
             for tech in Technology}
    traffic = _build(TrafficConfig, "traffic", data.get("traffic", {}))
    if traffic.scheduler != "round_robin":
        raise ConfigurationError(
            f"traffic.scheduler: only 'round_robin' is supported, "
            f"got {traffic.scheduler!r}")
    if traffic.reporting_period_s <= 0 or traffic.packet_bytes <= 0:
        raise ValidationError("traffic period and packet size must be "
                              "positive")
    if traffic.n_periods < 1 or traffic.retry_cap < 0:
        raise ValidationError("traffic.n_periods must be >= 1 and "
                              "retry_cap >= 0")
    energy = _build(EnergyConfig, "energy", data.get("energy", {}))
    energy.duty()  # validates mode and window
    return Scenario(name=name, city=city, radio=radio, traffic=traffic,
                    energy=energy)


def parse_scenario(path: str | Path) -> Scenario:
    """Load and fully validate a scenario TOML file."""
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigurationError(f"scenario file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigurationError(f"{path}: {exc}") from None
    return scenario_from_dict(data, name=path.stem)


def normalize(scenario: Scenario) -> dict:
    """Canonical plain-dict form, stable across loads of the same file."""
    return {
        "name": scenario.name,
        "city": asdict(scenario.city),
        "radio": {tech.value.lower(): asdict(cfg)
                  for tech, cfg in sorted(scenario.radio.items(),
                                          key=lambda kv: kv[0].value)},
        "traffic": asdict(scenario.traffic),
        "energy": asdict(scenario.energy),
    }


def scenario_hash(scenario: Scenario) -> str:
    blob = json.dumps(normalize(scenario), sort_keys=True).encode()
    return hashlib.sha256(blob).hexdigest()


def default_scenario_path() -> Path:
    from importlib import resources
    return Path(str(resources.files("celliot") / "data"
                    / "table1_default.toml"))


def default_scenario() -> Scenario:
    return parse_scenario(default_scenario_path())
