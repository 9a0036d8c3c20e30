"""Experiment configuration: strict YAML/JSON loading into dataclasses."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any, Optional

import yaml

from . import dispersion as disp
from .counting import LossBudget, SourceModel
from .errors import ConfigError
from .optics import CollectionGeometry, FilterSpec
from .phasematch import AcceptanceWindow, CrystalCut, solve_degenerate_cut_angle
from .spectrum import GridSpec, PumpPulse

REQUIRED_FILTERS = ("F1", "F1_wide", "F2", "F2_narrow", "F2_scan", "F3")


def _tuplify(x):
    if isinstance(x, list):
        return tuple(_tuplify(v) for v in x)
    return x


def _build(cls, data, where: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: expected a mapping, got {type(data).__name__}")
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(data) - names)
    if unknown:
        raise ConfigError(f"{where}.{unknown[0]}: unknown key")
    try:
        return cls(**{k: _tuplify(v) for k, v in data.items()})
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _plain(obj):
    if dataclasses.is_dataclass(obj):
        return {f.name: _plain(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    return obj


@dataclass(frozen=True)
class CrystalConfig:
    sellmeier_set: str = disp.DEFAULT_SET.id
    thickness_mm: float = 0.7
    cut_angle_deg: Optional[float] = None
    calibration_cone_angle_deg: float = 4.5


@dataclass(frozen=True)
class SellmeierConfig:
    ordinary: tuple
    extraordinary: tuple
    valid_range: tuple = (200.0, 1100.0)


@dataclass(frozen=True)
class TuningConfig:
    pump_wavelengths: tuple = (389.0, 390.0, 391.0)
    signal_range: tuple = (680.0, 880.0)
    n_samples: int = 201
    pump_range: tuple = (389.0, 391.0)


@dataclass(frozen=True)
class RatesConfig:
    trigger_hz: float = 3068.0
    coincidence_matched_hz: float = 139.0
    coincidence_wide_hz: float = 949.0


@dataclass(frozen=True)
class SimulateConfig:
    duration_s: float = 10.0


@dataclass(frozen=True)
class SpectrometerConfig:
    tilt_range: tuple = (0.0, 30.0)
    n_steps: int = 121


@dataclass(frozen=True)
class InterferenceConfig:
    filter_shape: str = "gaussian"
    delay_range_fs: tuple = (-1000.0, 1000.0)
    n_delays: int = 201
    hom_wing_counts: float = 19500.0
    hom_bin_s: float = 10.0
    rt_target_visibility: float = 0.78
    rt_mean_photon_number: float = 0.05
    rt_wing_counts: float = 100.0
    rt_bin_s: float = 600.0
    coherent_center_nm: float = 780.0
    coherent_duration_fs: float = 150.0


@dataclass(frozen=True)
class ExperimentConfig:
    seed: int = 0
    crystal: CrystalConfig = field(default_factory=CrystalConfig)
    sellmeier_sets: dict = field(default_factory=dict)
    pump: PumpPulse = field(default_factory=PumpPulse)
    geometry: CollectionGeometry = field(default_factory=CollectionGeometry)
    window: AcceptanceWindow = field(default_factory=AcceptanceWindow)
    tuning: TuningConfig = field(default_factory=TuningConfig)
    filters: dict = field(default_factory=dict)
    budget: LossBudget = field(default_factory=LossBudget)
    rates: RatesConfig = field(default_factory=RatesConfig)
    source: SourceModel = field(default_factory=SourceModel)
    simulate: SimulateConfig = field(default_factory=SimulateConfig)
    grid: GridSpec = field(default_factory=GridSpec)
    spectrometer: SpectrometerConfig = field(default_factory=SpectrometerConfig)
    interference: InterferenceConfig = field(default_factory=InterferenceConfig)

    _SECTIONS = {
        "crystal": CrystalConfig,
        "pump": PumpPulse,
        "geometry": CollectionGeometry,
        "window": AcceptanceWindow,
        "tuning": TuningConfig,
        "rates": RatesConfig,
        "source": SourceModel,
        "simulate": SimulateConfig,
        "grid": GridSpec,
        "spectrometer": SpectrometerConfig,
        "interference": InterferenceConfig,
    }

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("config root must be a mapping")
        allowed = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - allowed)
        if unknown:
            raise ConfigError(f"{unknown[0]}: unknown key")
        kw: dict[str, Any] = {}
        for name, section in cls._SECTIONS.items():
            if name in data:
                kw[name] = _build(section, data[name], name)
        if "seed" in data:
            if not isinstance(data["seed"], int):
                raise ConfigError("seed: must be an integer")
            kw["seed"] = data["seed"]
        kw["sellmeier_sets"] = {
            name: _build(SellmeierConfig, spec, f"sellmeier_sets.{name}")
            for name, spec in (data.get("sellmeier_sets") or {}).items()
        }
        filters = data.get("filters") or {}
        if not isinstance(filters, dict):
            raise ConfigError("filters: expected a mapping")
        kw["filters"] = {name: _build(FilterSpec, spec, f"filters.{name}") for name, spec in filters.items()}
        missing = [n for n in REQUIRED_FILTERS if n not in kw["filters"]]
        if missing:
            raise ConfigError(f"filters.{missing[0]}: required filter missing")
        if "budget" in data:
            try:
                kw["budget"] = LossBudget(tuple((str(a), float(b)) for a, b in data["budget"]))
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"budget: {exc}") from exc
        cfg = cls(**kw)
        cfg.sellmeier()  # resolve the set id now so bad names fail at load time
        if cfg.interference.filter_shape not in ("top-hat", "gaussian"):
            raise ConfigError("interference.filter_shape: must be top-hat or gaussian")
        return cfg

    def to_dict(self) -> dict:
        out = {}
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if f.name == "budget":
                out["budget"] = [[label, t] for label, t in value.entries]
            else:
                out[f.name] = _plain(value)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def sellmeier(self) -> disp.SellmeierSet:
        name = self.crystal.sellmeier_set
        if name in self.sellmeier_sets:
            s = self.sellmeier_sets[name]
            try:
                return disp.SellmeierSet(name, s.ordinary, s.extraordinary, s.valid_range)
            except ValueError as exc:
                raise ConfigError(f"sellmeier_sets.{name}: {exc}") from exc
        if name in disp.BUILTIN_SETS:
            return disp.BUILTIN_SETS[name]
        raise ConfigError(f"crystal.sellmeier_set: unknown set {name!r}")

    def cut(self) -> CrystalCut:
        c = self.crystal
        angle = c.cut_angle_deg
        if angle is None:
            angle = solve_degenerate_cut_angle(self.pump.center_wavelength, c.calibration_cone_angle_deg, self.sellmeier())
        return CrystalCut(angle, c.thickness_mm)

    def interference_filter(self, name: str) -> FilterSpec:
        return dataclasses.replace(self.filters[name], shape=self.interference.filter_shape)

    def with_overrides(self, seed: Optional[int] = None, grid_scale: Optional[float] = None) -> "ExperimentConfig":
        cfg = self
        if seed is not None:
            cfg = dataclasses.replace(cfg, seed=int(seed))
        if grid_scale is not None and grid_scale != 1:
            cfg = dataclasses.replace(cfg, grid=cfg.grid.scaled(grid_scale))
        return cfg


def load_config(path: Optional[str | Path] = None) -> ExperimentConfig:
    """Load a YAML (or JSON) experiment file; ``None`` loads the reference setup."""
    if path is None:
        text = resources.files("heraldpdc").joinpath("data/reference.yaml").read_text()
    else:
        text = Path(path).read_text()
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"config is not valid YAML: {exc}") from exc
    return ExperimentConfig.from_dict(data)


def reference_config() -> ExperimentConfig:
    return load_config(None)
