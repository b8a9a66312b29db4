"""Run configuration documents (YAML) and their translation into model objects.

Grammar
-------
A config is a YAML mapping with these sections; unknown keys are errors::

    name: fig4_top                 # free text, used for the default output name
    model: dots_fermionic          # or qubits_bosonic
    mode: diagonal                 # or coherent
    task: cycle                    # steady | transient | cycle (inferred when omitted)
    baths:
      left:  {temperature: 1.025, strength: 0.05}
      right: {temperature: 0.975, strength: 0.05, nonlinearity: linear}
    system: {e_left: 2.0, e_right: 3.0, coupling: 0.1}      # static, or ...
    drive:                                                  # ... periodic, never both
      omega: 0.005
      coupling: 0.15
      e_left:  {offset: 1.5, amplitude: 0.2, phase: 0.0}
      e_right: {offset: 0.3, amplitude: 1.0, phase: 1.5707963267948966}
    measurement: {gamma_m: 0.08}
    solver: {dt: 0.005, t_end: 50.0, n_grid: 128, base_seed: 0, n_trajectories: 3}
    sweep: {parameter: measurement.gamma_m, start: 0.005, stop: 0.3, points: 60}
    compare:                       # extra columns from modified copies of the config
      nonlinear: {baths.right.nonlinearity: quadratic}
    output: fig4_top.csv

Bath ``strength`` is Gamma_alpha for fermionic (flat) baths and Upsilon_alpha
for bosonic (ohmic) baths, which also need ``cutoff``.
"""

from __future__ import annotations

import copy
import dataclasses
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import yaml

from .baths import BOSONIC, FERMIONIC, FLAT, LINEAR, OHMIC, BathSpec
from .generators import Device
from .system import DriveProtocol, Harmonic, SystemParams

MODELS = {"dots_fermionic": (FERMIONIC, FLAT), "qubits_bosonic": (BOSONIC, OHMIC)}
TASKS = ("steady", "transient", "cycle")
PRESETS = ("fig2", "fig3", "fig4_top", "fig4_bottom", "fig5", "fig7", "fig8")


class ConfigError(ValueError):
    pass


@dataclass
class BathBlock:
    temperature: float = 1.0
    strength: float = 0.0
    cutoff: float | None = None
    nonlinearity: str = LINEAR


@dataclass
class BathsBlock:
    left: BathBlock = field(default_factory=BathBlock)
    right: BathBlock = field(default_factory=BathBlock)


@dataclass
class StaticBlock:
    e_left: float = 0.0
    e_right: float = 0.0
    coupling: float = 0.0


@dataclass
class HarmonicBlock:
    offset: float = 0.0
    amplitude: float = 0.0
    phase: float = 0.0


@dataclass
class DriveBlock:
    omega: float = 0.005
    coupling: float = 0.0
    e_left: HarmonicBlock = field(default_factory=HarmonicBlock)
    e_right: HarmonicBlock = field(default_factory=HarmonicBlock)


@dataclass
class MeasurementBlock:
    gamma_m: float = 0.0


@dataclass
class SolverBlock:
    dt: float = 0.005
    t_end: float = 50.0
    every: int = 20
    n_grid: int = 128
    base_seed: int = 0
    n_trajectories: int = 3
    n_ensemble: int = 0
    initial_state: list | None = None


@dataclass
class SweepBlock:
    parameter: str = ""
    start: float = 0.0
    stop: float = 0.0
    points: int = 2


@dataclass
class RunConfig:
    name: str = "run"
    model: str = "dots_fermionic"
    mode: str = "diagonal"
    task: str | None = None
    baths: BathsBlock = field(default_factory=BathsBlock)
    system: StaticBlock | None = None
    drive: DriveBlock | None = None
    measurement: MeasurementBlock = field(default_factory=MeasurementBlock)
    solver: SolverBlock = field(default_factory=SolverBlock)
    sweep: SweepBlock | None = None
    compare: dict = field(default_factory=dict)
    output: str | None = None

    def __post_init__(self):
        validate(self)

    @property
    def resolved_task(self) -> str:
        if self.task:
            return self.task
        return "cycle" if self.drive is not None else "steady"

    # model objects

    def device(self) -> Device:
        stats, kind = MODELS[self.model]

        def bath(side, b: BathBlock):
            return BathSpec(
                side, stats, b.temperature, kind, b.strength,
                b.cutoff if kind == OHMIC else None, b.nonlinearity,
            )

        return Device(bath("L", self.baths.left), bath("R", self.baths.right), self.measurement.gamma_m, self.mode)

    def params(self) -> SystemParams:
        s = self.system
        return SystemParams(s.e_left, s.e_right, s.coupling)

    def protocol(self) -> DriveProtocol:
        d = self.drive
        return DriveProtocol(
            Harmonic(d.e_left.offset, d.e_left.amplitude, d.e_left.phase),
            Harmonic(d.e_right.offset, d.e_right.amplitude, d.e_right.phase),
            d.coupling,
            d.omega,
        )

    # serialization

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def dump(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False, default_flow_style=False)

    def with_value(self, path: str, value) -> RunConfig:
        data = self.to_dict()
        set_path(data, path, value)
        return from_dict(data)

    def sweep_values(self) -> list[float]:
        sw = self.sweep
        if sw.points == 1:
            return [float(sw.start)]
        step = (sw.stop - sw.start) / (sw.points - 1)
        return [sw.start + i * step for i in range(sw.points)]


def validate(cfg: RunConfig):
    if cfg.model not in MODELS:
        raise ConfigError(f"model must be one of {sorted(MODELS)}, got {cfg.model!r}")
    if cfg.mode not in ("diagonal", "coherent"):
        raise ConfigError(f"mode must be 'diagonal' or 'coherent', got {cfg.mode!r}")
    if (cfg.system is None) == (cfg.drive is None):
        raise ConfigError("exactly one of 'system' (static) or 'drive' (periodic) must be given")
    if cfg.task is not None and cfg.task not in TASKS:
        raise ConfigError(f"task must be one of {TASKS}, got {cfg.task!r}")
    task = cfg.resolved_task
    if task == "cycle" and cfg.drive is None:
        raise ConfigError("task 'cycle' needs a 'drive' section")
    if task in ("steady", "transient") and cfg.system is None:
        raise ConfigError(f"task {task!r} needs a static 'system' section")
    if MODELS[cfg.model][1] == OHMIC:
        for side in ("left", "right"):
            c = getattr(cfg.baths, side).cutoff
            if c is None or not c > 0:
                raise ConfigError(f"baths.{side}.cutoff must be positive for {cfg.model}")
    if cfg.baths.left.nonlinearity != LINEAR:
        raise ConfigError("baths.left.nonlinearity: only the right bath may couple non-linearly")
    s = cfg.solver
    if not s.dt > 0 or not s.t_end > 0 or s.every < 1:
        raise ConfigError("solver.dt, solver.t_end must be positive and solver.every >= 1")
    if s.n_grid < 16:
        raise ConfigError("solver.n_grid must be at least 16")
    if s.n_trajectories < 0 or s.n_ensemble < 0:
        raise ConfigError("trajectory counts must be non-negative")
    if s.initial_state is not None and len(s.initial_state) not in (3, 5):
        raise ConfigError("solver.initial_state needs 3 (or 5) components")
    if cfg.sweep is not None:
        sw = cfg.sweep
        if sw.points < 1:
            raise ConfigError("sweep.points must be at least 1")
        if not all(math.isfinite(v) for v in (sw.start, sw.stop)):
            raise ConfigError("sweep range must be finite")
        _check_numeric_path(cfg.to_dict(), sw.parameter)
    if task == "transient" and cfg.sweep is not None:
        raise ConfigError("transient runs take no sweep block")
    try:
        cfg.device()
        cfg.params() if cfg.system is not None else cfg.protocol()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    for label, overrides in cfg.compare.items():
        if not isinstance(overrides, dict):
            raise ConfigError(f"compare.{label} must map parameter paths to values")
        for path in overrides:
            get_path(cfg.to_dict(), path)


def get_path(data: dict, path: str):
    node = data
    for part in path.split("."):
        if not isinstance(node, dict) or part not in node:
            raise ConfigError(f"unknown config field {path!r}")
        node = node[part]
    return node


def set_path(data: dict, path: str, value):
    get_path(data, path)
    *parents, leaf = path.split(".")
    node = data
    for part in parents:
        node = node[part]
    node[leaf] = value


def _check_numeric_path(data: dict, path: str):
    value = get_path(data, path)
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"sweep parameter {path!r} is not a numeric field")


_BLOCKS = {
    RunConfig: {
        "baths": BathsBlock, "system": StaticBlock, "drive": DriveBlock,
        "measurement": MeasurementBlock, "solver": SolverBlock, "sweep": SweepBlock,
    },
    BathsBlock: {"left": BathBlock, "right": BathBlock},
    DriveBlock: {"e_left": HarmonicBlock, "e_right": HarmonicBlock},
}


def _build(cls, data, where: str):
    if not isinstance(data, dict):
        raise ConfigError(f"section {where or 'root'} must be a mapping")
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - known
    if unknown:
        prefix = f"{where}." if where else ""
        raise ConfigError(f"unknown key(s): {', '.join(prefix + k for k in sorted(unknown))}")
    kwargs = {}
    for key, value in data.items():
        sub = _BLOCKS.get(cls, {}).get(key)
        if sub is not None and value is not None:
            value = _build(sub, value, f"{where}.{key}" if where else key)
        kwargs[key] = value
    if cls is RunConfig:
        return cls(**kwargs)
    obj = cls(**kwargs)
    for f in dataclasses.fields(cls):
        v = getattr(obj, f.name)
        if f.type in ("float", "float | None") and v is not None:
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ConfigError(f"{where}.{f.name} must be a number")
            setattr(obj, f.name, float(v))
    return obj


def from_dict(data: dict) -> RunConfig:
    try:
        return _build(RunConfig, copy.deepcopy(data), "")
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def loads(text: str) -> RunConfig:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"config is not valid YAML: {exc}") from exc
    return from_dict(data or {})


def load(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return loads(text)


def preset_text(name: str) -> str:
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; valid presets: {', '.join(PRESETS)}")
    return resources.files("measfridge").joinpath("presets", f"{name}.yaml").read_text()


def preset(name: str) -> RunConfig:
    return loads(preset_text(name))
