"""Run configuration: a strict TOML schema mirroring the library modules.

Unknown keys are rejected so typos in experiment definitions fail loudly;
range violations name the offending field and its bound.  ``serialize_config``
emits the resolved configuration (defaults applied, snapshot interval
rounded), so parse(serialize(cfg)) reproduces cfg exactly and the
configuration hash is stable.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

try:  # python >= 3.11
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - environment dependent
    import tomli as tomllib

from .dynamics import MODELS, ModelParams
from .spectral import (
    Grid,
    RealField,
    constant_field,
    field_from_modes,
    zero_field,
)
from .stepping import SCHEMES, StepperConfig

__all__ = [
    "ConfigError",
    "InitialCondition",
    "OutputConfig",
    "ExperimentConfig",
    "RunConfig",
    "parse_config",
    "parse_config_file",
    "serialize_config",
    "config_sections",
    "config_hash",
    "build_initial_condition",
]


class ConfigError(ValueError):
    """A configuration document failed validation."""


IC_KINDS = ("zero", "constant", "modes", "file")
OUTPUT_FORMATS = ("csv", "fld")


@dataclass(frozen=True)
class InitialCondition:
    kind: str = "zero"
    value: float = 0.0
    modes: tuple[tuple[int, float, float], ...] = ()
    path: str = ""


@dataclass(frozen=True)
class OutputConfig:
    directory: str = "runs"
    formats: tuple[str, ...] = ("csv", "fld")


@dataclass(frozen=True)
class ExperimentConfig:
    eps_values: tuple[float, ...] = (0.2, 0.1, 0.05, 0.025)
    delta_values: tuple[float, ...] = (0.5, 0.25, 0.125, 0.0625)
    tau_star: float = 1.0
    gamma: float = 1.0
    m: float = 10.0
    modes: tuple[int, ...] = (2, 3, 4)
    amplitude: float = 1e-8
    slope_threshold: float = 0.9
    dispersion_tolerance: float = 0.01


@dataclass(frozen=True)
class RunConfig:
    model: ModelParams
    grid: Grid
    stepper: StepperConfig
    initial_condition: InitialCondition = field(default_factory=InitialCondition)
    outputs: OutputConfig = field(default_factory=OutputConfig)
    experiment: ExperimentConfig = field(default_factory=ExperimentConfig)


_SCHEMA: dict[str, tuple[str, ...]] = {
    "model": ("name", "alpha", "epsilon", "delta", "law"),
    "grid": ("L", "N"),
    "stepper": ("dt", "scheme", "t_end", "snapshot_every"),
    "initial_condition": ("kind", "value", "modes", "path"),
    "outputs": ("directory", "formats"),
    "experiment": (
        "eps_values",
        "delta_values",
        "tau_star",
        "gamma",
        "m",
        "modes",
        "amplitude",
        "slope_threshold",
        "dispersion_tolerance",
    ),
}


def _reject_unknown(doc: Mapping[str, Any]) -> None:
    for section, body in doc.items():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        if not isinstance(body, Mapping):
            raise ConfigError(f"[{section}] must be a table of keys")
        for key in body:
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key {section}.{key}")


def _number(doc: Mapping[str, Any], section: str, key: str, default=None) -> Any:
    body = doc.get(section, {})
    if key not in body:
        return default
    value = body[key]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{section}.{key} must be a number")
    return float(value)


def _integer(doc: Mapping[str, Any], section: str, key: str, default=None) -> Any:
    body = doc.get(section, {})
    if key not in body:
        return default
    value = body[key]
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{section}.{key} must be an integer")
    return int(value)


def _string(doc: Mapping[str, Any], section: str, key: str, default=None) -> Any:
    body = doc.get(section, {})
    if key not in body:
        return default
    value = body[key]
    if not isinstance(value, str):
        raise ConfigError(f"{section}.{key} must be a string")
    return value


def _number_list(doc: Mapping[str, Any], section: str, key: str, default=()) -> tuple:
    body = doc.get(section, {})
    if key not in body:
        return tuple(default)
    value = body[key]
    if not isinstance(value, list) or any(
        isinstance(v, bool) or not isinstance(v, (int, float)) for v in value
    ):
        raise ConfigError(f"{section}.{key} must be an array of numbers")
    return tuple(float(v) for v in value)


def _require(doc: Mapping[str, Any], section: str, key: str) -> None:
    if key not in doc.get(section, {}):
        raise ConfigError(f"{section}.{key} is required")


def _parse_model(doc: Mapping[str, Any]) -> ModelParams:
    _require(doc, "model", "name")
    name = _string(doc, "model", "name")
    if name not in MODELS:
        raise ConfigError(f"model.name must be one of {MODELS}, got {name!r}")
    alpha = _number(doc, "model", "alpha")
    epsilon = _number(doc, "model", "epsilon", 0.0)
    delta = _number(doc, "model", "delta")
    law = _string(doc, "model", "law", "full")
    if law not in ("full", "simplified"):
        raise ConfigError(f"model.law must be 'full' or 'simplified', got {law!r}")
    if epsilon < 0:
        raise ConfigError("model.epsilon must be nonnegative")
    if name == "graph_mollified" and (delta is None or not delta > 0):
        raise ConfigError("model.delta must be positive for model.name = 'graph_mollified'")
    if alpha is None and name in ("ks", "graph", "graph_mollified"):
        raise ConfigError(f"model.alpha is required for model.name = {name!r}")
    try:
        return ModelParams(model=name, alpha=alpha, epsilon=epsilon, delta=delta, law=law)
    except ValueError as exc:
        raise ConfigError(f"model: {exc}") from exc


def _parse_grid(doc: Mapping[str, Any]) -> Grid:
    _require(doc, "grid", "L")
    _require(doc, "grid", "N")
    length = _number(doc, "grid", "L")
    n = _integer(doc, "grid", "N")
    if n is None:
        raise ConfigError("grid.N must be an integer")
    if not length > 0:
        raise ConfigError("grid.L must be positive")
    if n % 2 != 0 or n < 8:
        raise ConfigError(f"grid.N must be even and >= 8, got {n}")
    return Grid(length, n)


def _parse_stepper(doc: Mapping[str, Any]) -> StepperConfig:
    _require(doc, "stepper", "dt")
    _require(doc, "stepper", "t_end")
    dt = _number(doc, "stepper", "dt")
    t_end = _number(doc, "stepper", "t_end")
    scheme = _string(doc, "stepper", "scheme", "etdrk4")
    snap = _number(doc, "stepper", "snapshot_every")
    if scheme not in SCHEMES:
        raise ConfigError(f"stepper.scheme must be one of {SCHEMES}, got {scheme!r}")
    if not dt > 0:
        raise ConfigError("stepper.dt must be positive")
    if not t_end > 0:
        raise ConfigError("stepper.t_end must be positive")
    try:
        return StepperConfig(dt=dt, scheme=scheme, t_end=t_end, snapshot_every=snap)
    except ValueError as exc:
        raise ConfigError(f"stepper: {exc}") from exc


def _parse_initial_condition(doc: Mapping[str, Any]) -> InitialCondition:
    kind = _string(doc, "initial_condition", "kind", "zero")
    if kind not in IC_KINDS:
        raise ConfigError(
            f"initial_condition.kind must be one of {IC_KINDS}, got {kind!r}"
        )
    value = _number(doc, "initial_condition", "value", 0.0)
    path = _string(doc, "initial_condition", "path", "")
    raw_modes = doc.get("initial_condition", {}).get("modes", [])
    modes: list[tuple[int, float, float]] = []
    if not isinstance(raw_modes, list):
        raise ConfigError("initial_condition.modes must be an array of [p, amplitude, phase]")
    for entry in raw_modes:
        if (
            not isinstance(entry, list)
            or len(entry) != 3
            or isinstance(entry[0], bool)
            or not isinstance(entry[0], int)
            or any(not isinstance(v, (int, float)) for v in entry[1:])
        ):
            raise ConfigError(
                "initial_condition.modes entries must be [integer p, amplitude, phase]"
            )
        modes.append((int(entry[0]), float(entry[1]), float(entry[2])))
    if kind == "file":
        if not path:
            raise ConfigError("initial_condition.path is required for kind = 'file'")
        if not Path(path).exists():
            raise ConfigError(f"initial_condition.path does not exist: {path}")
    if kind == "modes" and not modes:
        raise ConfigError("initial_condition.modes is required for kind = 'modes'")
    return InitialCondition(kind=kind, value=value, modes=tuple(modes), path=path)


def _parse_outputs(doc: Mapping[str, Any]) -> OutputConfig:
    directory = _string(doc, "outputs", "directory", "runs")
    raw = doc.get("outputs", {}).get("formats", list(OUTPUT_FORMATS))
    if not isinstance(raw, list) or any(not isinstance(v, str) for v in raw):
        raise ConfigError("outputs.formats must be an array of strings")
    for fmt in raw:
        if fmt not in OUTPUT_FORMATS:
            raise ConfigError(
                f"outputs.formats entries must be among {OUTPUT_FORMATS}, got {fmt!r}"
            )
    return OutputConfig(directory=directory, formats=tuple(raw))


def _parse_experiment(doc: Mapping[str, Any]) -> ExperimentConfig:
    defaults = ExperimentConfig()
    eps_values = _number_list(doc, "experiment", "eps_values", defaults.eps_values)
    delta_values = _number_list(doc, "experiment", "delta_values", defaults.delta_values)
    tau_star = _number(doc, "experiment", "tau_star", defaults.tau_star)
    gamma = _number(doc, "experiment", "gamma", defaults.gamma)
    m = _number(doc, "experiment", "m", defaults.m)
    amplitude = _number(doc, "experiment", "amplitude", defaults.amplitude)
    slope_threshold = _number(
        doc, "experiment", "slope_threshold", defaults.slope_threshold
    )
    tolerance = _number(
        doc, "experiment", "dispersion_tolerance", defaults.dispersion_tolerance
    )
    raw_modes = doc.get("experiment", {}).get("modes", list(defaults.modes))
    if not isinstance(raw_modes, list) or any(
        isinstance(v, bool) or not isinstance(v, int) for v in raw_modes
    ):
        raise ConfigError("experiment.modes must be an array of integers")

    if len(eps_values) < 3:
        raise ConfigError("experiment.eps_values: need >= 3 epsilon values")
    if any(e <= 0 for e in eps_values):
        raise ConfigError("experiment.eps_values must be positive")
    if any(b >= a for a, b in zip(eps_values, eps_values[1:])):
        raise ConfigError("experiment.eps_values must be strictly decreasing")
    if len(delta_values) < 2:
        raise ConfigError("experiment.delta_values: need >= 2 delta values")
    if any(d <= 0 for d in delta_values):
        raise ConfigError("experiment.delta_values must be positive")
    if any(b >= a for a, b in zip(delta_values, delta_values[1:])):
        raise ConfigError("experiment.delta_values must be strictly decreasing")
    if not tau_star > 0:
        raise ConfigError("experiment.tau_star must be positive")
    if not gamma > 0:
        raise ConfigError("experiment.gamma must be positive")
    if not m > 2:
        raise ConfigError("experiment.m must exceed 2")
    if not 0 < amplitude <= 1e-6:
        raise ConfigError("experiment.amplitude must be in (0, 1e-6]")
    if not tolerance > 0:
        raise ConfigError("experiment.dispersion_tolerance must be positive")
    return ExperimentConfig(
        eps_values=eps_values,
        delta_values=delta_values,
        tau_star=tau_star,
        gamma=gamma,
        m=m,
        modes=tuple(int(p) for p in raw_modes),
        amplitude=amplitude,
        slope_threshold=slope_threshold,
        dispersion_tolerance=tolerance,
    )


def parse_config(text: str) -> RunConfig:
    """Parse and validate a configuration document."""
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    _reject_unknown(doc)
    return RunConfig(
        model=_parse_model(doc),
        grid=_parse_grid(doc),
        stepper=_parse_stepper(doc),
        initial_condition=_parse_initial_condition(doc),
        outputs=_parse_outputs(doc),
        experiment=_parse_experiment(doc),
    )


def parse_config_file(path: str | Path) -> RunConfig:
    return parse_config(Path(path).read_text())


def _toml_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_toml_value(v) for v in value) + "]"
    raise TypeError(f"cannot serialize {type(value)!r}")


def config_sections(cfg: RunConfig) -> dict[str, dict[str, Any]]:
    """The resolved configuration as plain JSON-safe sections."""
    model: dict[str, Any] = {"name": cfg.model.model, "alpha": cfg.model.alpha}
    model["epsilon"] = cfg.model.epsilon
    if cfg.model.delta is not None:
        model["delta"] = cfg.model.delta
    model["law"] = cfg.model.law

    ic: dict[str, Any] = {"kind": cfg.initial_condition.kind}
    if cfg.initial_condition.kind == "constant":
        ic["value"] = cfg.initial_condition.value
    if cfg.initial_condition.modes:
        ic["modes"] = [list(m) for m in cfg.initial_condition.modes]
    if cfg.initial_condition.path:
        ic["path"] = cfg.initial_condition.path

    sections: dict[str, dict[str, Any]] = {
        "model": model,
        "grid": {"L": cfg.grid.L, "N": cfg.grid.N},
        "stepper": {
            "dt": cfg.stepper.dt,
            "scheme": cfg.stepper.scheme,
            "t_end": cfg.stepper.t_end,
            "snapshot_every": cfg.stepper.snapshot_every,
        },
        "initial_condition": ic,
        "outputs": {
            "directory": cfg.outputs.directory,
            "formats": list(cfg.outputs.formats),
        },
        "experiment": {
            "eps_values": list(cfg.experiment.eps_values),
            "delta_values": list(cfg.experiment.delta_values),
            "tau_star": cfg.experiment.tau_star,
            "gamma": cfg.experiment.gamma,
            "m": cfg.experiment.m,
            "modes": list(cfg.experiment.modes),
            "amplitude": cfg.experiment.amplitude,
            "slope_threshold": cfg.experiment.slope_threshold,
            "dispersion_tolerance": cfg.experiment.dispersion_tolerance,
        },
    }
    return sections


def serialize_config(cfg: RunConfig) -> str:
    """Emit the resolved configuration as TOML (round-trips through parse)."""
    lines: list[str] = []
    for section, body in config_sections(cfg).items():
        lines.append(f"[{section}]")
        for key, value in body.items():
            lines.append(f"{key} = {_toml_value(value)}")
        lines.append("")
    return "\n".join(lines)


def config_hash(cfg: RunConfig) -> str:
    return hashlib.sha256(serialize_config(cfg).encode()).hexdigest()


def build_initial_condition(cfg: RunConfig) -> RealField:
    """Materialize the configured initial data on the configured grid."""
    ic = cfg.initial_condition
    if ic.kind == "zero":
        return zero_field(cfg.grid)
    if ic.kind == "constant":
        return constant_field(cfg.grid, ic.value)
    if ic.kind == "modes":
        return field_from_modes(cfg.grid, ic.modes)
    from .fieldio import load_field

    return load_field(ic.path, cfg.grid)
