"""YAML experiment configuration: loading, validation and echo.

A config file has top-level run settings plus one section per model type
(``environment``, ``hydrophones``, ``fading``, ``layout``, ``receiver``).
Every key is optional and falls back to the shipped study values. The echo
written next to every output is itself a valid config that reproduces the
run.
"""

import dataclasses
import math
from dataclasses import dataclass, replace
from importlib import resources

import numpy as np
import yaml

from .channel import ChannelEnvironment, FadingConfig
from .harness import STUDY_MESSAGE, ExperimentConfig, ReceiverConfig, array_depths
from .modem import FrameLayout
from .waveforms import SCHEMES

TOP_KEYS = {"seed", "n_bits", "schemes", "snr_db", "sweep", "message", "workers",
            "environment", "hydrophones", "fading", "layout", "receiver"}
SECTIONS = {
    "environment": ChannelEnvironment,
    "fading": FadingConfig,
    "layout": FrameLayout,
    "receiver": ReceiverConfig,
}


class ConfigError(ValueError):
    """Invalid config; ``str()`` names the file, line and field when known."""


@dataclass(frozen=True)
class StudyConfig:
    """A base experiment plus the study-level lists around it."""

    base: ExperimentConfig
    schemes: tuple = SCHEMES
    sweep_points: tuple = tuple(np.arange(-12.0, 12.0 + 1e-9, 2.0))
    message: str = STUDY_MESSAGE
    workers: int = 1

    def experiment(self, scheme, snr_points=None):
        cfg = self.base.with_scheme(scheme)
        if snr_points is not None:
            cfg = replace(cfg, snr_points=tuple(snr_points))
        return cfg

    def with_seed(self, seed):
        return replace(self, base=replace(self.base, seed=int(seed)))

    def filter_schemes(self, names):
        return replace(self, schemes=tuple(s for s in self.schemes if s in names))


def default_config_text():
    return resources.files("cwidsim").joinpath("data/study.yaml").read_text()


def _line_of(root, path):
    """1-based line of the YAML node at ``path`` (a tuple of keys), if found."""
    node = root
    for key in path:
        if not isinstance(node, yaml.MappingNode):
            return None
        for k, v in node.value:
            if k.value == key:
                node = v
                break
        else:
            return None
    return node.start_mark.line + 1


def _sweep_points(spec, where):
    if isinstance(spec, list):
        return tuple(float(v) for v in spec)
    if not isinstance(spec, dict) or set(spec) - {"start", "stop", "step"}:
        raise ConfigError(f"{where}: expected a list or a start/stop/step mapping")
    start, stop, step = (float(spec[k]) for k in ("start", "stop", "step"))
    if not step > 0 or stop < start:
        raise ConfigError(f"{where}: need step > 0 and stop >= start")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return tuple(round(start + i * step, 9) for i in range(n))


def _depths(spec, where):
    if spec is None:
        return array_depths()
    if isinstance(spec, list):
        return tuple(float(d) for d in spec)
    if isinstance(spec, dict) and "depths" in spec:
        return tuple(float(d) for d in spec["depths"])
    if isinstance(spec, dict) and set(spec) <= {"first", "spacing", "count"}:
        return array_depths(float(spec.get("first", 8.2)), float(spec.get("spacing", 1.7)),
                            int(spec.get("count", 9)))
    raise ConfigError(f"{where}: expected a depth list or first/spacing/count")


def _number(value):
    # YAML 1.1 reads "1e-4" (no dot) as a string
    if isinstance(value, str):
        try:
            return float(value)
        except ValueError:
            return value
    if isinstance(value, list):
        return [_number(v) for v in value]
    return value


def _section(cls, data, name, locate):
    if data is None:
        return cls()
    if not isinstance(data, dict):
        raise ConfigError(f"{locate((name,))}: section '{name}' must be a mapping")
    known = {f.name for f in dataclasses.fields(cls)}
    for key in data:
        if key not in known:
            raise ConfigError(f"{locate((name, key))}: unknown field '{name}.{key}'")
    try:
        return cls(**{k: _number(v) for k, v in data.items()})
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{locate((name,))}: section '{name}': {exc}") from None


def parse_config(text, source="<config>"):
    """Build a :class:`StudyConfig` from YAML text."""
    try:
        root = yaml.compose(text)
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"{source}:{mark.line + 1}" if mark is not None else source
        raise ConfigError(f"{where}: YAML syntax error: {getattr(exc, 'problem', exc)}") from None
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"{source}: top level must be a mapping")

    def locate(path):
        line = _line_of(root, path) if root is not None else None
        return f"{source}:{line}" if line else source

    for key in data:
        if key not in TOP_KEYS:
            raise ConfigError(f"{locate((key,))}: unknown field '{key}'")
    sections = {name: _section(cls, data.get(name), name, locate) for name, cls in SECTIONS.items()}

    schemes = tuple(data.get("schemes", SCHEMES))
    for s in schemes:
        if s not in SCHEMES:
            raise ConfigError(f"{locate(('schemes',))}: unknown scheme '{s}'; expected one of {SCHEMES}")
    try:
        snr = data.get("snr_db", [8.0])
        snr = tuple(float(v) for v in (snr if isinstance(snr, list) else [snr]))
        sweep = _sweep_points(data.get("sweep", {"start": -12.0, "stop": 12.0, "step": 2.0}),
                              locate(("sweep",)))
        depths = _depths(data.get("hydrophones"), locate(("hydrophones",)))
        seed, n_bits, workers = int(data.get("seed", 1)), int(data.get("n_bits", 4000)), int(data.get("workers", 1))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{source}: {exc}") from None
    message = str(data.get("message", STUDY_MESSAGE))
    if workers < 1:
        raise ConfigError(f"{locate(('workers',))}: workers must be at least 1")
    if seed < 0:
        raise ConfigError(f"{locate(('seed',))}: seed must be non-negative")
    try:
        base = ExperimentConfig(
            scheme=schemes[0] if schemes else SCHEMES[0],
            env=sections["environment"], fading=sections["fading"], layout=sections["layout"],
            hydrophone_depths=depths, snr_points=snr, n_bits=n_bits, seed=seed,
            receiver=sections["receiver"])
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from None
    return StudyConfig(base, schemes, sweep, message, workers)


def load_config(path=None):
    """Read a config file; ``None`` loads the shipped study config."""
    if path is None:
        return parse_config(default_config_text(), "study.yaml")
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config: {exc.strerror}") from None
    return parse_config(text, str(path))


def _plain(obj):
    if dataclasses.is_dataclass(obj):
        return {f.name: _plain(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, (tuple, list)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def study_to_dict(study):
    """Plain-data form of ``study`` that :func:`parse_config` reads back unchanged."""
    b = study.base
    return {
        "seed": b.seed,
        "n_bits": b.n_bits,
        "schemes": list(study.schemes),
        "snr_db": [float(v) for v in b.snr_points],
        "sweep": [float(v) for v in study.sweep_points],
        "message": study.message,
        "environment": _plain(b.env),
        "hydrophones": {"depths": [float(d) for d in b.hydrophone_depths]},
        "fading": _plain(b.fading),
        "layout": _plain(b.layout),
        "receiver": _plain(b.receiver),
    }


def dump_config(study):
    return yaml.safe_dump(study_to_dict(study), sort_keys=False, default_flow_style=None)
