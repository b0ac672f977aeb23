"""Experiment configuration: JSON in, validated dataclass out."""

from __future__ import annotations

import json
import re
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

from .core import DEFAULT_MAX_QUBITS, check_capacity
from .ensembles import EnsembleSpec
from .errors import ConfigError
from .estimators import DEFAULT_B

EXPERIMENTS = (
    "collision",
    "lxeb",
    "maxp",
    "moment-validation",
    "variance",
    "clifford-uniformity",
    "orthogonal-collision",
)

# depth used when the config omits one; "<c>n" scales with the qubit count
DEFAULT_DEPTH = {"clifford-uniformity": "10n"}
CONVERGENCE_DEPTH = "3n"
DEPTH_PRESETS = {"linear-4design": "144n"}

_DEPTH_RE = re.compile(r"^\s*(\d+)\s*\*?\s*n\s*$")


def resolve_depth(depth, n: int) -> int:
    """Accept an int, ``"<c>n"`` or a named preset such as ``"linear-4design"``."""
    if isinstance(depth, bool):
        raise ConfigError(f"bad depth {depth!r}")
    if isinstance(depth, int):
        return depth
    if isinstance(depth, str):
        depth = DEPTH_PRESETS.get(depth, depth)
        m = _DEPTH_RE.match(depth)
        if m:
            return int(m.group(1)) * n
    raise ConfigError(f"bad depth {depth!r}: use an integer, '<c>n' or one of {sorted(DEPTH_PRESETS)}")


_ENSEMBLE_KEYS = {f.name for f in fields(EnsembleSpec)}


@dataclass
class ExperimentConfig:
    experiment: str
    ensemble: EnsembleSpec
    trials: int = 100
    k: int | None = None
    b: float = DEFAULT_B
    master_seed: int = 0
    workers: int = 1
    output_dir: str = "lxeb-out"
    max_qubits: int = DEFAULT_MAX_QUBITS
    deltas: list = field(default_factory=lambda: [0.01, 0.02, 0.05, 0.1, 0.2])
    dims: list = field(default_factory=lambda: [2, 4, 8])
    moment_orders: list = field(default_factory=lambda: [1, 2, 3, 4])
    hist_bins: int = 50

    @property
    def group(self) -> str:
        return "orthogonal" if self.ensemble.kind == "haar-orthogonal" else "unitary"

    def validate(self) -> "ExperimentConfig":
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; expected one of {EXPERIMENTS}")
        if not isinstance(self.trials, int) or self.trials < 1:
            raise ConfigError("trials must be an integer >= 1")
        if self.experiment == "lxeb" and (self.k is None or self.k < 1):
            raise ConfigError("lxeb experiments need k >= 1")
        if self.k is not None and self.k < 1:
            raise ConfigError("k must be >= 1")
        if not 1 < self.b < 2:
            raise ConfigError(f"b must lie in (1, 2), got {self.b}")
        if not isinstance(self.workers, int) or self.workers < 1:
            raise ConfigError("workers must be an integer >= 1")
        if not 0 <= self.master_seed < 2**64:
            raise ConfigError("master_seed must be a 64-bit unsigned integer")
        if any(dlt <= 0 for dlt in self.deltas):
            raise ConfigError("deltas must be positive")
        if self.experiment == "moment-validation":
            if self.ensemble.kind not in ("haar-unitary", "haar-orthogonal"):
                raise ConfigError("moment-validation needs a haar-unitary or haar-orthogonal ensemble")
            if any(not 2 <= d <= 64 for d in self.dims):
                raise ConfigError("dims must lie in [2, 64]")
            if any(t < 1 for t in self.moment_orders):
                raise ConfigError("moment orders must be >= 1")
        else:
            check_capacity(self.ensemble.n, self.max_qubits)
            if self.ensemble.architecture == "brickwork" and self.ensemble.n % 2:
                raise ConfigError(f"brickwork circuits need even n, got {self.ensemble.n}")
        return self

    def to_dict(self) -> dict:
        out = asdict(self)
        out["ensemble"] = {k: v for k, v in asdict(self.ensemble).items() if v is not None}
        return out

    def with_overrides(self, **overrides) -> "ExperimentConfig":
        ens = {k: overrides.pop(k) for k in ("n", "depth") if overrides.get(k) is not None}
        top = {k: v for k, v in overrides.items() if v is not None}
        cfg = replace(self, **top)
        if ens:
            spec = asdict(cfg.ensemble)
            if "n" in ens:
                spec["n"] = ens["n"]
            if "depth" in ens:
                spec["depth"] = resolve_depth(ens["depth"], spec["n"])
            cfg = replace(cfg, ensemble=_make_spec(spec))
        return cfg.validate()


def _make_spec(raw: dict) -> EnsembleSpec:
    try:
        return EnsembleSpec(**raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad ensemble: {exc}") from None


def config_from_dict(raw: dict) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if "experiment" not in raw:
        raise ConfigError("config needs an 'experiment' key")
    raw = dict(raw)
    experiment = raw["experiment"]
    ens = dict(raw.pop("ensemble", {}))
    if not isinstance(ens, dict):
        raise ConfigError("ensemble must be an object")
    bad = set(ens) - _ENSEMBLE_KEYS
    if bad:
        raise ConfigError(f"unknown ensemble keys: {sorted(bad)}")
    if experiment == "clifford-uniformity":
        ens.setdefault("kind", "clifford")
    if experiment == "orthogonal-collision":
        ens.setdefault("kind", "haar-orthogonal")
    ens.setdefault("n", 2)
    depth = ens.get("depth", DEFAULT_DEPTH.get(experiment, CONVERGENCE_DEPTH))
    ens["depth"] = resolve_depth(depth, ens["n"])
    try:
        cfg = ExperimentConfig(ensemble=_make_spec(ens), **raw)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    return cfg.validate()


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return config_from_dict(raw)
