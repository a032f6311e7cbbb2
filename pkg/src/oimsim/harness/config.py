"""Experiment specifications and result records."""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from ..errors import ConfigError
from ..rng import DEFAULT_SEED

KINDS = (
    "leakage-sweep",
    "cdf-check",
    "bounds-check",
    "dof-sweep",
    "upper-bound",
    "two-step",
    "multicarrier-compare",
)

# grid defaults per experiment kind; anything not listed falls back to the
# dataclass defaults below
KIND_DEFAULTS: dict[str, dict[str, Any]] = {
    "leakage-sweep": dict(cells=[2], antennas=[8], streams=[5, 6, 7],
                          users=[2**e for e in range(6, 13)], trials=1000),
    "cdf-check": dict(cells=[2], antennas=[1], streams=[1], users=[1000], trials=50),
    "bounds-check": dict(cells=[2, 3], streams=[1, 2, 3], trials=1),
    "dof-sweep": dict(cells=[2], antennas=[1], streams=[1], snr=[4.0, 16.0, 64.0],
                      users_scale=1.0, trials=1000),
    "upper-bound": dict(cells=[2], users=[3], antennas=[2], trials=1),
    "two-step": dict(cells=[2], antennas=[2], users=[10_000], window=[4, 16, 64, 256],
                     snr=[100.0], trials=1000),
    "multicarrier-compare": dict(cells=[2], users=[100], subcarriers=[2, 4], streams=[1],
                                 trials=1000),
}

LIST_FIELDS = ("cells", "users", "antennas", "streams", "snr", "subcarriers", "window",
               "gamma_shapes")


@dataclass
class ExperimentSpec:
    kind: str
    cells: list[int] = field(default_factory=lambda: [2])
    users: list[int] = field(default_factory=lambda: [100])
    antennas: list[int] = field(default_factory=lambda: [2])
    streams: list[int] = field(default_factory=lambda: [1])
    snr: list[float] = field(default_factory=lambda: [10.0])
    subcarriers: list[int] = field(default_factory=lambda: [2])
    window: list[int] = field(default_factory=lambda: [4])
    trials: int = 1000
    seed: int = DEFAULT_SEED
    epsilon: float = 1.0
    # dof-sweep: N = ceil(users_scale * snr^((K-1)S)); None means use `users`
    users_scale: float | None = None
    max_users: int = 10**6
    gamma_shapes: list[float] = field(default_factory=lambda: [0.5, 1.0, 2.0, 5.0])

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ExperimentSpec:
        # None means "not given", except that an explicit users_scale of None
        # switches dof-sweep back to the plain `users` grid
        data = {k: v for k, v in data.items() if v is not None or k == "users_scale"}
        kind = data.get("kind")
        if kind not in KINDS:
            raise ConfigError(f"unknown experiment kind {kind!r}; expected one of {KINDS}")
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown spec fields: {sorted(unknown)}")
        merged = {**KIND_DEFAULTS[kind], **data}
        if kind == "dof-sweep" and "users" in data and "users_scale" not in data:
            merged["users_scale"] = None
        try:
            for name in LIST_FIELDS:
                if name in merged:
                    v = merged[name]
                    merged[name] = list(v) if isinstance(v, (list, tuple)) else [v]
            spec = cls(**merged)
            spec._coerce()
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(str(exc)) from exc
        spec.validate()
        return spec

    @classmethod
    def from_json_file(cls, path: str | Path, overrides: dict[str, Any] | None = None) -> ExperimentSpec:
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read spec file {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("spec file must contain a JSON object")
        data.update({k: v for k, v in (overrides or {}).items() if v is not None})
        return cls.from_dict(data)

    def _coerce(self) -> None:
        for name in ("cells", "users", "antennas", "streams", "subcarriers", "window"):
            setattr(self, name, [int(v) for v in getattr(self, name)])
        self.snr = [float(v) for v in self.snr]
        self.gamma_shapes = [float(v) for v in self.gamma_shapes]
        self.trials = int(self.trials)
        self.seed = int(self.seed)
        self.epsilon = float(self.epsilon)
        self.max_users = int(self.max_users)
        if self.users_scale is not None:
            self.users_scale = float(self.users_scale)

    def validate(self) -> None:
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if not (self.epsilon > 0 and math.isfinite(self.epsilon)):
            raise ConfigError("epsilon must be a positive finite number")
        for name in LIST_FIELDS:
            values = getattr(self, name)
            if not values:
                raise ConfigError(f"grid field {name!r} is empty")
            if any(not (v > 0 and math.isfinite(v)) for v in values):
                raise ConfigError(f"grid field {name!r} must hold positive values")
        if self.users_scale is not None and not self.users_scale > 0:
            raise ConfigError("users_scale must be positive")

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)


@dataclass
class ExperimentRecord:
    """Per-grid-point statistics of one experiment.

    ``elapsed_s`` is informational and deliberately left out of emitted
    files so that reruns are byte-identical.
    """

    spec: ExperimentSpec
    columns: list[str]
    rows: list[dict[str, Any]]
    summary: dict[str, Any] = field(default_factory=dict)
    elapsed_s: float = 0.0

    @property
    def aborts(self) -> int:
        return int(sum(r.get("aborts", 0) or 0 for r in self.rows))

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.spec.kind,
            "spec": self.spec.to_dict(),
            "columns": list(self.columns),
            "rows": self.rows,
            "summary": self.summary,
            "aborts": self.aborts,
        }

    def column(self, name: str, **where) -> list:
        return [r[name] for r in self.rows if all(r.get(k) == v for k, v in where.items())]
