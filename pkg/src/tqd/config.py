"""JSON experiment configuration for the command-line front end.

Example::

    {
      "model": "lmg",
      "schedule": {"name": "lmg_fp_symmetric", "params": {"c": 0.5}, "duration": 1.0},
      "driver_mode": "bare",
      "sizes": [50],
      "integrator": {"step": null, "renormalize_every": 0, "method": "rk4"},
      "output": "time_symmetric.csv",
      "seed": 0
    }

``schedule`` may also be a list of such objects; every protocol is then run
for every size.  Optional keys: ``n_points`` (output grid, default 200),
``sector`` (``"auto"``, ``"even"``, ``"odd"`` or ``null``), ``level``
(tracked eigenstate, default 0) and ``clamp_divergence`` (default false).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .dynamics import IntegratorConfig
from .errors import ArgumentError, TQDError
from .experiments import DEFAULT_POINTS, MODELS, MODES
from .schedules import FIELD_NAMES, Schedule

REQUIRED = ("model", "schedule")
OPTIONAL = (
    "driver_mode", "sizes", "integrator", "output", "seed",
    "n_points", "sector", "level", "clamp_divergence",
)
SIZED_MODELS = ("xy_chain", "lmg")


class ConfigError(ArgumentError):
    """Invalid configuration; the message names the offending field."""


@dataclass(frozen=True)
class ExperimentConfig:
    model: str
    schedules: tuple
    driver_mode: str = "bare"
    sizes: tuple = ()
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    output: str | None = None
    seed: int = 0
    n_points: int = DEFAULT_POINTS
    sector: str | None = "auto"
    level: int = 0
    clamp_divergence: bool = False

    def build_schedules(self) -> list[Schedule]:
        return [Schedule.from_dict(spec) for spec in self.schedules]

    def size_list(self) -> list[int | None]:
        return list(self.sizes) if self.sizes else [None]

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "schedule": [dict(s) for s in self.schedules],
            "driver_mode": self.driver_mode,
            "sizes": list(self.sizes),
            "integrator": self.integrator.to_dict(),
            "output": self.output,
            "seed": self.seed,
            "n_points": self.n_points,
            "sector": self.sector,
            "level": self.level,
            "clamp_divergence": self.clamp_divergence,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, doc) -> "ExperimentConfig":
        if not isinstance(doc, dict):
            raise ConfigError("config must be a JSON object")
        for key in REQUIRED:
            if key not in doc:
                raise ConfigError(f"missing required field {key!r}")
        unknown = sorted(set(doc) - set(REQUIRED) - set(OPTIONAL))
        if unknown:
            raise ConfigError(f"unknown field {unknown[0]!r}")

        model = doc["model"]
        if model not in MODELS:
            raise ConfigError(f"field 'model': expected one of {MODELS}, got {model!r}")
        mode = doc.get("driver_mode", "bare")
        if mode not in MODES:
            raise ConfigError(f"field 'driver_mode': expected one of {MODES}, got {mode!r}")

        raw = doc["schedule"]
        raw = raw if isinstance(raw, list) else [raw]
        if not raw:
            raise ConfigError("field 'schedule': at least one schedule is required")
        schedules = []
        for i, spec in enumerate(raw):
            where = f"field 'schedule[{i}]'"
            if not isinstance(spec, dict) or "name" not in spec:
                raise ConfigError(f"{where}: expected an object with a 'name'")
            extra = sorted(set(spec) - {"name", "params", "duration"})
            if extra:
                raise ConfigError(f"{where}: unknown key {extra[0]!r}")
            try:
                sched = Schedule.from_dict(spec)
            except TQDError as exc:
                raise ConfigError(f"{where}: {exc}") from None
            is_field = tuple(sched.names) == FIELD_NAMES
            if is_field != (model == "two_level"):
                raise ConfigError(f"{where}: schedule {sched.name!r} is incompatible with model {model!r}")
            schedules.append(sched.to_dict())

        sizes = doc.get("sizes", [])
        if not isinstance(sizes, list) or not all(isinstance(n, int) and not isinstance(n, bool) for n in sizes):
            raise ConfigError("field 'sizes': expected a list of integers")
        if any(n < 1 for n in sizes):
            raise ConfigError("field 'sizes': sizes must be positive")
        if model in SIZED_MODELS and not sizes:
            raise ConfigError(f"field 'sizes': model {model!r} needs at least one size")

        integ = doc.get("integrator", {}) or {}
        if not isinstance(integ, dict):
            raise ConfigError("field 'integrator': expected an object")
        try:
            integrator = IntegratorConfig(**integ)
        except (TypeError, ArgumentError) as exc:
            raise ConfigError(f"field 'integrator': {exc}") from None

        def typed(key, kind, default):
            value = doc.get(key, default)
            if value is not None and (not isinstance(value, kind) or isinstance(value, bool) and kind is not bool):
                raise ConfigError(f"field {key!r}: expected {kind.__name__}, got {value!r}")
            return value

        output = typed("output", str, None)
        seed = typed("seed", int, 0)
        n_points = typed("n_points", int, DEFAULT_POINTS)
        if n_points is None or n_points < 2:
            raise ConfigError("field 'n_points': must be an integer >= 2")
        level = typed("level", int, 0)
        clamp = typed("clamp_divergence", bool, False)
        sector = doc.get("sector", "auto")
        if sector not in ("auto", "even", "odd", None):
            raise ConfigError(f"field 'sector': expected 'auto', 'even', 'odd' or null, got {sector!r}")

        return cls(
            model, tuple(schedules), mode, tuple(sizes), integrator, output,
            seed if seed is not None else 0, n_points, sector, level or 0, bool(clamp),
        )

    @classmethod
    def loads(cls, text: str) -> "ExperimentConfig":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
        return cls.from_dict(doc)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        with open(path, encoding="utf-8") as fh:
            return cls.loads(fh.read())

