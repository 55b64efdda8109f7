"""Time-dependent protocols with analytic derivatives.

A :class:`Schedule` maps ``t in [0, duration]`` to a parameter 3-vector,
``(Jx, Jy, h)`` for the spin models or ``(hx, hy, hz)`` for a two-level
field, together with its exact time derivative.  Schedules are built by
named constructors registered in :data:`REGISTRY` so that they can be
serialized as ``{"name": ..., "params": {...}, "duration": ...}``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ArgumentError
from .params import Couplings, ParamTriple

Vector3 = Callable[[float], np.ndarray]

COUPLING_NAMES = ("Jx", "Jy", "h")
FIELD_NAMES = ("hx", "hy", "hz")


@dataclass(frozen=True)
class Schedule:
    """A protocol on ``[0, duration]`` with its analytic derivative.

    ``base_value``/``base_derivative`` are defined on the reference interval
    ``[0, base_duration]``; ``duration`` rescales time uniformly so that the
    same path is traversed faster or slower.
    """

    name: str
    base_value: Vector3
    base_derivative: Vector3
    params: dict = field(default_factory=dict)
    base_duration: float = 1.0
    duration: float = 1.0
    names: tuple = COUPLING_NAMES

    @property
    def _scale(self) -> float:
        return self.base_duration / self.duration

    def value(self, t: float) -> np.ndarray:
        return np.asarray(self.base_value(t * self._scale), dtype=float)

    def derivative(self, t: float) -> np.ndarray:
        return np.asarray(self.base_derivative(t * self._scale), dtype=float) * self._scale

    def triple(self, t: float) -> ParamTriple:
        return ParamTriple(*map(float, self.value(t)))

    def couplings(self, t: float) -> Couplings:
        return Couplings.from_arrays(self.value(t), self.derivative(t))

    def rescaled(self, duration: float) -> "Schedule":
        if duration <= 0:
            raise ArgumentError("duration must be positive")
        return Schedule(
            self.name, self.base_value, self.base_derivative, dict(self.params),
            self.base_duration, float(duration), self.names,
        )

    def to_dict(self) -> dict:
        return {"name": self.name, "params": dict(self.params), "duration": self.duration}

    @classmethod
    def from_dict(cls, spec: dict) -> "Schedule":
        return build_schedule(spec["name"], spec.get("params", {}), spec.get("duration"))


# ---------------------------------------------------------------------------
# coupling paths shared by the spin-model protocols

def _linear(a0: float, a1: float):
    return (lambda t: a0 + a1 * t), (lambda t: a1)


BASE_JX = (10.0, -5.0)
BASE_JY = (0.0, 5.0)


def _coupling_schedule(name, params, jx, jy, h_fn, dh_fn, duration=1.0) -> Schedule:
    jx_f, djx_f = _linear(*jx)
    jy_f, djy_f = _linear(*jy)

    def value(t):
        return np.array([jx_f(t), jy_f(t), h_fn(t)])

    def derivative(t):
        return np.array([djx_f(t), djy_f(t), dh_fn(t)])

    return Schedule(name, value, derivative, params, 1.0, float(duration), COUPLING_NAMES)


def _pair(value, default) -> tuple[float, float]:
    if value is None:
        return default
    a, b = value
    return float(a), float(b)


def linear_paper_schedule(h: float = 0.0) -> Schedule:
    """``Jx = 10 - 5t``, ``Jy = 5t`` on ``[0, 1]`` with a constant field ``h``."""
    return _coupling_schedule(
        "linear_reference", {"h": h}, BASE_JX, BASE_JY, lambda t: h, lambda t: 0.0
    )


def linear_schedule(jx=(1.0, 0.0), jy=(0.0, 0.0), h=(1.0, 0.0)) -> Schedule:
    """All three couplings linear in time: ``(value at 0, slope)`` pairs."""
    jx, jy, h = _pair(jx, (1.0, 0.0)), _pair(jy, (0.0, 0.0)), _pair(h, (1.0, 0.0))
    h_f, dh_f = _linear(*h)
    return _coupling_schedule(
        "linear", {"jx": list(jx), "jy": list(jy), "h": list(h)}, jx, jy, h_f, dh_f
    )


def lmg_fp_symmetric(c: float = 0.5) -> Schedule:
    """Symmetric-phase fixed point ``h = (Jx - c Jy) / (1 - c)`` on the base path."""
    if not 0 <= c < 1:
        raise ArgumentError(f"c must lie in [0, 1), got {c}")
    a = 1.0 / (1.0 - c)
    jx0, jx1 = BASE_JX
    jy0, jy1 = BASE_JY
    return _coupling_schedule(
        "lmg_fp_symmetric", {"c": c}, BASE_JX, BASE_JY,
        lambda t: a * ((jx0 + jx1 * t) - c * (jy0 + jy1 * t)),
        lambda t: a * (jx1 - c * jy1),
    )


def _sqrt_jxjy(t):
    return np.sqrt(max((BASE_JX[0] + BASE_JX[1] * t) * (BASE_JY[0] + BASE_JY[1] * t), 0.0))


def _sqrt_jxjy_rate(t):
    jx = BASE_JX[0] + BASE_JX[1] * t
    jy = BASE_JY[0] + BASE_JY[1] * t
    prod = jx * jy
    if prod <= 0.0:
        # one-sided limit at the Ising end, where h ~ sqrt(t)
        return np.inf
    return (BASE_JX[1] * jy + jx * BASE_JY[1]) / (2 * np.sqrt(prod))


def lmg_fp_broken() -> Schedule:
    """Broken-phase fixed point ``h = sqrt(Jx Jy)`` on the base path, ``h(0) = 0``."""
    return _coupling_schedule("lmg_fp_broken", {}, BASE_JX, BASE_JY, _sqrt_jxjy, _sqrt_jxjy_rate)


_COMPARISON_SHAPES = {
    "gaussian": (lambda t: np.exp(-t * t / 2), lambda t: -t * np.exp(-t * t / 2)),
    "quartic_exp": (lambda t: np.exp(t**4), lambda t: 4 * t**3 * np.exp(t**4)),
}


def comparison_coefficients(kind: str, h_start: float, h_end: float) -> tuple[float, float]:
    """Solve ``a + b g(0) = h_start``, ``a + b g(1) = h_end`` for the shape ``g``."""
    try:
        g, _ = _COMPARISON_SHAPES[kind]
    except KeyError:
        raise ArgumentError(f"unknown comparison kind {kind!r}") from None
    system = np.array([[1.0, g(0.0)], [1.0, g(1.0)]])
    if abs(np.linalg.det(system)) < 1e-14:
        raise ArgumentError(f"endpoint system for {kind!r} is singular")
    a, b = np.linalg.solve(system, [h_start, h_end])
    return float(a), float(b)


def matched_comparison_schedule(kind: str, h_start: float, h_end: float) -> Schedule:
    """Non-fixed-point field ``a + b g(t)`` sharing the fixed-point endpoints.

    ``kind`` is ``"gaussian"`` (``g = exp(-t^2/2)``) or ``"quartic_exp"``
    (``g = exp(t^4)``).
    """
    a, b = comparison_coefficients(kind, h_start, h_end)
    g, dg = _COMPARISON_SHAPES[kind]
    return _coupling_schedule(
        f"matched_{kind}", {"kind": kind, "h_start": h_start, "h_end": h_end},
        BASE_JX, BASE_JY, lambda t: a + b * g(t), lambda t: b * dg(t),
    )


def fp_family_generic(model: str, **params) -> Schedule:
    """Fixed-point protocol families for each model.

    ``two_level_static``
        field ``(1 + rate t) * direction``; the direction never changes.
    ``two_spin``
        ``h = c (Jx - Jy)`` (defaults ``Jx = 1 + t``, ``Jy = t``).
    ``xy_chain``
        ``h = Jx + Jy + c (Jx - Jy)`` (default: base path).
    ``lmg_fpa``
        ``h = (A+B)/2 Jx + (A-B)/2 Jy`` (default: base path).

    Linear couplings may be overridden with ``jx=(value, slope)`` and
    ``jy=(value, slope)``.
    """
    if model == "two_level_static":
        direction = np.asarray(params.get("direction", (0.0, 0.0, 1.0)), dtype=float)
        rate = float(params.get("rate", 1.0))
        if not np.any(direction):
            raise ArgumentError("direction must be nonzero")
        if 1.0 + rate <= 0:
            raise ArgumentError("field magnitude would cross zero on [0, 1]")
        return Schedule(
            "fp_two_level_static",
            lambda t: (1.0 + rate * t) * direction,
            lambda t: rate * direction,
            {"model": model, "direction": direction.tolist(), "rate": rate},
            names=FIELD_NAMES,
        )
    if model == "two_spin":
        c = float(params.get("c", 2.0))
        jx = _pair(params.get("jx"), (1.0, 1.0))
        jy = _pair(params.get("jy"), (0.0, 1.0))
        h_fn = lambda t: c * ((jx[0] + jx[1] * t) - (jy[0] + jy[1] * t))
        dh_fn = lambda t: c * (jx[1] - jy[1])
    elif model == "xy_chain":
        c = float(params.get("c", 0.3))
        jx = _pair(params.get("jx"), BASE_JX)
        jy = _pair(params.get("jy"), BASE_JY)
        h_fn = lambda t: (1 + c) * (jx[0] + jx[1] * t) + (1 - c) * (jy[0] + jy[1] * t)
        dh_fn = lambda t: (1 + c) * jx[1] + (1 - c) * jy[1]
    elif model == "lmg_fpa":
        a = float(params.get("A", 1.0))
        b = float(params.get("B", 3.0))
        jx = _pair(params.get("jx"), BASE_JX)
        jy = _pair(params.get("jy"), BASE_JY)
        h_fn = lambda t: (a + b) / 2 * (jx[0] + jx[1] * t) + (a - b) / 2 * (jy[0] + jy[1] * t)
        dh_fn = lambda t: (a + b) / 2 * jx[1] + (a - b) / 2 * jy[1]
    else:
        raise ArgumentError(f"unknown fixed-point family {model!r}")
    stored = {k: (list(v) if isinstance(v, tuple) else v) for k, v in params.items()}
    stored["model"] = model
    return _coupling_schedule(f"fp_{model}", stored, jx, jy, h_fn, dh_fn)


def oscillating_field_schedule(h0: float = 1.0, h3: float = 1.0, omega: float = 1.0, periods: float = 1.0) -> Schedule:
    """Two-level field ``(h0 cos wt, h0 sin wt, h3)`` over ``periods`` revolutions."""
    if omega == 0:
        raise ArgumentError("omega must be nonzero")
    duration = periods * 2 * np.pi / abs(omega)
    return Schedule(
        "oscillating_field",
        lambda t: np.array([h0 * np.cos(omega * t), h0 * np.sin(omega * t), h3]),
        lambda t: np.array([-h0 * omega * np.sin(omega * t), h0 * omega * np.cos(omega * t), 0.0]),
        {"h0": h0, "h3": h3, "omega": omega, "periods": periods},
        base_duration=duration,
        duration=duration,
        names=FIELD_NAMES,
    )


def static_driver_schedule(h3: float = 1.0, omega: float = 4.0, periods: float = 1.0) -> Schedule:
    """Rotating field whose driven total field is static.

    Picks ``h0 = sqrt(w h3 / 2 - h3^2)`` so that ``2 (h0^2 + h3^2) = w h3``.
    """
    h0_sq = omega * h3 / 2 - h3**2
    if h0_sq < 0:
        raise ArgumentError("no real h0 satisfies 2(h0^2 + h3^2) = omega h3 for these values")
    sched = oscillating_field_schedule(float(np.sqrt(h0_sq)), h3, omega, periods)
    return Schedule(
        "static_driver", sched.base_value, sched.base_derivative,
        {"h3": h3, "omega": omega, "periods": periods},
        sched.base_duration, sched.duration, FIELD_NAMES,
    )


REGISTRY: dict[str, Callable[..., Schedule]] = {
    "linear_reference": linear_paper_schedule,
    "linear": linear_schedule,
    "lmg_fp_symmetric": lmg_fp_symmetric,
    "lmg_fp_broken": lmg_fp_broken,
    "matched_gaussian": lambda h_start=20.0, h_end=5.0, **kw: matched_comparison_schedule(
        "gaussian", h_start, h_end, **_drop(kw, "kind")
    ),
    "matched_quartic_exp": lambda h_start=0.0, h_end=5.0, **kw: matched_comparison_schedule(
        "quartic_exp", h_start, h_end, **_drop(kw, "kind")
    ),
    "fp_two_level_static": lambda **kw: fp_family_generic("two_level_static", **_drop(kw, "model")),
    "fp_two_spin": lambda **kw: fp_family_generic("two_spin", **_drop(kw, "model")),
    "fp_xy_chain": lambda **kw: fp_family_generic("xy_chain", **_drop(kw, "model")),
    "fp_lmg_fpa": lambda **kw: fp_family_generic("lmg_fpa", **_drop(kw, "model")),
    "oscillating_field": oscillating_field_schedule,
    "static_driver": static_driver_schedule,
}


def _drop(kw: dict, key: str) -> dict:
    return {k: v for k, v in kw.items() if k != key}


def build_schedule(name: str, params: dict | None = None, duration: float | None = None) -> Schedule:
    """Construct a registered schedule, optionally rescaled to ``duration``."""
    try:
        ctor = REGISTRY[name]
    except KeyError:
        raise ArgumentError(f"unknown schedule {name!r}; known: {sorted(REGISTRY)}") from None
    try:
        sched = ctor(**(params or {}))
    except TypeError as exc:
        raise ArgumentError(f"bad parameters for schedule {name!r}: {exc}") from None
    if duration is not None and duration != sched.duration:
        sched = sched.rescaled(duration)
    return sched


def matched_comparison_for(fixed_point: Schedule) -> Schedule:
    """Endpoint-matched comparison partner of an LMG fixed-point protocol."""
    kind = "quartic_exp" if fixed_point.name == "lmg_fp_broken" else "gaussian"
    start = float(fixed_point.base_value(0.0)[2])
    end = float(fixed_point.base_value(fixed_point.base_duration)[2])
    return matched_comparison_schedule(kind, start, end).rescaled(fixed_point.duration)
