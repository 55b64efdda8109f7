"""Model assembly and fidelity experiments.

A :class:`Model` bundles ``H0(t)``, ``dH0/dt`` and the model's closed-form
driver for one schedule and system size.  :func:`run_fidelity_trace` evolves
the chosen eigenstate under ``H0`` plus one of four drivers and compares it
with the adiabatically tracked state; :func:`run_size_sweep` repeats that
over system sizes, optionally in parallel.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import analytic, lmg, xy_chain
from .dynamics import FidelityTrace, IntegratorConfig, TraceRecord, fidelity, propagate, track_frames
from .engine import (
    HamiltonianFunction,
    adiabaticity_metric,
    cd_term_for_state,
    cd_term_matrix_elements,
    min_gap,
)
from .errors import ArgumentError, DivergenceError, TQDError
from .params import LmgParams
from .schedules import FIELD_NAMES, Schedule

logger = logging.getLogger(__name__)

MODELS = ("two_level", "two_spin", "xy_chain", "lmg")
MODES = ("bare", "analytic_cd", "engine_cd", "state_cd")
DEFAULT_POINTS = 200


@dataclass(frozen=True)
class Model:
    """``H0(t)`` of one model instance with its closed-form driver.

    ``analytic_cd`` is exact for the two-level and two-spin models.  For the
    XY chain it is the local low-lying driver, and for LMG the collective
    ``(h1/2N)(SxSy + SySx)`` term (with broken-phase replacements applied
    when needed); both are approximations of the exact driver.
    """

    name: str
    size: int | None
    hamiltonian: HamiltonianFunction
    analytic_cd: Callable[[float], np.ndarray]

    @property
    def dim(self) -> int:
        return self.hamiltonian.dim


def _lmg_sector(n_spins: int, sector: str | None) -> str | None:
    if sector == "auto":
        return "even" if n_spins >= 2 else None
    return sector


def build_model(name: str, schedule: Schedule, size: int | None = None, sector: str | None = "auto") -> Model:
    """Assemble a model driven by ``schedule``.

    ``size`` is the number of sites (XY) or spins (LMG).  ``sector`` selects
    the parity sector holding the ground state (``"auto"``: even parity when
    the sector is at least two dimensional); ``None`` keeps the full space.
    """
    field_schedule = tuple(schedule.names) == FIELD_NAMES
    if name == "two_level":
        if not field_schedule:
            raise ArgumentError(f"two_level needs a field schedule, got {schedule.name!r}")
        return Model(
            name, None,
            HamiltonianFunction(
                2,
                lambda t: analytic.tls_hamiltonian(schedule.value(t)),
                lambda t: analytic.tls_hamiltonian(schedule.derivative(t)),
            ),
            lambda t: analytic.tls_cd_term(schedule.value(t), schedule.derivative(t)),
        )
    if field_schedule:
        raise ArgumentError(f"model {name!r} needs a (Jx, Jy, h) schedule, got field schedule {schedule.name!r}")
    if name == "two_spin":
        return Model(
            name, None,
            HamiltonianFunction(
                4,
                lambda t: analytic.two_spin_hamiltonian(schedule.couplings(t)),
                lambda t: analytic.two_spin_hamiltonian(schedule.couplings(t).as_rates()),
            ),
            lambda t: analytic.two_spin_cd_term(schedule.couplings(t)),
        )
    if name == "xy_chain":
        if size is None:
            raise ArgumentError("xy_chain needs a size")
        parity = "even" if sector == "auto" else sector
        dim = 2**size if parity is None else xy_chain.xy_parity_indices(size, parity).size
        return Model(
            name, size,
            HamiltonianFunction(
                dim,
                lambda t: xy_chain.xy_hamiltonian(schedule.couplings(t), size, parity),
                lambda t: xy_chain.xy_hamiltonian_derivative(schedule.couplings(t), size, parity),
            ),
            lambda t: xy_chain.xy_lowlying_driver(schedule.couplings(t), size, parity),
        )
    if name == "lmg":
        if size is None or size < 1:
            raise ArgumentError("lmg needs a size >= 1")
        sec = _lmg_sector(size, sector)
        dim = lmg.sector_indices(size, sec).size

        def params(t: float) -> LmgParams:
            return LmgParams.from_arrays(size, schedule.value(t), schedule.derivative(t))

        def driver(t: float) -> np.ndarray:
            p = params(t)
            if not lmg.is_symmetric_phase(p):
                p = lmg.lmg_broken_phase_replacements(p)
            return lmg.lmg_h1_operator(p, sec)

        return Model(
            name, size,
            HamiltonianFunction(
                dim,
                lambda t: lmg.lmg_hamiltonian(params(t), sec),
                lambda t: lmg.lmg_hamiltonian_derivative(params(t), sec),
            ),
            driver,
        )
    raise ArgumentError(f"unknown model {name!r}; known: {MODELS}")


def driver_for(model: Model, mode: str, level: int = 0) -> Callable[[float], np.ndarray]:
    """The driving term ``H1(t)`` used by each driver mode."""
    h = model.hamiltonian
    if mode == "bare":
        zero = np.zeros((model.dim, model.dim), dtype=complex)
        return lambda t: zero
    if mode == "analytic_cd":
        return model.analytic_cd

    def finite_rate(t):
        # an infinite schedule rate times a zero matrix entry gives nan; both are caught below
        with np.errstate(invalid="ignore"):
            dh0 = h.derivative(t)
        if not np.all(np.isfinite(dh0)):
            raise DivergenceError(f"dH0/dt is not finite at t={t}")
        return dh0

    if mode == "engine_cd":
        return lambda t: cd_term_matrix_elements(h(t), finite_rate(t))
    if mode == "state_cd":
        return lambda t: cd_term_for_state(h(t), finite_rate(t), level)
    raise ArgumentError(f"unknown driver mode {mode!r}; known: {MODES}")


def _clamped(driver, dim: int, events: list[str]):
    zero = np.zeros((dim, dim), dtype=complex)

    def wrapped(t):
        try:
            return driver(t)
        except DivergenceError as exc:
            stamp = f"t={t:.6g}:"
            if not any(e.startswith(stamp) for e in events):
                events.append(f"{stamp} {exc}")
            return zero

    return wrapped


def run_fidelity_trace(
    model: Model,
    schedule: Schedule,
    mode: str = "bare",
    cfg: IntegratorConfig | None = None,
    n_points: int = DEFAULT_POINTS,
    level: int = 0,
    clamp_divergence: bool = False,
) -> FidelityTrace:
    """Evolve level ``level`` of ``H0(0)`` and record the fidelity along the way.

    The reference at each output time is the gauge-tracked eigenvector of
    the same level.  Fidelity is insensitive to the dynamical and Berry
    phases, so this equals the fidelity with the full adiabatic state.

    With ``clamp_divergence`` a driver that diverges is replaced by zero at
    that instant and the event is listed in ``trace.events``; otherwise the
    :class:`DivergenceError` propagates.
    """
    if n_points < 2:
        raise ArgumentError("n_points must be >= 2")
    h = model.hamiltonian
    times = np.linspace(0.0, schedule.duration, n_points)
    frames = track_frames(h, times, levels=[level])
    events: list[str] = []
    driver = driver_for(model, mode, level)
    if clamp_divergence:
        driver = _clamped(driver, model.dim, events)

    def total(t):
        return h(t) + driver(t)

    states, drift = propagate(total, frames[0].vector(level), times, cfg)
    records = []
    # dH0/dt may be infinite at an endpoint (square-root schedules); the
    # adiabaticity metric then reports inf
    with np.errstate(invalid="ignore"):
        rates = [h.derivative(float(t)) for t in times]
    for k, frame in enumerate(frames):
        t = float(times[k])
        records.append(
            TraceRecord(
                t,
                fidelity(frame.vector(level), states[k]),
                min_gap(frame, level) if model.dim > 1 else float("inf"),
                adiabaticity_metric(h(t), rates[k], level, frame=frame) if model.dim > 1 else 0.0,
                float(drift[k]),
            )
        )
    return FidelityTrace(records, model.size, schedule.name, mode, events)


# ---------------------------------------------------------------------------
# size sweeps

@dataclass(frozen=True)
class SweepRow:
    N: int
    protocol: str
    mode: str
    record: TraceRecord | None
    error: str | None = None
    events: tuple = ()

    @property
    def final_fidelity(self) -> float:
        return float("nan") if self.record is None else self.record.fidelity


def _sweep_job(args) -> SweepRow:
    model_name, sched_dict, n, mode, cfg_dict, sector, clamp, n_points = args
    sched = Schedule.from_dict(sched_dict)
    try:
        model = build_model(model_name, sched, n, sector)
        trace = run_fidelity_trace(model, sched, mode, IntegratorConfig(**cfg_dict), n_points, 0, clamp)
    except TQDError as exc:
        return SweepRow(n, sched.name, mode, None, f"{type(exc).__name__}: {exc}")
    return SweepRow(n, sched.name, mode, trace.records[-1], None, tuple(trace.events))


def run_size_sweep(
    model_name: str,
    schedules: Sequence[Schedule],
    sizes: Sequence[int],
    mode: str = "bare",
    cfg: IntegratorConfig | None = None,
    jobs: int = 1,
    sector: str | None = "auto",
    clamp_divergence: bool = False,
    n_points: int = DEFAULT_POINTS,
) -> list[SweepRow]:
    """Final-time fidelity for every (size, protocol) pair.

    Rows are ordered by size, then by the order of ``schedules``; the order
    does not depend on ``jobs``.  A failing run yields a row with ``error``
    set instead of aborting the sweep.
    """
    sizes = [int(n) for n in sizes]
    if not sizes:
        raise ArgumentError("sizes must be nonempty")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ArgumentError(f"sizes must be strictly ascending without duplicates, got {sizes}")
    if mode not in MODES:
        raise ArgumentError(f"unknown driver mode {mode!r}; known: {MODES}")
    cfg = cfg or IntegratorConfig()
    tasks = [
        (model_name, s.to_dict(), n, mode, cfg.to_dict(), sector, clamp_divergence, n_points)
        for n in sizes
        for s in schedules
    ]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_job, tasks))
    else:
        rows = [_sweep_job(task) for task in tasks]
    for row in rows:
        if row.error:
            logger.warning("N=%d %s: %s", row.N, row.protocol, row.error)
    return rows
