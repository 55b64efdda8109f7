"""Randomized oracle checks comparing closed forms with the generic engine.

Every check draws ``samples`` random parameter points from a seeded
generator and reports the worst deviation found.  The suite is
deterministic for a fixed seed.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import analytic, lmg, xy_chain
from .engine import HamiltonianFunction, cd_term_matrix_elements, cd_term_spectral
from .operators import commutator, embed_pauli
from .params import Couplings, LmgParams
from .schedules import fp_family_generic, lmg_fp_broken, lmg_fp_symmetric

MIN_GAP = 1e-3
CD_TOL = 1e-6
HP_CUTOFF = 150
HP_LEVELS = 10
HP_MAX_TANH = 0.8


@dataclass(frozen=True)
class CheckResult:
    name: str
    samples: int
    worst: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.worst) and self.worst <= self.tol)


def _frob(a) -> float:
    return float(np.linalg.norm(a))


def _spectral_gap(h: np.ndarray) -> float:
    e = np.linalg.eigvalsh(h)
    return float(np.min(np.diff(e))) if e.size > 1 else np.inf


def _draw(rng, sampler, accept, limit=10000):
    for _ in range(limit):
        x = sampler(rng)
        if accept(x):
            return x
    raise RuntimeError("rejection sampling did not converge")


# ---------------------------------------------------------------------------
# closed-form driver versus engine

def check_two_level_cd(rng, samples: int) -> CheckResult:
    worst = 0.0
    for _ in range(samples):
        f, df = _draw(
            rng, lambda r: (r.normal(size=3), r.normal(size=3)), lambda x: 2 * np.linalg.norm(x[0]) > MIN_GAP
        )
        engine = cd_term_matrix_elements(analytic.tls_hamiltonian(f), analytic.tls_hamiltonian(df))
        worst = max(worst, _frob(engine - analytic.tls_cd_term(f, df)))
    return CheckResult("two_level_cd", samples, worst, CD_TOL)


def _random_couplings(rng) -> Couplings:
    return Couplings(*rng.uniform(-2, 2, size=3), *rng.normal(size=3))


def check_two_spin_cd(rng, samples: int) -> CheckResult:
    worst = 0.0
    for _ in range(samples):
        p = _draw(rng, _random_couplings, lambda p: _spectral_gap(analytic.two_spin_hamiltonian(p)) > MIN_GAP)
        engine = cd_term_matrix_elements(
            analytic.two_spin_hamiltonian(p), analytic.two_spin_hamiltonian(p.as_rates())
        )
        worst = max(worst, _frob(engine - analytic.two_spin_cd_term(p)))
    return CheckResult("two_spin_cd", samples, worst, CD_TOL)


def check_xy_block_cd(rng, samples: int) -> CheckResult:
    worst = 0.0
    for _ in range(samples):
        q, p = _draw(
            rng,
            lambda r: (r.uniform(0.05, np.pi - 0.05), _random_couplings(r)),
            lambda x: _spectral_gap(xy_chain.xy_block(*x)) > MIN_GAP,
        )
        engine = cd_term_matrix_elements(xy_chain.xy_block(q, p), xy_chain.xy_block(q, p.as_rates()))
        worst = max(worst, _frob(engine - xy_chain.xy_block_cd_term(q, p)))
    return CheckResult("xy_block_cd", samples, worst, CD_TOL)


def _random_symmetric_lmg(rng, n_spins: int = 1) -> LmgParams:
    def sample(r):
        jx, jy = r.uniform(0, 10, size=2)
        h = max(jx, jy) + r.uniform(0.2, 10)
        return LmgParams(n_spins, jx, jy, h, *r.normal(size=3))

    def accept(p):
        theta, omega = lmg.lmg_bogoliubov(p)
        return abs(np.tanh(theta)) <= HP_MAX_TANH and omega > MIN_GAP

    return _draw(rng, sample, accept)


def check_lmg_cd(rng, samples: int) -> CheckResult:
    """Collective driver against the engine on the quadratic boson model.

    The comparison is restricted to the lowest ``HP_LEVELS`` eigenstates,
    where the Fock-space truncation is immaterial.
    """
    worst = 0.0
    for _ in range(samples):
        p = _random_symmetric_lmg(rng)
        h0 = lmg.hp_hamiltonian(p, HP_CUTOFF)
        _, vecs = np.linalg.eigh(h0)
        low = vecs[:, :HP_LEVELS]
        engine = cd_term_matrix_elements(h0, lmg.hp_hamiltonian_derivative(p, HP_CUTOFF))
        diff = low.conj().T @ (engine - lmg.hp_cd_term(p, HP_CUTOFF)) @ low
        worst = max(worst, _frob(diff))
    return CheckResult("lmg_collective_cd", samples, worst, CD_TOL)


def check_engine_routes(rng, samples: int) -> CheckResult:
    """Eigenvector-derivative and matrix-element drivers agree."""
    worst = 0.0
    dim = 5
    for _ in range(samples):
        mats = []
        for _ in range(3):
            a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
            mats.append((a + a.conj().T) / 2)
        a, b, c = mats
        h = HamiltonianFunction(dim, lambda t: a + t * b + t * t * c, lambda t: b + 2 * t * c)
        t = float(rng.uniform(-1, 1))
        if _spectral_gap(h(t)) < 1e-2:
            continue
        diff = cd_term_spectral(h, t, dt=1e-5) - cd_term_matrix_elements(h(t), h.derivative(t))
        worst = max(worst, _frob(diff))
    return CheckResult("engine_routes", samples, worst, CD_TOL)


# ---------------------------------------------------------------------------
# structural identities

def check_lmg_commutator(rng, samples: int) -> CheckResult:
    worst = 0.0
    for _ in range(samples):
        p = LmgParams(6, *rng.uniform(0, 5, size=3), *rng.normal(size=3))
        lhs = commutator(lmg.lmg_hamiltonian(p), lmg.lmg_hamiltonian_derivative(p))
        worst = max(worst, float(np.max(np.abs(lhs - lmg.lmg_commutator_decomposition(p)))))
    return CheckResult("lmg_commutator", samples, worst, 1e-9)


def check_xy_spectrum(rng, samples: int) -> CheckResult:
    worst = 0.0
    count = 0
    for n in (2, 4, 6, 8):
        idx = xy_chain.xy_parity_indices(n, "even")
        for _ in range(max(1, samples // 10)):
            p = Couplings(*rng.uniform(-2, 2, size=3))
            brute = np.linalg.eigvalsh(xy_chain.xy_hamiltonian(p, n)[np.ix_(idx, idx)])
            blocks = xy_chain.xy_spectrum_from_blocks(p, n, "even")
            worst = max(worst, float(np.max(np.abs(brute - blocks))))
            count += 1
    return CheckResult("xy_block_spectrum", count, worst, 1e-9)


def dicke_isometry(n_spins: int) -> np.ndarray:
    """Columns ``|S=N/2, m>`` for ``m = S..-S`` in the ``2^N`` product basis."""
    dim = 2**n_spins
    downs = np.array([bin(i).count("1") for i in range(dim)])
    iso = np.zeros((dim, n_spins + 1))
    for k in range(n_spins + 1):
        col = (downs == k).astype(float)
        iso[:, k] = col / np.linalg.norm(col)
    return iso


def lmg_full_space(p: LmgParams) -> np.ndarray:
    """LMG Hamiltonian on all ``2^N`` product states (small ``N`` only)."""
    n = p.N
    s = {a: 0.5 * sum(embed_pauli(j, a, n) for j in range(n)) for a in "xyz"}
    return -(2 * p.Jx / n) * s["x"] @ s["x"] - (2 * p.Jy / n) * s["y"] @ s["y"] - 2 * p.h * s["z"]


def check_lmg_bruteforce(rng, samples: int) -> CheckResult:
    worst = 0.0
    iso = dicke_isometry(4)
    for _ in range(samples):
        p = LmgParams(4, *rng.uniform(0, 5, size=3))
        projected = iso.T @ lmg_full_space(p) @ iso
        worst = max(worst, float(np.max(np.abs(projected - lmg.lmg_hamiltonian(p)))))
    return CheckResult("lmg_dicke_projection", samples, worst, 1e-10)


def check_fixed_point_nulls(rng, samples: int) -> CheckResult:
    """Closed-form couplings vanish along every fixed-point family."""
    worst = 0.0
    for _ in range(samples):
        t = float(rng.uniform(0.01, 0.95))
        c = float(rng.uniform(-3, 3))
        s = fp_family_generic("two_spin", c=c, jx=tuple(rng.uniform(0.5, 2, 2)), jy=tuple(rng.uniform(-1, 1, 2)))
        p = s.couplings(t)
        if 4 * p.h**2 + (p.Jx - p.Jy) ** 2 > MIN_GAP:
            worst = max(worst, abs(analytic.two_spin_cd_coefficient(p)))
        s = fp_family_generic("xy_chain", c=float(rng.uniform(0.05, 1)))
        worst = max(worst, abs(xy_chain.xy_j1_lowlying(s.couplings(t))))
        s = lmg_fp_symmetric(float(rng.uniform(0, 0.9)))
        worst = max(worst, abs(lmg.lmg_h1_coupling(LmgParams.from_arrays(10, s.value(t), s.derivative(t)))))
        s = lmg_fp_broken()
        q = lmg.lmg_broken_phase_replacements(LmgParams.from_arrays(10, s.value(t), s.derivative(t)))
        worst = max(worst, abs(lmg.lmg_h1_coupling(q)))
    return CheckResult("fixed_point_nulls", samples, worst, 1e-10)


def check_static_driver(rng, samples: int) -> CheckResult:
    worst = 0.0
    for _ in range(samples):
        h3 = float(rng.uniform(0.2, 2))
        omega = 2 * h3 * float(rng.uniform(1.2, 5))
        h0 = np.sqrt(omega * h3 / 2 - h3**2)
        t = float(rng.uniform(0, 10))
        f = analytic.oscillating_field(h0, h3, omega, t)
        df = analytic.oscillating_field_rate(h0, h3, omega, t)
        total = f + analytic.tls_cd_field(f, df)
        target = analytic.tls_static_driver_check(h0, h3, omega, rtol=1e-9)
        if target is None:
            return CheckResult("static_driver", samples, np.inf, 1e-10)
        worst = max(worst, float(np.max(np.abs(total - target))))
    return CheckResult("static_driver", samples, worst, 1e-10)


CHECKS: tuple[Callable[[np.random.Generator, int], CheckResult], ...] = (
    check_two_level_cd,
    check_two_spin_cd,
    check_xy_block_cd,
    check_lmg_cd,
    check_engine_routes,
    check_lmg_commutator,
    check_xy_spectrum,
    check_lmg_bruteforce,
    check_fixed_point_nulls,
    check_static_driver,
)


def run_suite(seed: int = 42, samples: int = 100) -> list[CheckResult]:
    """Run every check with an independent stream derived from ``seed``."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    streams = np.random.SeedSequence(seed).spawn(len(CHECKS))
    return [check(np.random.default_rng(s), samples) for check, s in zip(CHECKS, streams)]


def format_report(results: list[CheckResult]) -> str:
    lines = [f"{'check':<24}{'samples':>8}{'worst':>14}{'tol':>10}  result"]
    for r in results:
        lines.append(
            f"{r.name:<24}{r.samples:>8}{r.worst:>14.3e}{r.tol:>10.0e}  {'PASS' if r.passed else 'FAIL'}"
        )
    failed = [r for r in results if not r.passed]
    if failed:
        worst = max(failed, key=lambda r: r.worst / r.tol)
        lines.append(f"FAILED {len(failed)} of {len(results)}; worst {worst.name}: {worst.worst:.3e}")
    else:
        lines.append(f"all {len(results)} checks passed")
    return "\n".join(lines) + "\n"


__all__ = ["CHECKS", "CheckResult", "format_report", "run_suite"]
