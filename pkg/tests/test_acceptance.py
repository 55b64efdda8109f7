"""Acceptance criteria, one test and one PASS/FAIL line each.

Tolerances are the pinned acceptance values; criteria that fail do so
because the model physics does not deliver them (see README).
"""

import time

import numpy as np
import pytest

from tqd import analytic, lmg, verify, xy_chain
from tqd.dynamics import IntegratorConfig, evolve, fidelity, geometric_phase
from tqd.experiments import build_model, run_fidelity_trace, run_size_sweep
from tqd.operators import commutator
from tqd.params import Couplings, LmgParams
from tqd.schedules import (
    fp_family_generic,
    linear_schedule,
    lmg_fp_broken,
    lmg_fp_symmetric,
    oscillating_field_schedule,
    matched_comparison_for,
    static_driver_schedule,
)

# norm drift of every acceptance run, checked by criterion 9
DRIFTS: list[float] = []


def traced(model_name, sched, mode, size=None, cfg=None, n_points=50):
    trace = run_fidelity_trace(build_model(model_name, sched, size), sched, mode, cfg, n_points=n_points)
    DRIFTS.append(trace.max_norm_drift)
    return trace


def lmg_params(sched, n, t):
    return LmgParams.from_arrays(n, sched.value(t), sched.derivative(t))


# --- 1 ------------------------------------------------------------------------------------

def test_criterion_1_analytic_engine_equivalence(acceptance_report):
    start = time.perf_counter()
    checks = (verify.check_two_level_cd, verify.check_two_spin_cd, verify.check_xy_block_cd, verify.check_lmg_cd)
    streams = np.random.SeedSequence(2024).spawn(len(checks))
    results = [check(np.random.default_rng(s), 100) for check, s in zip(checks, streams)]
    elapsed = time.perf_counter() - start
    ok = all(r.passed and r.tol == 1e-6 for r in results) and elapsed < 60
    detail = ", ".join(f"{r.name} {r.worst:.1e}" for r in results)
    acceptance_report(1, ok, f"{detail}; {elapsed:.1f} s")
    assert ok


# --- 2 ------------------------------------------------------------------------------------

def test_criterion_2_transitionless_property(acceptance_report):
    start = time.perf_counter()
    worst = {}
    for omega in (0.5, 5.0, 50.0):
        s = oscillating_field_schedule(1.0, 1.0, omega, 1.0)
        worst[f"two_level w={omega:g}"] = traced("two_level", s, "analytic_cd").fidelities.min()
    s = linear_schedule(jx=(1.0, 1.0), jy=(0.0, 0.5), h=(0.5, 1.0))
    worst["two_spin"] = traced("two_spin", s, "analytic_cd").fidelities.min()
    # step 1e-3 keeps the 2^7-dimensional run inside the time budget; drift stays ~1e-12
    s = linear_schedule(jx=(1.0, 0.5), jy=(0.3, 0.4), h=(4.0, -1.0))
    worst["xy N=8"] = traced("xy_chain", s, "engine_cd", 8, IntegratorConfig(step=1e-3)).fidelities.min()
    gauss = matched_comparison_for(lmg_fp_symmetric(0.5))
    for n in (20, 100):
        worst[f"lmg N={n}"] = traced("lmg", gauss, "engine_cd", n).fidelities.min()
    elapsed = time.perf_counter() - start
    ok = all(f >= 1 - 1e-5 for f in worst.values()) and elapsed < 300
    detail = ", ".join(f"{k} 1-f={1 - f:.1e}" for k, f in worst.items())
    acceptance_report(2, ok, f"{detail}; {elapsed:.0f} s")
    assert ok


# --- 3 ------------------------------------------------------------------------------------

def test_criterion_3_static_driver(acceptance_report):
    h3, omega = 1.0, 4.0
    h0 = np.sqrt(omega * h3 / 2 - h3**2)
    target = np.array([0.0, 0.0, omega / 2])
    times = np.linspace(0, 2 * np.pi / omega, 20)
    field_err = 0.0
    for t in times:
        f = analytic.oscillating_field(h0, h3, omega, t)
        total = f + analytic.tls_cd_field(f, analytic.oscillating_field_rate(h0, h3, omega, t))
        field_err = max(field_err, float(np.abs(total - target).max()))

    # evolve under the static total field and compare with the instantaneous eigenstate of H0(t)
    sched = static_driver_schedule(h3, omega)
    h = build_model("two_level", sched).hamiltonian
    static = analytic.tls_hamiltonian(target)
    psi0 = h.frame(0.0).vector(0)
    worst = 1.0
    for t in times[1:]:
        psi = evolve(lambda _: static, psi0, 0.0, t, IntegratorConfig(step=1e-4))
        worst = min(worst, fidelity(h.frame(t).vector(0), psi))
    ok = field_err < 1e-10 and worst >= 1 - 1e-6
    acceptance_report(3, ok, f"total-field error {field_err:.1e}, 1-f={1 - worst:.1e}")
    assert ok


# --- 4 ------------------------------------------------------------------------------------

def fixed_point_coupling_worst() -> float:
    grid = np.linspace(0.01, 0.95, 95)
    worst = 0.0
    s = fp_family_generic("two_spin", c=2.0)
    worst = max(worst, max(abs(analytic.two_spin_cd_coefficient(s.couplings(t))) for t in grid))
    s = fp_family_generic("xy_chain", c=0.3)
    worst = max(worst, max(abs(xy_chain.xy_j1_lowlying(s.couplings(t))) for t in grid))
    s = lmg_fp_symmetric(0.5)
    worst = max(worst, max(abs(lmg.lmg_h1_coupling(lmg_params(s, 100, t))) for t in grid))
    s = lmg_fp_broken()
    worst = max(
        worst,
        max(abs(lmg.lmg_h1_coupling(lmg.lmg_broken_phase_replacements(lmg_params(s, 100, t)))) for t in grid),
    )
    return worst


def test_criterion_4_fixed_point_nulls(acceptance_report):
    null = fixed_point_coupling_worst()
    finals = {}
    for sched in (lmg_fp_symmetric(0.5), lmg_fp_broken()):
        for duration in (1.0, 10.0):
            trace = traced("lmg", sched.rescaled(duration), "bare", 100)
            finals[f"{sched.name} T={duration:g}"] = trace.final_fidelity
    ok = null < 1e-10 and all(f >= 0.999 for f in finals.values())
    detail = ", ".join(f"{k} f={f:.4g}" for k, f in finals.items())
    acceptance_report(4, ok, f"worst coupling {null:.1e}; N=100 {detail}")
    assert ok


def test_fixed_point_fidelity_holds_before_critical_endpoint():
    # supplementary: the shortfall in criterion 4 builds up only near the critical endpoint
    trace = run_fidelity_trace(build_model("lmg", lmg_fp_symmetric(0.5), 100), lmg_fp_symmetric(0.5), "bare", n_points=11)
    assert trace.records[9].t == pytest.approx(0.9)
    assert trace.records[9].fidelity >= 0.999


def test_fixed_point_final_fidelity_limit():
    # supplementary: the squeezed state with tanh(theta) = 1/3 against the polarized critical ground state
    limit = 1 / np.cosh(np.arctanh(1 / 3) / 2)
    s = lmg_fp_symmetric(0.5)
    f = run_fidelity_trace(build_model("lmg", s, 200), s, "bare", n_points=20).final_fidelity
    assert abs(f - limit) < 2e-3


# --- 5 ------------------------------------------------------------------------------------

def test_criterion_5_commutator_identity(acceptance_report):
    rng = np.random.default_rng(5)
    generic = 0.0
    for _ in range(50):
        p = LmgParams(6, *rng.uniform(0, 5, size=3), *rng.normal(size=3))
        lhs = commutator(lmg.lmg_hamiltonian(p), lmg.lmg_hamiltonian_derivative(p))
        generic = max(generic, float(np.abs(lhs - lmg.lmg_commutator_decomposition(p)).max()))
    a = 1.0
    s = fp_family_generic("lmg_fpa", A=a, B=3.0)
    x_hat, y_hat = lmg.lmg_xy_hat_operators(6)
    protocol = 0.0
    for t in np.linspace(0, 1, 50):
        p = lmg_params(s, 6, t)
        lhs = commutator(lmg.lmg_hamiltonian(p), lmg.lmg_hamiltonian_derivative(p))
        rhs = 2 * (p.Jx * p.dJy - p.Jy * p.dJx) * (x_hat - a * y_hat)
        protocol = max(protocol, float(np.abs(lhs - rhs).max()))
    ok = generic < 1e-9 and protocol < 1e-9
    acceptance_report(5, ok, f"random {generic:.1e}, protocol {protocol:.1e}")
    assert ok


# --- 6 ------------------------------------------------------------------------------------

def test_criterion_6_fixed_point_beats_comparison(acceptance_report):
    start = time.perf_counter()
    final = {}
    for phase, fixed in (("symmetric", lmg_fp_symmetric(0.5)), ("broken", lmg_fp_broken())):
        final[phase, "fp"] = traced("lmg", fixed, "bare", 50, n_points=200).final_fidelity
        final[phase, "cmp"] = traced("lmg", matched_comparison_for(fixed), "bare", 50, n_points=200).final_fidelity
    elapsed = time.perf_counter() - start
    order = {phase: final[phase, "fp"] > final[phase, "cmp"] for phase in ("symmetric", "broken")}
    # deviation from unit fidelity, larger in the broken phase for both protocol kinds
    larger = all(1 - final["broken", k] > 1 - final["symmetric", k] for k in ("fp", "cmp"))
    ok = all(order.values()) and larger and elapsed < 300
    detail = ", ".join(f"{p} fp {final[p, 'fp']:.4g} vs cmp {final[p, 'cmp']:.4g}" for p in ("symmetric", "broken"))
    acceptance_report(6, ok, f"N=50 {detail}; broken deviation larger: {larger}; {elapsed:.0f} s")
    assert ok


# --- 7 ------------------------------------------------------------------------------------

def test_criterion_7_size_dependence(acceptance_report):
    start = time.perf_counter()
    sizes = [20, 50, 100, 200]
    fixed = [lmg_fp_symmetric(0.5), lmg_fp_broken()]
    scheds = fixed + [matched_comparison_for(s) for s in fixed]
    rows = run_size_sweep("lmg", scheds, sizes, jobs=2, n_points=50)
    elapsed = time.perf_counter() - start
    DRIFTS.extend(r.record.norm_drift for r in rows if r.record is not None)
    f = {(r.protocol, r.N): r.final_fidelity for r in rows}
    ok = elapsed < 600
    parts = []
    for fp in fixed:
        series = [f[fp.name, n] for n in sizes]
        cmp_name = matched_comparison_for(fp).name
        increasing = all(b > a for a, b in zip(series, series[1:]))
        margin = series[-1] - f[cmp_name, 200]
        ok &= increasing and series[-1] > 0.99 and margin > 0.001
        parts.append(f"{fp.name} {' '.join(f'{x:.4g}' for x in series)} (cmp@200 {f[cmp_name, 200]:.4g})")
    acceptance_report(7, ok, f"{'; '.join(parts)}; {elapsed:.0f} s")
    assert ok


# --- 8 ------------------------------------------------------------------------------------

def test_criterion_8_cross_validation(acceptance_report):
    rng = np.random.default_rng(8)
    xy_worst = 0.0
    for n in (2, 4, 6, 8):
        idx = xy_chain.xy_parity_indices(n, "even")
        for _ in range(5):
            p = Couplings(*rng.uniform(-2, 2, size=3))
            brute = np.linalg.eigvalsh(xy_chain.xy_hamiltonian(p, n)[np.ix_(idx, idx)])
            xy_worst = max(xy_worst, float(np.abs(brute - xy_chain.xy_spectrum_from_blocks(p, n)).max()))
    iso = verify.dicke_isometry(4)
    lmg_worst = 0.0
    for _ in range(20):
        p = LmgParams(4, *rng.uniform(0, 5, size=3))
        full = verify.lmg_full_space(p)
        lmg_worst = max(lmg_worst, float(np.abs(iso.T @ full @ iso - lmg.lmg_hamiltonian(p)).max()))
        # the collective spectrum sits inside the full spectrum
        full_evals = np.linalg.eigvalsh(full)
        for e in np.linalg.eigvalsh(lmg.lmg_hamiltonian(p)):
            lmg_worst = max(lmg_worst, float(np.abs(full_evals - e).min()))
    ok = xy_worst < 1e-9 and lmg_worst < 1e-10
    acceptance_report(8, ok, f"xy set distance {xy_worst:.1e}, lmg N=4 {lmg_worst:.1e}")
    assert ok


# --- 9 ------------------------------------------------------------------------------------

def test_criterion_9_numerical_hygiene(acceptance_report):
    rng = np.random.default_rng(9)
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    h0 = (a + a.conj().T)
    psi0 = np.array([1, 0, 0, 0], dtype=complex)
    w, v = np.linalg.eigh(h0)
    exact = v @ (np.exp(-1j * w) * (v.conj().T @ psi0))
    steps = (0.01, 0.005, 0.0025)
    errors = [np.linalg.norm(evolve(lambda t: h0, psi0, 0, 1, IntegratorConfig(step=dt)) - exact) for dt in steps]
    orders = np.log2(np.array(errors[:-1]) / np.array(errors[1:]))

    if not DRIFTS:
        # run alone: take the drift from a representative driven run
        s = matched_comparison_for(lmg_fp_symmetric(0.5))
        traced("lmg", s, "engine_cd", 20)
    drift = max(DRIFTS)

    h0_, h3_ = 1.0, 1.0
    s = oscillating_field_schedule(h0_, h3_, 1.0, 1.0)
    h = build_model("two_level", s).hamiltonian
    solid = 2 * np.pi * (1 - h3_ / np.hypot(h0_, h3_))
    berry = geometric_phase(h, 0, np.linspace(0, s.duration, 2001))
    berry_err = abs(np.angle(np.exp(1j * (berry - solid / 2))))

    ok = bool(np.all(np.abs(orders - 4) < 0.3)) and drift < 1e-6 and berry_err < 1e-4
    detail = f"orders {', '.join(f'{o:.2f}' for o in orders)}; max drift {drift:.1e} over {len(DRIFTS)} runs"
    acceptance_report(9, ok, f"{detail}; Berry phase error {berry_err:.1e}")
    assert ok
