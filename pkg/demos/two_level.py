"""A spin in a rotating field, with and without the counterdiabatic term.

Run with ``python3 demos/two_level.py``.  Prints the final fidelity of bare
and driven evolution at several rotation rates, then the geometric phase
collected by the ground state over one revolution.
"""

import numpy as np

from tqd.analytic import driven_oscillating_amplitudes
from tqd.dynamics import geometric_phase
from tqd.experiments import build_model, run_fidelity_trace
from tqd.schedules import oscillating_field_schedule

H0, H3 = 1.0, 1.0

print(f"{'omega':>8} {'bare':>10} {'driven':>10}   driven field (radial, z)")
for omega in (0.1, 1.0, 10.0):
    s = oscillating_field_schedule(H0, H3, omega, periods=1.0)
    model = build_model("two_level", s)
    bare = run_fidelity_trace(model, s, "bare", n_points=40).final_fidelity
    driven = run_fidelity_trace(model, s, "analytic_cd", n_points=40).final_fidelity
    radial, z = driven_oscillating_amplitudes(H0, H3, omega)
    print(f"{omega:8.1f} {bare:10.6f} {driven:10.6f}   ({radial:.3f}, {z:.3f})")

s = oscillating_field_schedule(H0, H3, 1.0, periods=1.0)
h = build_model("two_level", s).hamiltonian
phase = geometric_phase(h, 0, np.linspace(0, s.duration, 2001))
solid = 2 * np.pi * (1 - H3 / np.hypot(H0, H3))
print(f"\nground-state geometric phase {phase:.6f}, half the solid angle {solid / 2:.6f}")
