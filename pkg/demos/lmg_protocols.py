"""Fixed-point protocols of the collective spin model against matched comparisons.

Run with ``python3 demos/lmg_protocols.py [N]`` (default N=50).  For each
phase the fixed-point field and its endpoint-matched comparison are evolved
with the bare Hamiltonian, and the fidelity is printed on a coarse grid.
The same runs are available as CSV through ``tqd trace -c configs/...``.
"""

import sys

from tqd.experiments import build_model, run_fidelity_trace
from tqd.lmg import lmg_h1_coupling
from tqd.params import LmgParams
from tqd.schedules import lmg_fp_broken, lmg_fp_symmetric, matched_comparison_for

n = int(sys.argv[1]) if len(sys.argv) > 1 else 50

for phase, fixed in (("symmetric", lmg_fp_symmetric(0.5)), ("broken", lmg_fp_broken())):
    comparison = matched_comparison_for(fixed)
    traces = [run_fidelity_trace(build_model("lmg", s, n), s, "bare", n_points=11) for s in (fixed, comparison)]
    print(f"\n{phase} phase, N={n}")
    print(f"{'t':>5} {'h fixed':>9} {'f fixed':>10} {'h comp':>9} {'f comp':>10}")
    for a, b in zip(*(t.records for t in traces)):
        print(f"{a.t:5.2f} {fixed.value(a.t)[2]:9.4f} {a.fidelity:10.6f} {comparison.value(b.t)[2]:9.4f} {b.fidelity:10.6f}")

# the collective coupling that the fixed-point condition removes
s = lmg_fp_symmetric(0.5)
c = matched_comparison_for(s)
print("\ncollective coupling h1 at t=0.5:")
print(f"  fixed point {lmg_h1_coupling(LmgParams.from_arrays(n, s.value(0.5), s.derivative(0.5))):.2e}")
print(f"  comparison  {lmg_h1_coupling(LmgParams.from_arrays(n, c.value(0.5), c.derivative(0.5))):.2e}")
