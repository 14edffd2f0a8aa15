"""The energy/dissipation monitor along a run.

The monitored functional bundles a density power, a solute-gradient
power, and the flow enstrophy; its dissipation bundles the matching
gradient, Hessian, and vector-Laplacian integrals.  Above the critical
diffusion exponent the damping inequality dy/dt + D/C <= C is expected
to hold with a moderate constant, and the monitor fits the smallest
such C along the trajectory.
"""

from chemostokes.invariants import odi_monitor
from chemostokes.runner import run
from chemostokes.scenarios import smoke_setup

state, params, opts = smoke_setup(cells=24, t_end=0.5)
result = run(state, params, opts)
rows = result.rows

print(f"{'t':>7} {'energy y':>12} {'dissipation D':>14}")
for r in rows[:: max(1, len(rows) // 12)]:
    print(f"{r.t:7.3f} {r.energy:12.6f} {r.dissipation:14.6f}")

verdict = odi_monitor(rows)
print(f"\nbounded: {verdict.bounded}")
print(f"fitted damping constant C: {verdict.c_damp:.4g}")
print(f"energy sup over the run:   {verdict.sup_y:.6f}")
print(f"final-half max vs midpoint reference: "
      f"{verdict.final_half_max:.6f} vs {verdict.final_half_ref:.6f}")
