"""Testing a trajectory against the integral form of the equations.

Each equation, paired with a smooth compactly supported space-time test
function and integrated by parts, becomes an identity a solution must
satisfy.  Evaluating those identities with the solver's own discrete
fluxes along a stored trajectory leaves a residual that shrinks under
simultaneous space-time refinement; the pressure never appears.
"""

from chemostokes.runner import run
from chemostokes.scenarios import smoke_setup
from chemostokes.weakform import battery_residuals, standard_battery

worst = {}
for cells, snap in ((16, 0.04), (32, 0.02)):
    state, params, opts = smoke_setup(cells=cells, t_end=0.4,
                                      snap_interval=snap)
    result = run(state, params, opts, collect=True)
    battery = standard_battery(state.grid, 0.3)
    reports, w = battery_residuals(result.trajectory, state.grid, params,
                                   battery)
    worst[cells] = w
    print(f"\n{cells}x{cells} grid, snapshot interval {snap}:")
    for rep in reports:
        print(f"  {rep.test_name:14s} density {rep.density:+.3e}  "
              f"solute {rep.solute:+.3e}  velocity {rep.velocity:+.3e}")

print("\nshrink factors 16 -> 32 (expect roughly 4, gate is 1.8):")
for key in ("density", "solute", "velocity"):
    print(f"  {key:9s} x{worst[16][key] / worst[32][key]:.2f}")
