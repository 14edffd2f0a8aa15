"""What a rotational sensitivity tensor does to the chemotactic flux.

With the identity mix (alpha = 1, beta = 0) cells drift straight up the
solute gradient; with the pure rotation (alpha = 0, beta = 1) the drift
is turned by ninety degrees and transports mass around level sets
instead of across them.  For radial data the rotational flux through any
mid-plane cancels exactly, while the identity mix pushes mass outward
through it.
"""

import numpy as np

from chemostokes.grid import GridSpec, ScalarField
from chemostokes.initial import zero_velocity
from chemostokes.model import ModelParams
from chemostokes.solver import chemotactic_face_flux, initial_state

grid = GridSpec(2, (64, 64), (1.0, 1.0))
mesh = grid.center_mesh()
r2 = (mesh[0] - 0.5) ** 2 + (mesh[1] - 0.5) ** 2
n = ScalarField(grid, np.exp(-r2 / 0.02))
c = ScalarField(grid, np.exp(-r2 / 0.05))
state = initial_state(grid, n, c, zero_velocity(grid))

hy = grid.spacing[1]
print(f"{'tensor':14s} {'through x = 1/2':>18} {'through x = 1/4':>18}")
for name, alpha, beta in (("identity mix", 1.0, 0.0),
                          ("pure rotation", 0.0, 1.0),
                          ("equal mix", 1.0, 1.0)):
    params = ModelParams(m=2.0, l=2.5, eps=0.1, alpha_s=alpha, beta_s=beta,
                         s_law="constant", s0=1.0, grav=(0.0, 0.0))
    F = chemotactic_face_flux(state, params)
    net_mid = float(np.sum(F.components[0][32, :]) * hy)
    net_off = float(np.sum(F.components[0][16, :]) * hy)
    print(f"{name:14s} {net_mid:+18.3e} {net_off:+18.3e}")

print("""
Through the symmetry plane x = 1/2 every column cancels to roundoff:
the radial data has no normal gradient there and the rotational drift
pairs off under the mirror.  Through the off-center plane x = 1/4 the
gradient-following mix drives a genuine outward flux, while the
rotational flux is an order of magnitude smaller; its leftover is the
donor-cell asymmetry of the upwind flux, not net transport.""")
