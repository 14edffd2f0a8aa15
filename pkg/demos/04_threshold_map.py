"""The critical diffusion exponent: closed form versus bisection.

Feasibility of the auxiliary exponents (p, q, r) switches from empty to
nonempty as the diffusion exponent m crosses a piecewise-affine
threshold in the sensitivity exponent l, with a slope break at
l = 31/12.  Bisection over witness feasibility recovers the closed form
to the requested tolerance everywhere.
"""

import numpy as np

from chemostokes.feasibility import find_witness, m_star, m_threshold

print(f"{'l':>6} {'closed form':>12} {'bisection':>12} {'|diff|':>9}"
      f"   witness (p, q, r) just above")
for l in np.linspace(2.05, 4.0, 14):
    closed = float(m_star(float(l)))
    found = m_threshold(float(l), 1e-3)
    w = find_witness(closed + 0.05, float(l)).witness
    print(f"{l:6.3f} {closed:12.6f} {found:12.6f} {abs(found - closed):9.2e}"
          f"   ({w[0]:.3f}, {w[1]:.3f}, {w[2]:.3f})")

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    ls = np.linspace(2.02, 4.0, 120)
    closed = [float(m_star(float(l))) for l in ls]
    found = [m_threshold(float(l), 1e-3) for l in ls]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(ls, closed, label="closed form", lw=2)
    ax.plot(ls, found, ":", label="bisection", lw=2)
    ax.axvline(31 / 12, color="gray", ls="--", lw=1, label="slope break 31/12")
    ax.set_xlabel("sensitivity exponent l")
    ax.set_ylabel("critical diffusion exponent")
    ax.legend()
    fig.tight_layout()
    fig.savefig("threshold_map.png", dpi=130)
    print("\nwrote threshold_map.png")
except ImportError:
    print("\n(matplotlib not available, skipping the plot)")
