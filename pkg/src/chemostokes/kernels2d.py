"""Fused 2D stencil kernels for the time stepper.

Sequential numba kernels; no parallel loops, so results are a pure
function of the inputs at any configured thread count.  Shapes follow
the MAC layout: cells ``(N0, N1)``, x-faces ``(N0+1, N1)``, y-faces
``(N0, N1+1)``.  Unit tests pin each kernel to the NumPy reference
operators in :mod:`chemostokes.operators`.
"""

from __future__ import annotations

import numpy as np
from numba import njit

S_LAW_CONSTANT = 0
S_LAW_AFFINE = 1
F_LAW_LINEAR = 0
F_LAW_SATURATING = 1


@njit(cache=True, inline="always")
def fastpow(x, e):
    """x**e with fast paths for the exponents runs actually use."""
    if e == 2.0:
        return x * x
    if e == 1.5:
        return x * np.sqrt(x)
    if e == 1.0:
        return x
    if e == 0.5:
        return np.sqrt(x)
    if e == 3.0:
        return x * x * x
    return x ** e


@njit(cache=True)
def chemo_velocity_2d(n, c, ux, uy, rho_x, rho_y,
                      m00, m01, m10, m11, lm2, s_code, s0,
                      hx, hy, wx, wy):
    """Tensor drift normal components at faces; returns max transport speed.

    At each interior face the full solute gradient is reconstructed
    (normal difference, tangential parts averaged over the four adjacent
    faces), multiplied by the cutoff-scaled tensor, and the normal
    component is stored.  The returned speed is the face maximum of
    |u| + |S grad c| over both face families; boundary faces carry zero.
    """
    N0, N1 = n.shape
    vmax = 0.0
    for i in range(N0 + 1):
        for j in range(N1):
            wx[i, j] = 0.0
    for i in range(N0):
        for j in range(N1 + 1):
            wy[i, j] = 0.0
    # x-faces
    for i in range(1, N0):
        for j in range(N1):
            gx = (c[i, j] - c[i - 1, j]) / hx
            # tangential part: mean of the four adjacent y-face gradients,
            # boundary y-faces contributing zero (mirror rule)
            gy = 0.0
            if j >= 1:
                gy += (c[i - 1, j] - c[i - 1, j - 1]) / hy
                gy += (c[i, j] - c[i, j - 1]) / hy
            if j + 1 <= N1 - 1:
                gy += (c[i - 1, j + 1] - c[i - 1, j]) / hy
                gy += (c[i, j + 1] - c[i, j]) / hy
            gy *= 0.25
            nf = 0.5 * (n[i - 1, j] + n[i, j])
            cf = 0.5 * (c[i - 1, j] + c[i, j])
            st = s0 if s_code == S_LAW_CONSTANT else s0 * (1.0 + cf)
            coef = rho_x[i, j] * fastpow(nf, lm2) * st
            w0 = coef * (m00 * gx + m01 * gy)
            w1 = coef * (m10 * gx + m11 * gy)
            wx[i, j] = w0
            sp = abs(ux[i, j]) + np.sqrt(w0 * w0 + w1 * w1)
            if sp > vmax:
                vmax = sp
    # y-faces
    for i in range(N0):
        for j in range(1, N1):
            gy = (c[i, j] - c[i, j - 1]) / hy
            gx = 0.0
            if i >= 1:
                gx += (c[i, j - 1] - c[i - 1, j - 1]) / hx
                gx += (c[i, j] - c[i - 1, j]) / hx
            if i + 1 <= N0 - 1:
                gx += (c[i + 1, j - 1] - c[i, j - 1]) / hx
                gx += (c[i + 1, j] - c[i, j]) / hx
            gx *= 0.25
            nf = 0.5 * (n[i, j - 1] + n[i, j])
            cf = 0.5 * (c[i, j - 1] + c[i, j])
            st = s0 if s_code == S_LAW_CONSTANT else s0 * (1.0 + cf)
            coef = rho_y[i, j] * fastpow(nf, lm2) * st
            w0 = coef * (m00 * gx + m01 * gy)
            w1 = coef * (m10 * gx + m11 * gy)
            wy[i, j] = w1
            sp = abs(uy[i, j]) + np.sqrt(w0 * w0 + w1 * w1)
            if sp > vmax:
                vmax = sp
    # faces with zero drift still advect
    for i in range(1, N0):
        for j in range(N1):
            if abs(ux[i, j]) > vmax:
                vmax = abs(ux[i, j])
    for i in range(N0):
        for j in range(1, N1):
            if abs(uy[i, j]) > vmax:
                vmax = abs(uy[i, j])
    return vmax


@njit(cache=True)
def donor_flux_2d(f, wx, wy, Fx, Fy):
    """Accumulate donor-cell flux ``f_upwind * w`` into the face arrays."""
    N0, N1 = f.shape
    for i in range(1, N0):
        for j in range(N1):
            w = wx[i, j]
            donor = f[i - 1, j] if w > 0.0 else f[i, j]
            Fx[i, j] += donor * w
    for i in range(N0):
        for j in range(1, N1):
            w = wy[i, j]
            donor = f[i, j - 1] if w > 0.0 else f[i, j]
            Fy[i, j] += donor * w


@njit(cache=True)
def subtract_gradient_2d(phi, hx, hy, Fx, Fy):
    """F -= grad(phi) on interior faces (diffusive flux in flux form)."""
    N0, N1 = phi.shape
    for i in range(1, N0):
        for j in range(N1):
            Fx[i, j] -= (phi[i, j] - phi[i - 1, j]) / hx
    for i in range(N0):
        for j in range(1, N1):
            Fy[i, j] -= (phi[i, j] - phi[i, j - 1]) / hy


@njit(cache=True)
def divergence_update_2d(n, Fx, Fy, hx, hy, dt, out):
    """out = n - dt * div(F); returns min of the result."""
    N0, N1 = n.shape
    mn = np.inf
    for i in range(N0):
        for j in range(N1):
            d = (Fx[i + 1, j] - Fx[i, j]) / hx + (Fy[i, j + 1] - Fy[i, j]) / hy
            v = n[i, j] - dt * d
            out[i, j] = v
            if v < mn:
                mn = v
    return mn


@njit(cache=True)
def step_c_2d(c, n, ux, uy, hx, hy, dt, f_code, out):
    """Explicit solute update: diffusion, upwind advection, consumption.

    Advection uses the upwind advective (non-conservative) form, which
    keeps the discrete extremum bounds independent of the tiny projection
    residual in div(u).  Returns (min, max) of the result.
    """
    N0, N1 = c.shape
    mn = np.inf
    mx = -np.inf
    for i in range(N0):
        for j in range(N1):
            cc = c[i, j]
            cl = c[i - 1, j] if i >= 1 else cc
            cr = c[i + 1, j] if i + 1 <= N0 - 1 else cc
            cb = c[i, j - 1] if j >= 1 else cc
            ct = c[i, j + 1] if j + 1 <= N1 - 1 else cc
            lap = (cr - 2.0 * cc + cl) / (hx * hx) + (ct - 2.0 * cc + cb) / (hy * hy)
            ul = ux[i, j]
            ur = ux[i + 1, j]
            vb = uy[i, j]
            vt = uy[i, j + 1]
            adv = 0.0
            if ul > 0.0:
                adv += ul * (cc - cl) / hx
            if ur < 0.0:
                adv += ur * (cr - cc) / hx
            if vb > 0.0:
                adv += vb * (cc - cb) / hy
            if vt < 0.0:
                adv += vt * (ct - cc) / hy
            fc = cc if f_code == F_LAW_LINEAR else cc / (1.0 + cc)
            v = cc + dt * (lap - adv - n[i, j] * fc)
            out[i, j] = v
            if v < mn:
                mn = v
            if v > mx:
                mx = v
    return mn, mx


@njit(cache=True)
def ustar_2d(ux, uy, n, gpx, gpy, hx, hy, dt, outx, outy):
    """Explicit viscous prediction with buoyant forcing, no-slip walls.

    Normal-wall entries are stored zeros and enter the stencil directly;
    tangential walls use the mirror-odd ghost (u_ghost = -u).  Boundary
    faces of the output stay zero.
    """
    N0, N1 = n.shape
    for i in range(N0 + 1):
        for j in range(N1):
            outx[i, j] = 0.0
    for i in range(N0):
        for j in range(N1 + 1):
            outy[i, j] = 0.0
    for i in range(1, N0):
        for j in range(N1):
            uc = ux[i, j]
            ul = ux[i - 1, j]
            ur = ux[i + 1, j]
            ub = -uc if j == 0 else ux[i, j - 1]
            ut = -uc if j == N1 - 1 else ux[i, j + 1]
            lap = (ur - 2.0 * uc + ul) / (hx * hx) + (ut - 2.0 * uc + ub) / (hy * hy)
            nf = 0.5 * (n[i - 1, j] + n[i, j])
            outx[i, j] = uc + dt * (lap + nf * gpx)
    for i in range(N0):
        for j in range(1, N1):
            uc = uy[i, j]
            ub = uy[i, j - 1]
            ut = uy[i, j + 1]
            ul = -uc if i == 0 else uy[i - 1, j]
            ur = -uc if i == N0 - 1 else uy[i + 1, j]
            lap = (ur - 2.0 * uc + ul) / (hx * hx) + (ut - 2.0 * uc + ub) / (hy * hy)
            nf = 0.5 * (n[i, j - 1] + n[i, j])
            outy[i, j] = uc + dt * (lap + nf * gpy)


@njit(cache=True)
def div_mac_2d(ux, uy, hx, hy, out):
    """Cell divergence of a face field; returns max |div|."""
    N0, N1 = out.shape
    worst = 0.0
    for i in range(N0):
        for j in range(N1):
            d = (ux[i + 1, j] - ux[i, j]) / hx + (uy[i, j + 1] - uy[i, j]) / hy
            out[i, j] = d
            if abs(d) > worst:
                worst = abs(d)
    return worst


@njit(cache=True)
def lap_cells_neumann_2d(x, hx, hy, out):
    """Cell-centered Laplacian with mirror (zero-flux) ghosts."""
    N0, N1 = x.shape
    for i in range(N0):
        for j in range(N1):
            xc = x[i, j]
            xl = x[i - 1, j] if i >= 1 else xc
            xr = x[i + 1, j] if i + 1 <= N0 - 1 else xc
            xb = x[i, j - 1] if j >= 1 else xc
            xt = x[i, j + 1] if j + 1 <= N1 - 1 else xc
            out[i, j] = (xr - 2.0 * xc + xl) / (hx * hx) + (xt - 2.0 * xc + xb) / (hy * hy)


@njit(cache=True)
def correct_velocity_2d(ux, uy, psi, hx, hy, dt):
    """u -= dt * grad(psi) on interior faces; walls remain untouched."""
    N0, N1 = psi.shape
    for i in range(1, N0):
        for j in range(N1):
            ux[i, j] -= dt * (psi[i, j] - psi[i - 1, j]) / hx
    for i in range(N0):
        for j in range(1, N1):
            uy[i, j] -= dt * (psi[i, j] - psi[i, j - 1]) / hy


@njit(cache=True)
def energy_integrands_2d(n, c, ux, uy, eps, pexp, qexp, mexp, hx, hy,
                         y_n, y_c, d_c, dnx, dny,
                         gux_n, gux_t, guy_n, guy_t, lux, luy):
    """Fill integrand arrays for the energy/dissipation functionals.

    y_n: (n+eps)^p per cell.
    y_c: |grad c|^(2q) per cell, gradients face-averaged per axis.
    d_c: |grad c|^(2q-2) |D2 c|^2 per cell; diagonal Hessian entries are
         second differences with mirror ghosts, cross entries central
         differences of the averaged cell gradient with even ghosts.
    dnx, dny: squared face gradients of (n+eps)^((m+p-1)/2).
    gux_n, gux_t, guy_n, guy_t: squared velocity-gradient samples
         (normal part at cells, tangential part at nodes with no-slip
         mirror-odd ghosts).
    lux, luy: squared discrete vector Laplacian of u at interior faces.
    """
    N0, N1 = n.shape
    sexp = 0.5 * (mexp + pexp - 1.0)
    for i in range(N0):
        for j in range(N1):
            y_n[i, j] = fastpow(n[i, j] + eps, pexp)
    # face gradients of c and of (n+eps)^s
    for i in range(N0):
        for j in range(N1):
            # averaged cell gradient of c
            gxl = (c[i, j] - c[i - 1, j]) / hx if i >= 1 else 0.0
            gxr = (c[i + 1, j] - c[i, j]) / hx if i + 1 <= N0 - 1 else 0.0
            gyl = (c[i, j] - c[i, j - 1]) / hy if j >= 1 else 0.0
            gyr = (c[i, j + 1] - c[i, j]) / hy if j + 1 <= N1 - 1 else 0.0
            gx = 0.5 * (gxl + gxr)
            gy = 0.5 * (gyl + gyr)
            g2 = gx * gx + gy * gy
            y_c[i, j] = fastpow(g2, qexp)
    for i in range(N0):
        for j in range(N1):
            cc = c[i, j]
            cl = c[i - 1, j] if i >= 1 else cc
            cr = c[i + 1, j] if i + 1 <= N0 - 1 else cc
            cb = c[i, j - 1] if j >= 1 else cc
            ct = c[i, j + 1] if j + 1 <= N1 - 1 else cc
            hxx = (cr - 2.0 * cc + cl) / (hx * hx)
            hyy = (ct - 2.0 * cc + cb) / (hy * hy)
            # cross terms from averaged cell gradients, even ghosts
            hxy = 0.5 * (_cell_gx_2d(c, i, min(j + 1, N1 - 1), hx, N0)
                         - _cell_gx_2d(c, i, max(j - 1, 0), hx, N0)) / hy
            hyx = 0.5 * (_cell_gy_2d(c, min(i + 1, N0 - 1), j, hy, N1)
                         - _cell_gy_2d(c, max(i - 1, 0), j, hy, N1)) / hx
            gxc = _cell_gx_2d(c, i, j, hx, N0)
            gyc = _cell_gy_2d(c, i, j, hy, N1)
            g2 = gxc * gxc + gyc * gyc
            h2 = hxx * hxx + hyy * hyy + hxy * hxy + hyx * hyx
            d_c[i, j] = fastpow(g2, qexp - 1.0) * h2
    for i in range(N0 + 1):
        for j in range(N1):
            if 1 <= i <= N0 - 1:
                a = fastpow(n[i, j] + eps, sexp)
                b = fastpow(n[i - 1, j] + eps, sexp)
                g = (a - b) / hx
                dnx[i, j] = g * g
            else:
                dnx[i, j] = 0.0
    for i in range(N0):
        for j in range(N1 + 1):
            if 1 <= j <= N1 - 1:
                a = fastpow(n[i, j] + eps, sexp)
                b = fastpow(n[i, j - 1] + eps, sexp)
                g = (a - b) / hy
                dny[i, j] = g * g
            else:
                dny[i, j] = 0.0
    # velocity gradient samples
    for i in range(N0):
        for j in range(N1):
            g = (ux[i + 1, j] - ux[i, j]) / hx
            gux_n[i, j] = g * g
            g = (uy[i, j + 1] - uy[i, j]) / hy
            guy_n[i, j] = g * g
    for i in range(N0 + 1):
        for j in range(N1 + 1):
            lo = -ux[i, 0] if j == 0 else ux[i, j - 1]
            hi = -ux[i, N1 - 1] if j == N1 else ux[i, j]
            g = (hi - lo) / hy
            gux_t[i, j] = g * g
            lo = -uy[0, j] if i == 0 else uy[i - 1, j]
            hi = -uy[N0 - 1, j] if i == N0 else uy[i, j]
            g = (hi - lo) / hx
            guy_t[i, j] = g * g
    # vector Laplacian squared at interior faces
    for i in range(N0 + 1):
        for j in range(N1):
            lux[i, j] = 0.0
    for i in range(N0):
        for j in range(N1 + 1):
            luy[i, j] = 0.0
    for i in range(1, N0):
        for j in range(N1):
            uc = ux[i, j]
            ub = -uc if j == 0 else ux[i, j - 1]
            ut = -uc if j == N1 - 1 else ux[i, j + 1]
            lap = (ux[i + 1, j] - 2.0 * uc + ux[i - 1, j]) / (hx * hx) \
                + (ut - 2.0 * uc + ub) / (hy * hy)
            lux[i, j] = lap * lap
    for i in range(N0):
        for j in range(1, N1):
            uc = uy[i, j]
            ul = -uc if i == 0 else uy[i - 1, j]
            ur = -uc if i == N0 - 1 else uy[i + 1, j]
            lap = (ur - 2.0 * uc + ul) / (hx * hx) \
                + (uy[i, j + 1] - 2.0 * uc + uy[i, j - 1]) / (hy * hy)
            luy[i, j] = lap * lap


@njit(cache=True, inline="always")
def _cell_gx_2d(c, i, j, hx, N0):
    gl = (c[i, j] - c[i - 1, j]) / hx if i >= 1 else 0.0
    gr = (c[i + 1, j] - c[i, j]) / hx if i + 1 <= N0 - 1 else 0.0
    return 0.5 * (gl + gr)


@njit(cache=True, inline="always")
def _cell_gy_2d(c, i, j, hy, N1):
    gl = (c[i, j] - c[i, j - 1]) / hy if j >= 1 else 0.0
    gr = (c[i, j + 1] - c[i, j]) / hy if j + 1 <= N1 - 1 else 0.0
    return 0.5 * (gl + gr)
