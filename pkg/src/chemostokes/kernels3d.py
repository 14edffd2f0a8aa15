"""Fused 3D stencil kernels, mirroring :mod:`chemostokes.kernels2d`.

Cells are ``(N0, N1, N2)``; the face-normal component along axis ``a``
gains one entry along that axis.  All loops are sequential.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .kernels2d import F_LAW_LINEAR, S_LAW_CONSTANT, fastpow


@njit(cache=True, inline="always")
def _face_grad(c, i, j, k, axis, h, N):
    """Gradient on the face below cell (i,j,k) along ``axis``; 0 at walls."""
    if axis == 0:
        if i < 1 or i > N - 1:
            return 0.0
        return (c[i, j, k] - c[i - 1, j, k]) / h
    elif axis == 1:
        if j < 1 or j > N - 1:
            return 0.0
        return (c[i, j, k] - c[i, j - 1, k]) / h
    else:
        if k < 1 or k > N - 1:
            return 0.0
        return (c[i, j, k] - c[i, j, k - 1]) / h


@njit(cache=True)
def chemo_velocity_3d(n, c, ux, uy, uz, rho_x, rho_y, rho_z,
                      M, lm2, s_code, s0, hx, hy, hz, wx, wy, wz):
    """Tensor drift normal components at faces; returns max transport speed."""
    N0, N1, N2 = n.shape
    vmax = 0.0
    wx[:, :, :] = 0.0
    wy[:, :, :] = 0.0
    wz[:, :, :] = 0.0
    # x-faces
    for i in range(1, N0):
        for j in range(N1):
            for k in range(N2):
                gx = (c[i, j, k] - c[i - 1, j, k]) / hx
                gy = 0.25 * (
                    _face_grad(c, i - 1, j, k, 1, hy, N1)
                    + _face_grad(c, i - 1, j + 1, k, 1, hy, N1)
                    + _face_grad(c, i, j, k, 1, hy, N1)
                    + _face_grad(c, i, j + 1, k, 1, hy, N1)
                )
                gz = 0.25 * (
                    _face_grad(c, i - 1, j, k, 2, hz, N2)
                    + _face_grad(c, i - 1, j, k + 1, 2, hz, N2)
                    + _face_grad(c, i, j, k, 2, hz, N2)
                    + _face_grad(c, i, j, k + 1, 2, hz, N2)
                )
                nf = 0.5 * (n[i - 1, j, k] + n[i, j, k])
                cf = 0.5 * (c[i - 1, j, k] + c[i, j, k])
                st = s0 if s_code == S_LAW_CONSTANT else s0 * (1.0 + cf)
                coef = rho_x[i, j, k] * fastpow(nf, lm2) * st
                w0 = coef * (M[0, 0] * gx + M[0, 1] * gy + M[0, 2] * gz)
                w1 = coef * (M[1, 0] * gx + M[1, 1] * gy + M[1, 2] * gz)
                w2 = coef * (M[2, 0] * gx + M[2, 1] * gy + M[2, 2] * gz)
                wx[i, j, k] = w0
                sp = abs(ux[i, j, k]) + np.sqrt(w0 * w0 + w1 * w1 + w2 * w2)
                if sp > vmax:
                    vmax = sp
    # y-faces
    for i in range(N0):
        for j in range(1, N1):
            for k in range(N2):
                gy = (c[i, j, k] - c[i, j - 1, k]) / hy
                gx = 0.25 * (
                    _face_grad(c, i, j - 1, k, 0, hx, N0)
                    + _face_grad(c, i + 1, j - 1, k, 0, hx, N0)
                    + _face_grad(c, i, j, k, 0, hx, N0)
                    + _face_grad(c, i + 1, j, k, 0, hx, N0)
                )
                gz = 0.25 * (
                    _face_grad(c, i, j - 1, k, 2, hz, N2)
                    + _face_grad(c, i, j - 1, k + 1, 2, hz, N2)
                    + _face_grad(c, i, j, k, 2, hz, N2)
                    + _face_grad(c, i, j, k + 1, 2, hz, N2)
                )
                nf = 0.5 * (n[i, j - 1, k] + n[i, j, k])
                cf = 0.5 * (c[i, j - 1, k] + c[i, j, k])
                st = s0 if s_code == S_LAW_CONSTANT else s0 * (1.0 + cf)
                coef = rho_y[i, j, k] * fastpow(nf, lm2) * st
                w0 = coef * (M[0, 0] * gx + M[0, 1] * gy + M[0, 2] * gz)
                w1 = coef * (M[1, 0] * gx + M[1, 1] * gy + M[1, 2] * gz)
                w2 = coef * (M[2, 0] * gx + M[2, 1] * gy + M[2, 2] * gz)
                wy[i, j, k] = w1
                sp = abs(uy[i, j, k]) + np.sqrt(w0 * w0 + w1 * w1 + w2 * w2)
                if sp > vmax:
                    vmax = sp
    # z-faces
    for i in range(N0):
        for j in range(N1):
            for k in range(1, N2):
                gz = (c[i, j, k] - c[i, j, k - 1]) / hz
                gx = 0.25 * (
                    _face_grad(c, i, j, k - 1, 0, hx, N0)
                    + _face_grad(c, i + 1, j, k - 1, 0, hx, N0)
                    + _face_grad(c, i, j, k, 0, hx, N0)
                    + _face_grad(c, i + 1, j, k, 0, hx, N0)
                )
                gy = 0.25 * (
                    _face_grad(c, i, j, k - 1, 1, hy, N1)
                    + _face_grad(c, i, j + 1, k - 1, 1, hy, N1)
                    + _face_grad(c, i, j, k, 1, hy, N1)
                    + _face_grad(c, i, j + 1, k, 1, hy, N1)
                )
                nf = 0.5 * (n[i, j, k - 1] + n[i, j, k])
                cf = 0.5 * (c[i, j, k - 1] + c[i, j, k])
                st = s0 if s_code == S_LAW_CONSTANT else s0 * (1.0 + cf)
                coef = rho_z[i, j, k] * fastpow(nf, lm2) * st
                w0 = coef * (M[0, 0] * gx + M[0, 1] * gy + M[0, 2] * gz)
                w1 = coef * (M[1, 0] * gx + M[1, 1] * gy + M[1, 2] * gz)
                w2 = coef * (M[2, 0] * gx + M[2, 1] * gy + M[2, 2] * gz)
                wz[i, j, k] = w2
                sp = abs(uz[i, j, k]) + np.sqrt(w0 * w0 + w1 * w1 + w2 * w2)
                if sp > vmax:
                    vmax = sp
    for i in range(1, N0):
        for j in range(N1):
            for k in range(N2):
                if abs(ux[i, j, k]) > vmax:
                    vmax = abs(ux[i, j, k])
    for i in range(N0):
        for j in range(1, N1):
            for k in range(N2):
                if abs(uy[i, j, k]) > vmax:
                    vmax = abs(uy[i, j, k])
    for i in range(N0):
        for j in range(N1):
            for k in range(1, N2):
                if abs(uz[i, j, k]) > vmax:
                    vmax = abs(uz[i, j, k])
    return vmax


@njit(cache=True)
def donor_flux_3d(f, wx, wy, wz, Fx, Fy, Fz):
    N0, N1, N2 = f.shape
    for i in range(1, N0):
        for j in range(N1):
            for k in range(N2):
                w = wx[i, j, k]
                donor = f[i - 1, j, k] if w > 0.0 else f[i, j, k]
                Fx[i, j, k] += donor * w
    for i in range(N0):
        for j in range(1, N1):
            for k in range(N2):
                w = wy[i, j, k]
                donor = f[i, j - 1, k] if w > 0.0 else f[i, j, k]
                Fy[i, j, k] += donor * w
    for i in range(N0):
        for j in range(N1):
            for k in range(1, N2):
                w = wz[i, j, k]
                donor = f[i, j, k - 1] if w > 0.0 else f[i, j, k]
                Fz[i, j, k] += donor * w


@njit(cache=True)
def subtract_gradient_3d(phi, hx, hy, hz, Fx, Fy, Fz):
    N0, N1, N2 = phi.shape
    for i in range(1, N0):
        for j in range(N1):
            for k in range(N2):
                Fx[i, j, k] -= (phi[i, j, k] - phi[i - 1, j, k]) / hx
    for i in range(N0):
        for j in range(1, N1):
            for k in range(N2):
                Fy[i, j, k] -= (phi[i, j, k] - phi[i, j - 1, k]) / hy
    for i in range(N0):
        for j in range(N1):
            for k in range(1, N2):
                Fz[i, j, k] -= (phi[i, j, k] - phi[i, j, k - 1]) / hz


@njit(cache=True)
def divergence_update_3d(n, Fx, Fy, Fz, hx, hy, hz, dt, out):
    N0, N1, N2 = n.shape
    mn = np.inf
    for i in range(N0):
        for j in range(N1):
            for k in range(N2):
                d = (Fx[i + 1, j, k] - Fx[i, j, k]) / hx \
                    + (Fy[i, j + 1, k] - Fy[i, j, k]) / hy \
                    + (Fz[i, j, k + 1] - Fz[i, j, k]) / hz
                v = n[i, j, k] - dt * d
                out[i, j, k] = v
                if v < mn:
                    mn = v
    return mn


@njit(cache=True)
def step_c_3d(c, n, ux, uy, uz, hx, hy, hz, dt, f_code, out):
    N0, N1, N2 = c.shape
    mn = np.inf
    mx = -np.inf
    for i in range(N0):
        for j in range(N1):
            for k in range(N2):
                cc = c[i, j, k]
                cl = c[i - 1, j, k] if i >= 1 else cc
                cr = c[i + 1, j, k] if i + 1 <= N0 - 1 else cc
                cb = c[i, j - 1, k] if j >= 1 else cc
                ct = c[i, j + 1, k] if j + 1 <= N1 - 1 else cc
                cd = c[i, j, k - 1] if k >= 1 else cc
                cu = c[i, j, k + 1] if k + 1 <= N2 - 1 else cc
                lap = (cr - 2.0 * cc + cl) / (hx * hx) \
                    + (ct - 2.0 * cc + cb) / (hy * hy) \
                    + (cu - 2.0 * cc + cd) / (hz * hz)
                adv = 0.0
                if ux[i, j, k] > 0.0:
                    adv += ux[i, j, k] * (cc - cl) / hx
                if ux[i + 1, j, k] < 0.0:
                    adv += ux[i + 1, j, k] * (cr - cc) / hx
                if uy[i, j, k] > 0.0:
                    adv += uy[i, j, k] * (cc - cb) / hy
                if uy[i, j + 1, k] < 0.0:
                    adv += uy[i, j + 1, k] * (ct - cc) / hy
                if uz[i, j, k] > 0.0:
                    adv += uz[i, j, k] * (cc - cd) / hz
                if uz[i, j, k + 1] < 0.0:
                    adv += uz[i, j, k + 1] * (cu - cc) / hz
                fc = cc if f_code == F_LAW_LINEAR else cc / (1.0 + cc)
                v = cc + dt * (lap - adv - n[i, j, k] * fc)
                out[i, j, k] = v
                if v < mn:
                    mn = v
                if v > mx:
                    mx = v
    return mn, mx


@njit(cache=True)
def ustar_3d(ux, uy, uz, n, gpx, gpy, gpz, hx, hy, hz, dt, outx, outy, outz):
    N0, N1, N2 = n.shape
    outx[:, :, :] = 0.0
    outy[:, :, :] = 0.0
    outz[:, :, :] = 0.0
    for i in range(1, N0):
        for j in range(N1):
            for k in range(N2):
                uc = ux[i, j, k]
                ub = -uc if j == 0 else ux[i, j - 1, k]
                ut = -uc if j == N1 - 1 else ux[i, j + 1, k]
                ud = -uc if k == 0 else ux[i, j, k - 1]
                uu = -uc if k == N2 - 1 else ux[i, j, k + 1]
                lap = (ux[i + 1, j, k] - 2.0 * uc + ux[i - 1, j, k]) / (hx * hx) \
                    + (ut - 2.0 * uc + ub) / (hy * hy) \
                    + (uu - 2.0 * uc + ud) / (hz * hz)
                nf = 0.5 * (n[i - 1, j, k] + n[i, j, k])
                outx[i, j, k] = uc + dt * (lap + nf * gpx)
    for i in range(N0):
        for j in range(1, N1):
            for k in range(N2):
                uc = uy[i, j, k]
                ul = -uc if i == 0 else uy[i - 1, j, k]
                ur = -uc if i == N0 - 1 else uy[i + 1, j, k]
                ud = -uc if k == 0 else uy[i, j, k - 1]
                uu = -uc if k == N2 - 1 else uy[i, j, k + 1]
                lap = (ur - 2.0 * uc + ul) / (hx * hx) \
                    + (uy[i, j + 1, k] - 2.0 * uc + uy[i, j - 1, k]) / (hy * hy) \
                    + (uu - 2.0 * uc + ud) / (hz * hz)
                nf = 0.5 * (n[i, j - 1, k] + n[i, j, k])
                outy[i, j, k] = uc + dt * (lap + nf * gpy)
    for i in range(N0):
        for j in range(N1):
            for k in range(1, N2):
                uc = uz[i, j, k]
                ul = -uc if i == 0 else uz[i - 1, j, k]
                ur = -uc if i == N0 - 1 else uz[i + 1, j, k]
                ub = -uc if j == 0 else uz[i, j - 1, k]
                ut = -uc if j == N1 - 1 else uz[i, j + 1, k]
                lap = (ur - 2.0 * uc + ul) / (hx * hx) \
                    + (ut - 2.0 * uc + ub) / (hy * hy) \
                    + (uz[i, j, k + 1] - 2.0 * uc + uz[i, j, k - 1]) / (hz * hz)
                nf = 0.5 * (n[i, j, k - 1] + n[i, j, k])
                outz[i, j, k] = uc + dt * (lap + nf * gpz)


@njit(cache=True)
def div_mac_3d(ux, uy, uz, hx, hy, hz, out):
    N0, N1, N2 = out.shape
    worst = 0.0
    for i in range(N0):
        for j in range(N1):
            for k in range(N2):
                d = (ux[i + 1, j, k] - ux[i, j, k]) / hx \
                    + (uy[i, j + 1, k] - uy[i, j, k]) / hy \
                    + (uz[i, j, k + 1] - uz[i, j, k]) / hz
                out[i, j, k] = d
                if abs(d) > worst:
                    worst = abs(d)
    return worst


@njit(cache=True)
def lap_cells_neumann_3d(x, hx, hy, hz, out):
    N0, N1, N2 = x.shape
    for i in range(N0):
        for j in range(N1):
            for k in range(N2):
                xc = x[i, j, k]
                xl = x[i - 1, j, k] if i >= 1 else xc
                xr = x[i + 1, j, k] if i + 1 <= N0 - 1 else xc
                xb = x[i, j - 1, k] if j >= 1 else xc
                xt = x[i, j + 1, k] if j + 1 <= N1 - 1 else xc
                xd = x[i, j, k - 1] if k >= 1 else xc
                xu = x[i, j, k + 1] if k + 1 <= N2 - 1 else xc
                out[i, j, k] = (xr - 2.0 * xc + xl) / (hx * hx) \
                    + (xt - 2.0 * xc + xb) / (hy * hy) \
                    + (xu - 2.0 * xc + xd) / (hz * hz)


@njit(cache=True)
def correct_velocity_3d(ux, uy, uz, psi, hx, hy, hz, dt):
    N0, N1, N2 = psi.shape
    for i in range(1, N0):
        for j in range(N1):
            for k in range(N2):
                ux[i, j, k] -= dt * (psi[i, j, k] - psi[i - 1, j, k]) / hx
    for i in range(N0):
        for j in range(1, N1):
            for k in range(N2):
                uy[i, j, k] -= dt * (psi[i, j, k] - psi[i, j - 1, k]) / hy
    for i in range(N0):
        for j in range(N1):
            for k in range(1, N2):
                uz[i, j, k] -= dt * (psi[i, j, k] - psi[i, j, k - 1]) / hz
