"""Numba-jitted ray-marching kernels.

Forward projectors march each ray at a fixed step with (bi/tri)linear
interpolation and accumulate in float64. Adjoint kernels are the literal
transposes (scatter with identical sample positions and weights), so the
dot-product identity holds to rounding error.

Weighted pixel/voxel-driven backprojectors used by FBP/FDK live here too.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange


@njit(cache=True, inline="always")
def _bilinear(img, nx, ny, x, y):
    # x, y in pixel index units (can be fractional); zero outside the grid
    ix = int(np.floor(x))
    iy = int(np.floor(y))
    fx = x - ix
    fy = y - iy
    val = 0.0
    if 0 <= ix < nx and 0 <= iy < ny:
        val += img[ix, iy] * (1 - fx) * (1 - fy)
    if 0 <= ix + 1 < nx and 0 <= iy < ny:
        val += img[ix + 1, iy] * fx * (1 - fy)
    if 0 <= ix < nx and 0 <= iy + 1 < ny:
        val += img[ix, iy + 1] * (1 - fx) * fy
    if 0 <= ix + 1 < nx and 0 <= iy + 1 < ny:
        val += img[ix + 1, iy + 1] * fx * fy
    return val


@njit(cache=True, inline="always")
def _bilinear_scatter(img, nx, ny, x, y, w):
    ix = int(np.floor(x))
    iy = int(np.floor(y))
    fx = x - ix
    fy = y - iy
    if 0 <= ix < nx and 0 <= iy < ny:
        img[ix, iy] += w * (1 - fx) * (1 - fy)
    if 0 <= ix + 1 < nx and 0 <= iy < ny:
        img[ix + 1, iy] += w * fx * (1 - fy)
    if 0 <= ix < nx and 0 <= iy + 1 < ny:
        img[ix, iy + 1] += w * (1 - fx) * fy
    if 0 <= ix + 1 < nx and 0 <= iy + 1 < ny:
        img[ix + 1, iy + 1] += w * fx * fy


@njit(cache=True, parallel=True)
def forward_parallel_2d(img, px, angles, ndet, ds, step, sino):
    nx, ny = img.shape
    cx = (nx - 1) / 2.0
    cy = (ny - 1) / 2.0
    half = 0.5 * px * np.sqrt(nx * nx + ny * ny) + 2 * px
    nsamp = int(np.ceil(2 * half / step)) + 1
    for v in prange(len(angles)):
        th = angles[v]
        c = np.cos(th)
        s = np.sin(th)
        for d in range(ndet):
            u = (d - (ndet - 1) / 2.0) * ds
            # ray: p(t) = u * (c, s) + t * (-s, c)
            acc = 0.0
            for k in range(nsamp):
                t = -half + k * step
                x = (u * c - t * s) / px + cx
                y = (u * s + t * c) / px + cy
                acc += _bilinear(img, nx, ny, x, y)
            sino[v, d] = acc * step


@njit(cache=True)
def adjoint_parallel_2d(sino, px, angles, ndet, ds, step, img):
    nx, ny = img.shape
    cx = (nx - 1) / 2.0
    cy = (ny - 1) / 2.0
    half = 0.5 * px * np.sqrt(nx * nx + ny * ny) + 2 * px
    nsamp = int(np.ceil(2 * half / step)) + 1
    for v in range(len(angles)):
        th = angles[v]
        c = np.cos(th)
        s = np.sin(th)
        for d in range(ndet):
            u = (d - (ndet - 1) / 2.0) * ds
            w = sino[v, d] * step
            if w == 0.0:
                continue
            for k in range(nsamp):
                t = -half + k * step
                x = (u * c - t * s) / px + cx
                y = (u * s + t * c) / px + cy
                _bilinear_scatter(img, nx, ny, x, y, w)


@njit(cache=True, parallel=True)
def forward_fan_2d(img, px, angles, ndet, ds, sod, sdd, step, sino):
    nx, ny = img.shape
    cx = (nx - 1) / 2.0
    cy = (ny - 1) / 2.0
    rfov = 0.5 * px * np.sqrt(nx * nx + ny * ny) + 2 * px
    for v in prange(len(angles)):
        b = angles[v]
        c = np.cos(b)
        s = np.sin(b)
        sx = sod * c
        sy = sod * s
        for d in range(ndet):
            u = (d - (ndet - 1) / 2.0) * ds
            # detector element position (flat detector, sdd from source)
            ex = sx - sdd * c - u * s
            ey = sy - sdd * s + u * c
            dx = ex - sx
            dy = ey - sy
            norm = np.sqrt(dx * dx + dy * dy)
            dx /= norm
            dy /= norm
            # closest approach of the ray to the rotation axis
            tc = -(sx * dx + sy * dy)
            acc = 0.0
            nsamp = int(np.ceil(2 * rfov / step)) + 1
            for k in range(nsamp):
                t = tc - rfov + k * step
                x = (sx + t * dx) / px + cx
                y = (sy + t * dy) / px + cy
                acc += _bilinear(img, nx, ny, x, y)
            sino[v, d] = acc * step


@njit(cache=True)
def adjoint_fan_2d(sino, px, angles, ndet, ds, sod, sdd, step, img):
    nx, ny = img.shape
    cx = (nx - 1) / 2.0
    cy = (ny - 1) / 2.0
    rfov = 0.5 * px * np.sqrt(nx * nx + ny * ny) + 2 * px
    for v in range(len(angles)):
        b = angles[v]
        c = np.cos(b)
        s = np.sin(b)
        sx = sod * c
        sy = sod * s
        for d in range(ndet):
            u = (d - (ndet - 1) / 2.0) * ds
            ex = sx - sdd * c - u * s
            ey = sy - sdd * s + u * c
            dx = ex - sx
            dy = ey - sy
            norm = np.sqrt(dx * dx + dy * dy)
            dx /= norm
            dy /= norm
            tc = -(sx * dx + sy * dy)
            w = sino[v, d] * step
            if w == 0.0:
                continue
            nsamp = int(np.ceil(2 * rfov / step)) + 1
            for k in range(nsamp):
                t = tc - rfov + k * step
                x = (sx + t * dx) / px + cx
                y = (sy + t * dy) / px + cy
                _bilinear_scatter(img, nx, ny, x, y, w)


@njit(cache=True, inline="always")
def _trilinear(vol, nx, ny, nz, x, y, z):
    ix = int(np.floor(x))
    iy = int(np.floor(y))
    iz = int(np.floor(z))
    fx = x - ix
    fy = y - iy
    fz = z - iz
    val = 0.0
    for a in range(2):
        xa = ix + a
        if xa < 0 or xa >= nx:
            continue
        wa = fx if a == 1 else 1 - fx
        for bb in range(2):
            yb = iy + bb
            if yb < 0 or yb >= ny:
                continue
            wb = fy if bb == 1 else 1 - fy
            for cc in range(2):
                zc = iz + cc
                if zc < 0 or zc >= nz:
                    continue
                wc = fz if cc == 1 else 1 - fz
                val += vol[xa, yb, zc] * wa * wb * wc
    return val


@njit(cache=True, inline="always")
def _trilinear_scatter(vol, nx, ny, nz, x, y, z, w):
    ix = int(np.floor(x))
    iy = int(np.floor(y))
    iz = int(np.floor(z))
    fx = x - ix
    fy = y - iy
    fz = z - iz
    for a in range(2):
        xa = ix + a
        if xa < 0 or xa >= nx:
            continue
        wa = fx if a == 1 else 1 - fx
        for bb in range(2):
            yb = iy + bb
            if yb < 0 or yb >= ny:
                continue
            wb = fy if bb == 1 else 1 - fy
            for cc in range(2):
                zc = iz + cc
                if zc < 0 or zc >= nz:
                    continue
                wc = fz if cc == 1 else 1 - fz
                vol[xa, yb, zc] += w * wa * wb * wc


@njit(cache=True, parallel=True)
def forward_cone_3d(vol, px, pz, angles, nrows, ndet, ds, dr, sod, sdd, step, sino):
    nx, ny, nz = vol.shape
    cx = (nx - 1) / 2.0
    cy = (ny - 1) / 2.0
    cz = (nz - 1) / 2.0
    rfov = 0.5 * px * np.sqrt(nx * nx + ny * ny) + 0.5 * pz * nz + 2 * px
    for v in prange(len(angles)):
        b = angles[v]
        c = np.cos(b)
        s = np.sin(b)
        sx = sod * c
        sy = sod * s
        for r in range(nrows):
            zdet = (r - (nrows - 1) / 2.0) * dr
            for d in range(ndet):
                u = (d - (ndet - 1) / 2.0) * ds
                ex = sx - sdd * c - u * s
                ey = sy - sdd * s + u * c
                ez = zdet
                dx = ex - sx
                dy = ey - sy
                dz = ez
                norm = np.sqrt(dx * dx + dy * dy + dz * dz)
                dx /= norm
                dy /= norm
                dz /= norm
                tc = -(sx * dx + sy * dy)
                acc = 0.0
                nsamp = int(np.ceil(2 * rfov / step)) + 1
                for k in range(nsamp):
                    t = tc - rfov + k * step
                    x = (sx + t * dx) / px + cx
                    y = (sy + t * dy) / px + cy
                    z = (t * dz) / pz + cz
                    acc += _trilinear(vol, nx, ny, nz, x, y, z)
                sino[v, r, d] = acc * step


@njit(cache=True)
def adjoint_cone_3d(sino, px, pz, angles, nrows, ndet, ds, dr, sod, sdd, step, vol):
    nx, ny, nz = vol.shape
    cx = (nx - 1) / 2.0
    cy = (ny - 1) / 2.0
    cz = (nz - 1) / 2.0
    rfov = 0.5 * px * np.sqrt(nx * nx + ny * ny) + 0.5 * pz * nz + 2 * px
    for v in range(len(angles)):
        b = angles[v]
        c = np.cos(b)
        s = np.sin(b)
        sx = sod * c
        sy = sod * s
        for r in range(nrows):
            zdet = (r - (nrows - 1) / 2.0) * dr
            for d in range(ndet):
                u = (d - (ndet - 1) / 2.0) * ds
                ex = sx - sdd * c - u * s
                ey = sy - sdd * s + u * c
                ez = zdet
                dx = ex - sx
                dy = ey - sy
                dz = ez
                norm = np.sqrt(dx * dx + dy * dy + dz * dz)
                dx /= norm
                dy /= norm
                dz /= norm
                tc = -(sx * dx + sy * dy)
                w = sino[v, r, d] * step
                if w == 0.0:
                    continue
                nsamp = int(np.ceil(2 * rfov / step)) + 1
                for k in range(nsamp):
                    t = tc - rfov + k * step
                    x = (sx + t * dx) / px + cx
                    y = (sy + t * dy) / px + cy
                    z = (t * dz) / pz + cz
                    _trilinear_scatter(vol, nx, ny, nz, x, y, z, w)


@njit(cache=True, parallel=True)
def backproject_parallel_pixel(filtered, px, angles, ndet, ds, out):
    """Pixel-driven parallel backprojection: out[x] = sum_v q[v, u(x)]."""
    nx, ny = out.shape
    cx = (nx - 1) / 2.0
    cy = (ny - 1) / 2.0
    nviews = len(angles)
    for ix in prange(nx):
        x = (ix - cx) * px
        for iy in range(ny):
            y = (iy - cy) * px
            acc = 0.0
            for v in range(nviews):
                th = angles[v]
                u = x * np.cos(th) + y * np.sin(th)
                du = u / ds + (ndet - 1) / 2.0
                i0 = int(np.floor(du))
                f = du - i0
                if 0 <= i0 < ndet - 1:
                    acc += filtered[v, i0] * (1 - f) + filtered[v, i0 + 1] * f
                elif i0 == ndet - 1 and f == 0.0:
                    acc += filtered[v, i0]
            out[ix, iy] = acc


@njit(cache=True, parallel=True)
def backproject_fan_pixel(filtered, px, angles, ndet, du_iso, sod, out):
    """Distance-weighted fan backprojection on isocenter-rescaled detector
    coordinates: out[x] = sum_v (sod/D)^2 * q[v, u_iso(x)]."""
    nx, ny = out.shape
    cx = (nx - 1) / 2.0
    cy = (ny - 1) / 2.0
    nviews = len(angles)
    for ix in prange(nx):
        x = (ix - cx) * px
        for iy in range(ny):
            y = (iy - cy) * px
            acc = 0.0
            for v in range(nviews):
                b = angles[v]
                cb = np.cos(b)
                sb = np.sin(b)
                dist = sod - (x * cb + y * sb)
                if dist <= 1e-6:
                    continue
                t = -x * sb + y * cb
                u = sod * t / dist
                du = u / du_iso + (ndet - 1) / 2.0
                i0 = int(np.floor(du))
                f = du - i0
                if 0 <= i0 < ndet - 1:
                    q = filtered[v, i0] * (1 - f) + filtered[v, i0 + 1] * f
                elif i0 == ndet - 1 and f == 0.0:
                    q = filtered[v, i0]
                else:
                    continue
                w = sod / dist
                acc += q * w * w
            out[ix, iy] = acc


@njit(cache=True, parallel=True)
def backproject_cone_voxel(filtered, px, pz, angles, nrows, ndet, du_iso, dv_iso, sod, out):
    """FDK cone-beam backprojection with 1/U^2 weighting; bilinear lookup in
    the (row, detector) plane of each filtered projection."""
    nx, ny, nz = out.shape
    cx = (nx - 1) / 2.0
    cy = (ny - 1) / 2.0
    cz = (nz - 1) / 2.0
    nviews = len(angles)
    for ix in prange(nx):
        x = (ix - cx) * px
        for iy in range(ny):
            y = (iy - cy) * px
            for iz in range(nz):
                z = (iz - cz) * pz
                acc = 0.0
                for v in range(nviews):
                    b = angles[v]
                    cb = np.cos(b)
                    sb = np.sin(b)
                    dist = sod - (x * cb + y * sb)
                    if dist <= 1e-6:
                        continue
                    t = -x * sb + y * cb
                    u = sod * t / dist
                    w_iso = sod * z / dist
                    du = u / du_iso + (ndet - 1) / 2.0
                    dv = w_iso / dv_iso + (nrows - 1) / 2.0
                    i0 = int(np.floor(du))
                    j0 = int(np.floor(dv))
                    fu = du - i0
                    fv = dv - j0
                    if i0 < 0 or i0 >= ndet - 1 or j0 < 0 or j0 >= nrows - 1:
                        continue
                    q = (
                        filtered[v, j0, i0] * (1 - fv) * (1 - fu)
                        + filtered[v, j0, i0 + 1] * (1 - fv) * fu
                        + filtered[v, j0 + 1, i0] * fv * (1 - fu)
                        + filtered[v, j0 + 1, i0 + 1] * fv * fu
                    )
                    w = sod / dist
                    acc += q * w * w
                out[ix, iy, iz] = acc
