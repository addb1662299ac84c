"""Fused per-step grid kernels for the time integrator.

One kernel call reads the current map once and produces, in a single pass:

* the explicit-Euler update projected back to the target,
* the three gradient integrals (|u_x|^2, |u_y|^2, <u_x, u_y>),
* the squared L2 norm of the tension field,
* the maximum pointwise energy density.

Rows are independent, so the row loop runs under prange; each row writes its
own partial sums into ``row_acc`` and the partials are combined afterwards
with numpy's pairwise summation.  That fixed reduction tree makes every
reported number bitwise independent of the thread count and schedule, which
is what the byte-identical trace and checkpoint/resume guarantees rest on.
"""

from __future__ import annotations

import math

import numpy as np
from numba import config as _numba_config
from numba import njit, prange

# one fixed threading layer; the reduction scheme makes results independent
# of it anyway, this only silences backend probing
_numba_config.THREADING_LAYER = "workqueue"

from .errors import ProjectionError
from .targets import SPHERE_TUBE, TORUS_CIRCLE_RADIUS, TORUS_TUBE, TargetManifold


@njit(cache=True, parallel=True, fastmath=False)
def _step_flat_torus(u, cxx, cxy, cyy, dt, out, row_acc, bad_col):  # pragma: no cover
    hh, ww, _ = u.shape
    i2hx = 0.5 * ww
    i2hy = 0.5 * hh
    ihx2 = float(ww * ww)
    ihy2 = float(hh * hh)
    i4 = 0.25 * ww * hh
    rad = TORUS_CIRCLE_RADIUS
    inv_r2 = 1.0 / (rad * rad)
    lo = (1.0 - TORUS_TUBE) * rad
    hi = (1.0 + TORUS_TUBE) * rad
    bad_total = 0
    for i in prange(hh):
        ip = i + 1 if i < hh - 1 else 0
        im = i - 1 if i > 0 else hh - 1
        s_xx = 0.0
        s_yy = 0.0
        s_xy = 0.0
        s_t2 = 0.0
        dmax = -1.0
        bad_here = -1
        for j in range(ww):
            jp = j + 1 if j < ww - 1 else 0
            jm = j - 1 if j > 0 else ww - 1
            gxx = 0.0
            gyy = 0.0
            gxy = 0.0
            l0 = 0.0
            l1 = 0.0
            l2 = 0.0
            l3 = 0.0
            for k in range(4):
                uc = u[i, j, k]
                ue = u[i, jp, k]
                uw = u[i, jm, k]
                un = u[ip, j, k]
                us = u[im, j, k]
                gx = (ue - uw) * i2hx
                gy = (un - us) * i2hy
                gxx += gx * gx
                gyy += gy * gy
                gxy += gx * gy
                lap = (
                    cxx * (ue - 2.0 * uc + uw) * ihx2
                    + cyy * (un - 2.0 * uc + us) * ihy2
                    + cxy * (u[ip, jp, k] - u[ip, jm, k] - u[im, jp, k] + u[im, jm, k]) * i4
                )
                if k == 0:
                    l0 = lap
                elif k == 1:
                    l1 = lap
                elif k == 2:
                    l2 = lap
                else:
                    l3 = lap
            s_xx += gxx
            s_yy += gyy
            s_xy += gxy
            dens = 0.5 * (cxx * gxx + cyy * gyy + cxy * gxy)
            if dens > dmax:
                dmax = dens
            u0 = u[i, j, 0]
            u1 = u[i, j, 1]
            u2 = u[i, j, 2]
            u3 = u[i, j, 3]
            # tangential part: remove the two radial normals of the circle factors
            d1 = (l0 * u0 + l1 * u1) * inv_r2
            d2 = (l2 * u2 + l3 * u3) * inv_r2
            t0 = l0 - d1 * u0
            t1 = l1 - d1 * u1
            t2 = l2 - d2 * u2
            t3 = l3 - d2 * u3
            s_t2 += t0 * t0 + t1 * t1 + t2 * t2 + t3 * t3
            v0 = u0 + dt * t0
            v1 = u1 + dt * t1
            v2 = u2 + dt * t2
            v3 = u3 + dt * t3
            q1 = math.sqrt(v0 * v0 + v1 * v1)
            q2 = math.sqrt(v2 * v2 + v3 * v3)
            if q1 <= lo or q1 >= hi or q2 <= lo or q2 >= hi:
                if bad_here < 0:
                    bad_here = j
            s1 = rad / q1
            s2 = rad / q2
            out[i, j, 0] = v0 * s1
            out[i, j, 1] = v1 * s1
            out[i, j, 2] = v2 * s2
            out[i, j, 3] = v3 * s2
        row_acc[i, 0] = s_xx
        row_acc[i, 1] = s_yy
        row_acc[i, 2] = s_xy
        row_acc[i, 3] = s_t2
        row_acc[i, 4] = dmax
        bad_col[i] = bad_here
        if bad_here >= 0:
            bad_total += 1
    return bad_total


@njit(cache=True, parallel=True, fastmath=False)
def _step_sphere(u, cxx, cxy, cyy, dt, out, row_acc, bad_col):  # pragma: no cover
    hh, ww, kk = u.shape
    i2hx = 0.5 * ww
    i2hy = 0.5 * hh
    ihx2 = float(ww * ww)
    ihy2 = float(hh * hh)
    i4 = 0.25 * ww * hh
    lo = 1.0 - SPHERE_TUBE
    hi = 1.0 + SPHERE_TUBE
    bad_total = 0
    for i in prange(hh):
        ip = i + 1 if i < hh - 1 else 0
        im = i - 1 if i > 0 else hh - 1
        lap = np.empty(kk)
        vec = np.empty(kk)
        s_xx = 0.0
        s_yy = 0.0
        s_xy = 0.0
        s_t2 = 0.0
        dmax = -1.0
        bad_here = -1
        for j in range(ww):
            jp = j + 1 if j < ww - 1 else 0
            jm = j - 1 if j > 0 else ww - 1
            gxx = 0.0
            gyy = 0.0
            gxy = 0.0
            pp = 0.0
            lp = 0.0
            for k in range(kk):
                uc = u[i, j, k]
                ue = u[i, jp, k]
                uw = u[i, jm, k]
                un = u[ip, j, k]
                us = u[im, j, k]
                gx = (ue - uw) * i2hx
                gy = (un - us) * i2hy
                gxx += gx * gx
                gyy += gy * gy
                gxy += gx * gy
                lk = (
                    cxx * (ue - 2.0 * uc + uw) * ihx2
                    + cyy * (un - 2.0 * uc + us) * ihy2
                    + cxy * (u[ip, jp, k] - u[ip, jm, k] - u[im, jp, k] + u[im, jm, k]) * i4
                )
                lap[k] = lk
                pp += uc * uc
                lp += lk * uc
            s_xx += gxx
            s_yy += gyy
            s_xy += gxy
            dens = 0.5 * (cxx * gxx + cyy * gyy + cxy * gxy)
            if dens > dmax:
                dmax = dens
            coef = lp / pp
            q2 = 0.0
            for k in range(kk):
                tk = lap[k] - coef * u[i, j, k]
                s_t2 += tk * tk
                vk = u[i, j, k] + dt * tk
                vec[k] = vk
                q2 += vk * vk
            q = math.sqrt(q2)
            if q <= lo or q >= hi:
                if bad_here < 0:
                    bad_here = j
            inv_q = 1.0 / q
            for k in range(kk):
                out[i, j, k] = vec[k] * inv_q
        row_acc[i, 0] = s_xx
        row_acc[i, 1] = s_yy
        row_acc[i, 2] = s_xy
        row_acc[i, 3] = s_t2
        row_acc[i, 4] = dmax
        bad_col[i] = bad_here
        if bad_here >= 0:
            bad_total += 1
    return bad_total


class StepStats:
    """Scalar diagnostics of one state, produced by a single kernel pass."""

    __slots__ = ("ixx", "iyy", "ixy", "tension_l2", "max_density", "energy",
                 "phi_mean", "projhopf_l2")

    def __init__(self, ixx, iyy, ixy, tension_l2, max_density, a, b):
        self.ixx = ixx
        self.iyy = iyy
        self.ixy = ixy
        self.tension_l2 = tension_l2
        self.max_density = max_density
        cxx = a * a / b + b
        cyy = 1.0 / b
        cxy = -2.0 * a / b
        self.energy = 0.5 * (cxx * ixx + cyy * iyy + cxy * ixy)
        # mean Hopf coefficient, from the same integrals
        re = ((b * b - a * a) * ixx + 2.0 * a * ixy - iyy) / b
        im = 2.0 * (a * ixx - ixy)
        self.phi_mean = complex(re, im)
        self.projhopf_l2 = 2.0 * math.hypot(re, im)

    def grad_sum(self) -> float:
        return self.tension_l2 + self.projhopf_l2


class KernelWorkspace:
    """Preallocated buffers so the run loop never allocates per step."""

    def __init__(self, grid_shape: tuple[int, int], ambient_dim: int):
        hh, ww = grid_shape
        self.out = np.empty((hh, ww, ambient_dim), dtype=np.float64)
        self.row_acc = np.empty((hh, 5), dtype=np.float64)
        self.bad_col = np.empty(hh, dtype=np.int64)


def advance(u_values: np.ndarray, target: TargetManifold, a: float, b: float,
            dt: float, ws: KernelWorkspace) -> StepStats:
    """Run one fused pass: diagnostics of the current map plus the Euler update.

    The updated map lands in ``ws.out``.  Raises ProjectionError, naming the
    first offending grid index, if any updated point leaves the tube where
    the closest-point projection is defined.
    """
    cxx = a * a / b + b
    cyy = 1.0 / b
    cxy = -2.0 * a / b
    if target.kind == "flat-torus":
        bad = _step_flat_torus(u_values, cxx, cxy, cyy, dt, ws.out, ws.row_acc, ws.bad_col)
    else:
        bad = _step_sphere(u_values, cxx, cxy, cyy, dt, ws.out, ws.row_acc, ws.bad_col)
    if bad:
        rows = np.nonzero(ws.bad_col >= 0)[0]
        i = int(rows[0])
        j = int(ws.bad_col[i])
        raise ProjectionError(
            f"projection undefined at grid index ({i}, {j}): "
            "the Euler update left the tubular neighbourhood (dt too large?)",
            grid_index=(i, j),
        )
    hh, ww = u_values.shape[0], u_values.shape[1]
    scale = 1.0 / (hh * ww)
    # fixed pairwise tree over the per-row partials
    ixx = float(np.sum(ws.row_acc[:, 0])) * scale
    iyy = float(np.sum(ws.row_acc[:, 1])) * scale
    ixy = float(np.sum(ws.row_acc[:, 2])) * scale
    t2 = float(np.sum(ws.row_acc[:, 3])) * scale
    dmax = float(np.max(ws.row_acc[:, 4]))
    return StepStats(ixx, iyy, ixy, math.sqrt(t2), dmax, a, b)
