"""Collar geometry around short closed geodesics, in closed form.

A simple closed geodesic of length ell on a closed hyperbolic surface has a
cylindrical neighbourhood [-X(ell), X(ell)] x S^1 with metric
rho(x)^2 (dx^2 + dtheta^2), where

    rho(x) = ell / (2 pi cos(ell x / (2 pi))),
    X(ell) = (2 pi / ell) (pi/2 - arctan(sinh(ell/2))).

The intrinsic width w between the collar ends satisfies
sinh(ell/2) sinh(w/2) = 1, and an incompressible map into a target whose
shortest closed geodesic has length c has energy at least
phi(ell)/ell with phi(ell) = c^2 (pi/2 - arctan(sinh(ell/2))), which equals
(c^2 / 2 pi) X(ell) and diverges like c^2 pi / (2 ell) as ell -> 0.

Everything here is a pure function of scalars; the only numerics beyond
closed forms is the adaptive-quadrature oracle used to cross-check the
width identity.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad


def _require_positive(ell: float) -> None:
    if not (ell > 0.0) or not math.isfinite(ell):
        raise ValueError(f"geodesic length must be positive and finite, got {ell}")


def collar_halfwidth(ell: float) -> float:
    """Half-width X(ell) of the collar in the cylinder coordinate."""
    _require_positive(ell)
    return (2.0 * math.pi / ell) * (math.pi / 2.0 - math.atan(math.sinh(ell / 2.0)))


def collar_density(x: float, ell: float) -> float:
    """Conformal density rho(x) across the collar; defined for |x| <= X(ell)."""
    _require_positive(ell)
    if abs(x) > collar_halfwidth(ell):
        raise ValueError(f"|x| = {abs(x)} exceeds the collar half-width X({ell})")
    return ell / (2.0 * math.pi * math.cos(ell * x / (2.0 * math.pi)))


def collar_width(ell: float) -> float:
    """Intrinsic distance w between the collar ends: sinh(ell/2) sinh(w/2) = 1."""
    _require_positive(ell)
    return 2.0 * math.asinh(1.0 / math.sinh(ell / 2.0))


def collar_width_by_quadrature(ell: float) -> float:
    """Independent route to the width: integrate the density along the axis."""
    _require_positive(ell)
    x_max = collar_halfwidth(ell)
    val, _err = quad(lambda x: collar_density(x, ell), -x_max, x_max,
                     epsabs=1e-12, epsrel=1e-12, limit=200)
    return val


def incompressible_energy_bound(ell: float, c: float) -> float:
    """Lower energy bound phi(ell)/ell for incompressible maps; c is the target systole."""
    _require_positive(ell)
    if c < 0.0:
        raise ValueError(f"target systole must be nonnegative, got {c}")
    phi = c * c * (math.pi / 2.0 - math.atan(math.sinh(ell / 2.0)))
    return phi / ell


def collar_report(lengths=(0.01, 0.1, 0.5, 1.0, 2.0, 5.0), c: float = 1.0):
    """Rows (ell, X, w, integral-of-rho, bound) plus per-row identity residuals.

    Returned residuals: |integral - w| and |bound - (c^2/2pi) X|; both should
    sit at quadrature/rounding level.
    """
    rows = []
    for ell in lengths:
        x_half = collar_halfwidth(ell)
        w = collar_width(ell)
        integral = collar_width_by_quadrature(ell)
        bound = incompressible_energy_bound(ell, c)
        resid_width = abs(integral - w)
        resid_bound = abs(bound - (c * c / (2.0 * math.pi)) * x_half)
        rows.append((ell, x_half, w, integral, bound, resid_width, resid_bound))
    return rows


def verify_collar(lengths=(0.01, 0.1, 0.5, 1.0, 2.0, 5.0), c: float = 1.0,
                  width_tol: float = 1e-8, bound_tol: float = 1e-12) -> tuple[bool, list]:
    """Check the width identity and the bound identity on a grid of lengths."""
    rows = collar_report(lengths, c)
    ok = all(r[5] < width_tol and r[6] < bound_tol for r in rows)
    # strict monotonicity of X, w and the bound along increasing ell
    xs = [r[1] for r in rows]
    ws = [r[2] for r in rows]
    bs = [r[4] for r in rows]
    ok = ok and all(u > v for u, v in zip(xs, xs[1:]))
    ok = ok and all(u > v for u, v in zip(ws, ws[1:]))
    ok = ok and all(u > v for u, v in zip(bs, bs[1:]))
    return ok, rows


def small_length_divergence_ratio(ell: float, c: float = 1.0) -> float:
    """bound(ell, c) / (c^2 pi / (2 ell)); tends to 1 as ell -> 0."""
    return incompressible_energy_bound(ell, c) * ell / (c * c * math.pi / 2.0)
