"""Discrete fields on the periodic unit square and the operators acting on them.

Grid convention: values[i, j] sits at (x, y) = (j/W, i/H); both axes wrap.
Derivatives are centered second-order differences, the mixed derivative is
the composition of the two first differences, and integrals over the unit
square are plain node means (trapezoidal = midpoint by periodicity, which is
spectrally accurate on trigonometric integrands).

Quadratic differentials are stored as the complex coefficient of dz^2 in the
isothermal coordinate z of the current lattice.  The isothermal frame is
Euclidean, where |dz^2| = 2, and that factor is applied exactly once, inside
``qd_norms``.  Fields of dbar-coefficients are measured with the same
pointwise factor, except where a norm is explicitly documented as
unit-weight (see harness.hopf_inequality_terms).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .lattice import LatticeParams
from .targets import TargetManifold


@dataclass
class MapField:
    """Doubly periodic grid of ambient points constrained to a target manifold."""

    values: np.ndarray  # (H, W, K) float64
    target: TargetManifold

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=np.float64)
        if v.ndim != 3:
            raise ValueError(f"map values must be (H, W, K), got shape {v.shape}")
        if v.shape[2] != self.target.ambient_dim:
            raise ValueError(
                f"ambient dimension mismatch: values have K={v.shape[2]}, "
                f"target {self.target.name} needs {self.target.ambient_dim}"
            )
        object.__setattr__(self, "values", v)

    @property
    def grid_shape(self) -> tuple[int, int]:
        return self.values.shape[0], self.values.shape[1]

    def copy(self) -> "MapField":
        return MapField(self.values.copy(), self.target)


@dataclass
class QuadDiffField:
    """Grid of complex dz^2-coefficients in the isothermal coordinate."""

    values: np.ndarray  # (H, W) complex128

    def __post_init__(self):
        v = np.ascontiguousarray(self.values, dtype=np.complex128)
        if v.ndim != 2:
            raise ValueError(f"coefficient grid must be 2-D, got shape {v.shape}")
        object.__setattr__(self, "values", v)


# -- stencils -----------------------------------------------------------------


def partial_x(f: np.ndarray) -> np.ndarray:
    """Centered x-derivative with periodic wrap (x runs along axis 1)."""
    w = f.shape[1]
    return (np.roll(f, -1, axis=1) - np.roll(f, 1, axis=1)) * (0.5 * w)


def partial_y(f: np.ndarray) -> np.ndarray:
    h = f.shape[0]
    return (np.roll(f, -1, axis=0) - np.roll(f, 1, axis=0)) * (0.5 * h)


def partial_xx(f: np.ndarray) -> np.ndarray:
    w = f.shape[1]
    return (np.roll(f, -1, axis=1) - 2.0 * f + np.roll(f, 1, axis=1)) * float(w * w)


def partial_yy(f: np.ndarray) -> np.ndarray:
    h = f.shape[0]
    return (np.roll(f, -1, axis=0) - 2.0 * f + np.roll(f, 1, axis=0)) * float(h * h)


def partial_xy(f: np.ndarray) -> np.ndarray:
    # composition of centered first differences keeps second order and symmetry
    return partial_x(partial_y(f))


def integrate(f: np.ndarray) -> float | complex:
    """Integral over the unit square: node mean (numpy pairwise summation)."""
    hw = f.shape[0] * f.shape[1]
    return f.sum() / hw


def node_coords(grid_shape: tuple[int, int]) -> tuple[np.ndarray, np.ndarray]:
    """(x, y) meshgrids for an (H, W) grid; values[i, j] sits at (x[i,j], y[i,j])."""
    hh, ww = grid_shape
    x = np.arange(ww, dtype=np.float64) / ww
    y = np.arange(hh, dtype=np.float64) / hh
    return np.meshgrid(x, y)


# -- first-order geometry ------------------------------------------------------


def isothermal_derivatives(u: MapField, lat: LatticeParams) -> tuple[np.ndarray, np.ndarray]:
    """Map derivatives in the coordinates where the lattice metric is Euclidean.

    u_X = beta * u_x,  u_Y = -alpha * u_x + u_y / beta.
    """
    ux = partial_x(u.values)
    uy = partial_y(u.values)
    return lat.beta * ux, -lat.alpha * ux + uy / lat.beta


def gradient_integrals(u: MapField) -> tuple[float, float, float]:
    """Integrals of |u_x|^2, |u_y|^2 and <u_x, u_y> over the unit square.

    These three numbers feed the energy, the mean Hopf coefficient and both
    forms of the lattice velocity, so every consumer sees identical values.
    """
    ux = partial_x(u.values)
    uy = partial_y(u.values)
    ixx = float(integrate(np.sum(ux * ux, axis=-1)))
    iyy = float(integrate(np.sum(uy * uy, axis=-1)))
    ixy = float(integrate(np.sum(ux * uy, axis=-1)))
    return ixx, iyy, ixy


def energy(u: MapField, lat: LatticeParams) -> float:
    """Dirichlet energy 0.5 * integral of (|u_X|^2 + |u_Y|^2); the area form is dx dy."""
    ux_iso, uy_iso = isothermal_derivatives(u, lat)
    dens = 0.5 * (np.sum(ux_iso * ux_iso, axis=-1) + np.sum(uy_iso * uy_iso, axis=-1))
    return float(integrate(dens))


def energy_density(u: MapField, lat: LatticeParams) -> np.ndarray:
    ux_iso, uy_iso = isothermal_derivatives(u, lat)
    return 0.5 * (np.sum(ux_iso * ux_iso, axis=-1) + np.sum(uy_iso * uy_iso, axis=-1))


def laplace_beltrami(u_values: np.ndarray, lat: LatticeParams) -> np.ndarray:
    """Constant-coefficient Laplace-Beltrami operator of the lattice metric."""
    cxx, cxy, cyy = lat.laplace_coefficients()
    out = cxx * partial_xx(u_values)
    if cxy != 0.0:
        out += cxy * partial_xy(u_values)
    out += cyy * partial_yy(u_values)
    return out


def tension(u: MapField, lat: LatticeParams, target: TargetManifold | None = None) -> np.ndarray:
    """Tension field: tangential part of the Laplace-Beltrami of the map."""
    tgt = target if target is not None else u.target
    return tgt.project_tangent(u.values, laplace_beltrami(u.values, lat))


# -- quadratic differentials ----------------------------------------------------


def hopf_differential(u: MapField, lat: LatticeParams) -> QuadDiffField:
    """Coefficient |u_X|^2 - |u_Y|^2 - 2i <u_X, u_Y> in the isothermal frame.

    Vanishes identically iff the map is weakly conformal on the grid.
    """
    ux_iso, uy_iso = isothermal_derivatives(u, lat)
    xx = np.sum(ux_iso * ux_iso, axis=-1)
    yy = np.sum(uy_iso * uy_iso, axis=-1)
    xy = np.sum(ux_iso * uy_iso, axis=-1)
    return QuadDiffField(xx - yy - 2.0j * xy)


def project_holomorphic(qd: QuadDiffField, lat: LatticeParams | None = None) -> complex:
    """L2-orthogonal projection onto constant (parallel) coefficients: the node mean.

    The lattice argument is accepted for interface symmetry; the unit-area
    family keeps the area form equal to dx dy, so the projection never
    depends on it.
    """
    del lat
    return complex(integrate(qd.values))


def dbar(field, lat: LatticeParams | None = None) -> np.ndarray:
    """Anti-holomorphic derivative 0.5 (d/dX + i d/dY) in the isothermal frame.

    With the identity lattice (the default) this is 0.5 (d/dx + i d/dy) on
    the grid.  For a general lattice the chain rule through the isothermal
    chart gives d/dX = beta d/dx and d/dY = -alpha d/dx + (1/beta) d/dy.
    """
    v = field.values if isinstance(field, QuadDiffField) else np.asarray(field)
    fx = partial_x(v)
    fy = partial_y(v)
    if lat is None or (lat.alpha == 0.0 and lat.beta == 1.0):
        return 0.5 * (fx + 1.0j * fy)
    f_iso_x = lat.beta * fx
    f_iso_y = -lat.alpha * fx + fy / lat.beta
    return 0.5 * (f_iso_x + 1.0j * f_iso_y)


class QdNorms(NamedTuple):
    l1: float
    l2: float
    l2_real_part: float


def qd_norms(qd: QuadDiffField, lat: LatticeParams | None = None) -> QdNorms:
    """(L1, L2) norms of the differential and the L2 norm of its real part.

    Pointwise |phi dz^2| = 2 |phi| in the isothermal frame.  The real part is
    the symmetric tensor with frame components [[Re, -Im], [-Im, -Re]], whose
    squared pointwise norm is the sum of squared components; the returned
    norms therefore satisfy l2^2 = 2 * l2_real_part^2 identically.
    """
    del lat
    phi = qd.values
    mod = np.abs(phi)
    l1 = float(integrate(2.0 * mod))
    l2 = float(np.sqrt(integrate(4.0 * mod * mod)))
    re, im = phi.real, phi.imag
    comp_sq = re * re + re * re + im * im + im * im  # the four tensor components
    l2_re = float(np.sqrt(integrate(comp_sq)))
    return QdNorms(l1, l2, l2_re)


def qd_l1(values: np.ndarray) -> float:
    """Weight-2 L1 norm of a raw coefficient grid (same convention as qd_norms)."""
    return float(integrate(2.0 * np.abs(values)))
