"""Unit-area flat conformal structures on the torus.

A structure is parameterized by (alpha, beta) with beta > 0: the domain is
the quotient of the plane by the lattice spanned by (1/beta, 0) and
(alpha, beta), pulled back to the unit square torus through the linear map
sending (1, 0) -> (1/beta, 0) and (0, 1) -> (alpha, beta).  The equivalent
(a, b) parameterization (lattice generated by (1, 0) and (a, b), rescaled
to unit area) satisfies a = alpha*beta, b = beta^2.

On the unit square the metric coefficients are

    g11 = 1/beta^2,  g12 = alpha/beta,  g22 = alpha^2 + beta^2,

with det g = 1 identically, and the Laplace-Beltrami operator is the
constant-coefficient

    (alpha^2 + beta^2) d_xx - (2 alpha/beta) d_xy + (1/beta^2) d_yy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

B_FLOOR = 1e-6  # hard floor enforced by the time stepper, not by the constructor


@dataclass(frozen=True)
class LatticeParams:
    alpha: float
    beta: float

    def __post_init__(self):
        if not np.isfinite(self.alpha) or not np.isfinite(self.beta):
            raise ValueError("lattice parameters must be finite")
        if self.beta <= 0.0:
            raise ValueError(f"beta must be positive, got {self.beta}")

    @classmethod
    def from_ab(cls, a: float, b: float) -> "LatticeParams":
        if b <= 0.0:
            raise ValueError(f"b must be positive, got {b}")
        beta = float(np.sqrt(b))
        return cls(alpha=a / beta, beta=beta)

    @property
    def a(self) -> float:
        return self.alpha * self.beta

    @property
    def b(self) -> float:
        return self.beta * self.beta

    def metric(self) -> np.ndarray:
        """Metric coefficient matrix on the unit square (det = 1 in exact arithmetic)."""
        al, be = self.alpha, self.beta
        return np.array([[1.0 / be**2, al / be], [al / be, al**2 + be**2]])

    def laplace_coefficients(self) -> tuple[float, float, float]:
        """(c_xx, c_xy, c_yy) of the Laplace-Beltrami operator."""
        al, be = self.alpha, self.beta
        return (al * al + be * be, -2.0 * al / be, 1.0 / (be * be))

    def lambda_max(self) -> float:
        """Magnitude scale of the Laplace-Beltrami coefficients; sets the CFL bound."""
        al, be = self.alpha, self.beta
        return al * al + be * be + 1.0 / (be * be)

    def isothermal_matrix(self) -> np.ndarray:
        """Linear map from unit-square coordinates to isothermal coordinates."""
        return np.array([[1.0 / self.beta, self.alpha], [0.0, self.beta]])


def metric_variation(lat: LatticeParams, rates: tuple[float, float]) -> complex:
    """Coefficient theta of the constant quadratic differential matching a lattice velocity.

    For a one-parameter family through (alpha, beta) with velocity
    (alpha_dot, beta_dot), the pulled-back metric family has
    d g / d s = Re(theta dz^2) in isothermal coordinates, where

        theta = -2 beta_dot/beta - i (alpha beta_dot/beta^2 + alpha_dot/beta).
    """
    alpha_dot, beta_dot = rates
    al, be = lat.alpha, lat.beta
    return complex(-2.0 * beta_dot / be, -(al * beta_dot / be**2 + alpha_dot / be))


def variation_tensor(theta: complex) -> np.ndarray:
    """Components of Re(theta dz^2) in the orthonormal isothermal frame."""
    return np.array(
        [[theta.real, -theta.imag], [-theta.imag, -theta.real]]
    )


def pulled_back_metric(lat: LatticeParams, rates: tuple[float, float], s: float) -> np.ndarray:
    """Metric of the deformed structure, in the isothermal frame of the base structure.

    This is the finite-s family whose s-derivative at 0 is
    variation_tensor(metric_variation(lat, rates)); used to cross-check that
    the lattice family is horizontal.
    """
    alpha_dot, beta_dot = rates
    moved = LatticeParams(lat.alpha + s * alpha_dot, lat.beta + s * beta_dot)
    # composite linear map: isothermal chart of `moved` read in the chart of `lat`
    comp = moved.isothermal_matrix() @ np.linalg.inv(lat.isothermal_matrix())
    return comp.T @ comp
