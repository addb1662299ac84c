"""Compact target manifolds embedded in Euclidean space.

Two targets are built in:

* ``sphere:K`` -- the unit sphere S^{K-1} in R^K;
* ``flat-torus`` -- the product of two circles of radius 1/(2*pi) in R^4,
  i.e. the image of (x, y) -> (cos 2pi x, sin 2pi x, cos 2pi y, sin 2pi y) / (2pi).
  With this radius the parameterization is an isometry onto the unit square,
  so pulling the ambient metric back gives exactly dx^2 + dy^2.

All operations act on arrays of shape (..., K) so whole grids are processed
in one vectorized call.  They are pure functions and thread-safe.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation, ProjectionError

TORUS_CIRCLE_RADIUS = 1.0 / (2.0 * np.pi)

# Width of the tubular neighbourhood on which the closest-point projection
# is accepted: relative window around each radius.
SPHERE_TUBE = 0.5
TORUS_TUBE = 0.4

# |p| may be off the manifold by at most this much in project_tangent.
ON_MANIFOLD_TOL = 1e-8


@dataclass(frozen=True)
class TargetManifold:
    """One of the supported embedded targets, selected by name."""

    kind: str  # "sphere" or "flat-torus"
    ambient_dim: int

    @classmethod
    def from_name(cls, name: str) -> "TargetManifold":
        """Parse a target name: ``sphere:K`` (K >= 2) or ``flat-torus``."""
        if name == "flat-torus":
            return cls("flat-torus", 4)
        if name.startswith("sphere:"):
            try:
                k = int(name.split(":", 1)[1])
            except ValueError:
                raise ValueError(f"bad sphere dimension in target name {name!r}")
            if k < 2:
                raise ValueError(f"sphere ambient dimension must be >= 2, got {k}")
            return cls("sphere", k)
        raise ValueError(f"unknown target {name!r}; expected 'sphere:K' or 'flat-torus'")

    @property
    def name(self) -> str:
        return "flat-torus" if self.kind == "flat-torus" else f"sphere:{self.ambient_dim}"

    # -- closest-point projection -------------------------------------------

    def project_point(self, p: np.ndarray, tube: bool = False) -> np.ndarray:
        """Nearest point of the manifold.

        The mathematical precondition is only that the radial factors do not
        vanish (p != 0 for the sphere, neither circle factor 0 for the
        torus).  With ``tube=True`` the configured tubular-neighbourhood
        window is enforced as well -- the check the time stepper applies to
        every update, so large explicit steps fail loudly instead of being
        silently renormalized.  Errors name the first offending index.
        """
        p = np.asarray(p, dtype=np.float64)
        if p.shape[-1] != self.ambient_dim:
            raise ValueError(f"expected last axis {self.ambient_dim}, got {p.shape[-1]}")
        if self.kind == "sphere":
            r = np.sqrt(np.sum(p * p, axis=-1))
            self._check_radius(r, 1.0, SPHERE_TUBE, tube, "sphere radius")
            return p / r[..., None]
        out = np.empty_like(p)
        for pair in (slice(0, 2), slice(2, 4)):
            q = np.sqrt(np.sum(p[..., pair] ** 2, axis=-1))
            self._check_radius(q, TORUS_CIRCLE_RADIUS, TORUS_TUBE * TORUS_CIRCLE_RADIUS,
                               tube, f"circle factor {pair.start // 2}")
            out[..., pair] = p[..., pair] * (TORUS_CIRCLE_RADIUS / q)[..., None]
        return out

    @staticmethod
    def _check_radius(r: np.ndarray, center: float, width: float, tube: bool,
                      what: str) -> None:
        bad = np.abs(np.asarray(r) - center) >= width if tube else np.asarray(r) < 1e-12
        if np.any(bad):
            idx = tuple(int(i) for i in np.argwhere(bad)[0]) if bad.ndim else ()
            reason = (f"outside the tube |r - {center:.6g}| < {width:.6g}"
                      if tube else "radial factor vanishes")
            raise ProjectionError(
                f"projection undefined at index {idx}: {what} {reason}",
                grid_index=idx,
            )

    # -- tangent-space projection -------------------------------------------

    def project_tangent(self, p: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Orthogonal projection of v onto the tangent space at the on-manifold point p."""
        p = np.asarray(p, dtype=np.float64)
        v = np.asarray(v, dtype=np.float64)
        self._check_on_manifold(p)
        if self.kind == "sphere":
            # single normal direction p/|p|
            coef = np.sum(v * p, axis=-1) / np.sum(p * p, axis=-1)
            return v - coef[..., None] * p
        out = np.array(v, copy=True)
        for pair in (slice(0, 2), slice(2, 4)):
            pp = p[..., pair]
            coef = np.sum(v[..., pair] * pp, axis=-1) / np.sum(pp * pp, axis=-1)
            out[..., pair] -= coef[..., None] * pp
        return out

    def distance_to(self, p: np.ndarray) -> np.ndarray:
        """Pointwise distance from p to the manifold (used for contract checks)."""
        p = np.asarray(p, dtype=np.float64)
        if self.kind == "sphere":
            return np.abs(np.sqrt(np.sum(p * p, axis=-1)) - 1.0)
        d1 = np.abs(np.sqrt(np.sum(p[..., 0:2] ** 2, axis=-1)) - TORUS_CIRCLE_RADIUS)
        d2 = np.abs(np.sqrt(np.sum(p[..., 2:4] ** 2, axis=-1)) - TORUS_CIRCLE_RADIUS)
        return np.sqrt(d1 * d1 + d2 * d2)

    def normal_basis(self, p: np.ndarray) -> np.ndarray:
        """Orthonormal basis of the normal space at p, shape (..., n_normals, K)."""
        p = np.asarray(p, dtype=np.float64)
        if self.kind == "sphere":
            n = p / np.sqrt(np.sum(p * p, axis=-1))[..., None]
            return n[..., None, :]
        out = np.zeros(p.shape[:-1] + (2, 4))
        out[..., 0, 0:2] = p[..., 0:2] / TORUS_CIRCLE_RADIUS
        out[..., 1, 2:4] = p[..., 2:4] / TORUS_CIRCLE_RADIUS
        return out

    def basepoint(self) -> np.ndarray:
        """A fixed point on the manifold (used by the constant-map generator)."""
        if self.kind == "sphere":
            e = np.zeros(self.ambient_dim)
            e[-1] = 1.0
            return e
        return np.array([TORUS_CIRCLE_RADIUS, 0.0, TORUS_CIRCLE_RADIUS, 0.0])

    def _check_on_manifold(self, p: np.ndarray) -> None:
        d = self.distance_to(p)
        worst = float(np.max(d))
        if worst > ON_MANIFOLD_TOL:
            raise ContractViolation(
                f"point off {self.name} by {worst:.3e} (> {ON_MANIFOLD_TOL:.0e}); "
                "tangent projection requires an on-manifold base point"
            )


def torus_embedding(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """The isometric parameterization of the flat-torus target over (x, y) in [0,1)^2."""
    r = TORUS_CIRCLE_RADIUS
    tx, ty = 2.0 * np.pi * np.asarray(x), 2.0 * np.pi * np.asarray(y)
    return np.stack(
        [r * np.cos(tx), r * np.sin(tx), r * np.cos(ty), r * np.sin(ty)], axis=-1
    )
