"""Seeded initial-map generators.

Three families cover the experiments:

* ``covering``  -- affine degree-(p, q) coverings of the flat-torus target,
                   harmonic for every lattice and weakly conformal exactly
                   when the lattice matches the degrees;
* ``lonlat``    -- longitude/latitude style maps into a sphere: wrap the
                   equator p times in x while the latitude oscillates with
                   frequency q in y;
* ``constant``  -- the target basepoint everywhere (a trivial fixed point).

Any of them can be roughened by a seeded band-limited perturbation followed
by the closest-point projection, so experiments stay reproducible from
(generator, parameters, seed) alone.
"""

from __future__ import annotations

import numpy as np

from .domain import MapField, node_coords
from .targets import TargetManifold, torus_embedding

PERTURBATION_MODES = 3  # band limit of the random roughening


def covering_map(grid_shape: tuple[int, int], p: int = 1, q: int = 1) -> MapField:
    """Degree-(p, q) covering of the flat-torus target: (x, y) -> (p x, q y) upstairs."""
    target = TargetManifold.from_name("flat-torus")
    x, y = node_coords(grid_shape)
    return MapField(torus_embedding(p * x, q * y), target)


def lonlat_map(grid_shape: tuple[int, int], ambient_dim: int = 3, p: int = 1,
               q: int = 1, amplitude: float = 0.5) -> MapField:
    """Equator wrap with oscillating latitude, embedded in the first 3 coordinates."""
    if ambient_dim < 3:
        raise ValueError("lonlat maps need a sphere of ambient dimension >= 3")
    target = TargetManifold.from_name(f"sphere:{ambient_dim}")
    x, y = node_coords(grid_shape)
    lon = 2.0 * np.pi * p * x
    lat = amplitude * np.sin(2.0 * np.pi * q * y)
    vals = np.zeros(grid_shape + (ambient_dim,))
    vals[..., 0] = np.cos(lat) * np.cos(lon)
    vals[..., 1] = np.cos(lat) * np.sin(lon)
    vals[..., 2] = np.sin(lat)
    return MapField(vals, target)


def constant_map(grid_shape: tuple[int, int], target: TargetManifold) -> MapField:
    vals = np.broadcast_to(target.basepoint(), grid_shape + (target.ambient_dim,)).copy()
    return MapField(vals, target)


def fourier_field(grid_shape: tuple[int, int], ambient_dim: int, seed: int,
                  modes: int = PERTURBATION_MODES) -> np.ndarray:
    """Smooth random ambient field with RMS 1, reproducible from the seed.

    A truncated Fourier series per component; coefficients decay with the
    mode order so refinement changes nothing but resolution.  The draw order
    is independent of the grid shape.
    """
    rng = np.random.default_rng(seed)
    ks = [(kx, ky) for kx in range(-modes, modes + 1) for ky in range(0, modes + 1)
          if (ky > 0 or kx > 0)]
    coeff_cos = rng.standard_normal((len(ks), ambient_dim))
    coeff_sin = rng.standard_normal((len(ks), ambient_dim))
    x, y = node_coords(grid_shape)
    field = np.zeros(grid_shape + (ambient_dim,))
    for (kx, ky), cc, cs in zip(ks, coeff_cos, coeff_sin):
        decay = 1.0 / (1.0 + kx * kx + ky * ky)
        phase = 2.0 * np.pi * (kx * x + ky * y)
        field += decay * (np.cos(phase)[..., None] * cc + np.sin(phase)[..., None] * cs)
    rms = np.sqrt(np.mean(field * field))
    return field / rms


def perturbed(u: MapField, amplitude: float, seed: int,
              modes: int = PERTURBATION_MODES) -> MapField:
    """Push the map off itself by a seeded smooth ambient field and reproject."""
    if amplitude == 0.0:
        return u.copy()
    noise = fourier_field(u.grid_shape, u.target.ambient_dim, seed, modes)
    vals = u.target.project_point(u.values + amplitude * noise)
    return MapField(vals, u.target)


def make_initial_map(name: str, grid_shape: tuple[int, int], target: TargetManifold,
                     degree_p: int = 1, degree_q: int = 1, lat_amplitude: float = 0.5,
                     perturb_amplitude: float = 0.0, seed: int = 0) -> MapField:
    """Generator dispatch used by the run configuration."""
    if name == "covering":
        if target.kind != "flat-torus":
            raise ValueError("the covering generator targets the flat torus")
        u = covering_map(grid_shape, degree_p, degree_q)
    elif name == "lonlat":
        if target.kind != "sphere":
            raise ValueError("the lonlat generator targets a sphere")
        u = lonlat_map(grid_shape, target.ambient_dim, degree_p, degree_q, lat_amplitude)
    elif name == "constant":
        u = constant_map(grid_shape, target)
    else:
        raise ValueError(f"unknown initial map generator {name!r}")
    return perturbed(u, perturb_amplitude, seed)
