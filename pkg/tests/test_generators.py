"""Initial-map generators: determinism, on-manifold values, dispatch."""

import numpy as np
import pytest

from torusflow.domain import energy, hopf_differential
from torusflow.generators import (constant_map, covering_map, fourier_field, lonlat_map,
                                  make_initial_map, perturbed)
from torusflow.lattice import LatticeParams
from torusflow.targets import TargetManifold

SQUARE = LatticeParams(0.0, 1.0)


def test_covering_on_manifold_and_energy():
    u = covering_map((48, 48), 3, 2)
    assert np.max(u.target.distance_to(u.values)) < 1e-14
    assert energy(u, SQUARE) == pytest.approx(0.5 * (9 + 4), rel=5e-2)  # O(h^2) at mode 3


def test_degree_11_is_weakly_conformal():
    u = covering_map((64, 64), 1, 1)
    assert np.max(np.abs(hopf_differential(u, SQUARE).values)) < 1e-12


def test_lonlat_on_sphere_and_periodic():
    u = lonlat_map((32, 32), 4, 2, 1, 0.7)
    assert u.target.name == "sphere:4"
    r = np.sqrt(np.sum(u.values**2, axis=-1))
    np.testing.assert_allclose(r, 1.0, atol=1e-14)
    assert np.max(np.abs(u.values[..., 3])) == 0.0


def test_constant_map_everywhere_basepoint():
    target = TargetManifold.from_name("sphere:3")
    u = constant_map((8, 8), target)
    np.testing.assert_array_equal(u.values, np.broadcast_to(target.basepoint(), (8, 8, 3)))


def test_fourier_field_seeded_and_grid_consistent():
    a = fourier_field((32, 32), 4, seed=3)
    b = fourier_field((32, 32), 4, seed=3)
    np.testing.assert_array_equal(a, b)
    c = fourier_field((32, 32), 4, seed=4)
    assert np.max(np.abs(a - c)) > 1e-3
    # same spectral data at finer resolution, up to the common RMS normalization
    fine = fourier_field((64, 64), 4, seed=3)
    ratio = fine[::2, ::2] / a
    np.testing.assert_allclose(ratio, ratio.flat[0], rtol=1e-10)


def test_perturbed_stays_on_manifold_and_is_seeded():
    base = covering_map((32, 32), 1, 1)
    p1 = perturbed(base, 0.01, seed=7)
    p2 = perturbed(base, 0.01, seed=7)
    np.testing.assert_array_equal(p1.values, p2.values)
    assert np.max(p1.target.distance_to(p1.values)) < 1e-14
    assert np.max(np.abs(p1.values - base.values)) > 1e-5


def test_zero_amplitude_perturbation_is_identity():
    base = covering_map((16, 16), 1, 1)
    np.testing.assert_array_equal(perturbed(base, 0.0, seed=1).values, base.values)


def test_make_initial_map_dispatch():
    torus = TargetManifold.from_name("flat-torus")
    sphere = TargetManifold.from_name("sphere:3")
    assert make_initial_map("covering", (16, 16), torus, degree_p=2).values.shape == (16, 16, 4)
    assert make_initial_map("lonlat", (16, 16), sphere).values.shape == (16, 16, 3)
    assert make_initial_map("constant", (16, 16), sphere).values.shape == (16, 16, 3)
    with pytest.raises(ValueError):
        make_initial_map("covering", (16, 16), sphere)
    with pytest.raises(ValueError):
        make_initial_map("lonlat", (16, 16), torus)
    with pytest.raises(ValueError):
        make_initial_map("warp", (16, 16), torus)
