"""Closest-point and tangent projections for the built-in targets."""

import numpy as np
import pytest

from torusflow.errors import ContractViolation, ProjectionError
from torusflow.targets import TORUS_CIRCLE_RADIUS, TargetManifold, torus_embedding

S2 = TargetManifold.from_name("sphere:3")
T2 = TargetManifold.from_name("flat-torus")
R = TORUS_CIRCLE_RADIUS


def brute_force_torus_nearest(p, n=4000):
    """Independent oracle: scan a fine (theta, psi) parameter grid."""
    th = np.linspace(0.0, 1.0, n, endpoint=False)
    c1 = np.stack([R * np.cos(2 * np.pi * th), R * np.sin(2 * np.pi * th)], axis=1)
    d1 = np.sum((c1 - p[:2]) ** 2, axis=1)
    d2 = np.sum((c1 - p[2:]) ** 2, axis=1)
    return np.concatenate([c1[np.argmin(d1)], c1[np.argmin(d2)]])


def test_sphere_project_examples():
    np.testing.assert_allclose(S2.project_point(np.array([0.0, 0.0, 2.0])), [0, 0, 1], atol=1e-15)
    np.testing.assert_allclose(S2.project_point(np.array([0.0, 0.0, 1.0])), [0, 0, 1], atol=1e-15)


def test_sphere_tangent_examples():
    north = np.array([0.0, 0.0, 1.0])
    np.testing.assert_allclose(S2.project_tangent(north, np.array([1.0, 0.0, 1.0])),
                               [1, 0, 0], atol=1e-15)
    np.testing.assert_allclose(S2.project_tangent(north, np.array([0.0, 0.0, 5.0])),
                               [0, 0, 0], atol=1e-15)


def test_torus_project_example_and_oracle():
    p = np.array([R + 1e-3, 0.0, 0.0, R])
    got = T2.project_point(p)
    np.testing.assert_allclose(got, [R, 0.0, 0.0, R], atol=1e-15)

    rng = np.random.default_rng(7)
    for _ in range(20):
        q = torus_embedding(rng.uniform(), rng.uniform())
        p = q + 0.15 * R * rng.uniform(-1.0, 1.0, 4)  # stays inside the tube
        got = T2.project_point(p)
        oracle = brute_force_torus_nearest(p)
        # oracle is limited by its parameter-grid resolution
        assert np.linalg.norm(got - oracle) < 2 * np.pi * R / 4000 * 1.1
        assert np.linalg.norm(p - got) <= np.linalg.norm(p - oracle) + 1e-12


def test_torus_tangent_example():
    p = np.array([R, 0.0, R, 0.0])
    v = np.array([0.0, 1.0, 0.0, 1.0])
    np.testing.assert_allclose(T2.project_tangent(p, v), v, atol=1e-15)
    # verified against the two radial normals
    for n in T2.normal_basis(p):
        assert abs(np.dot(T2.project_tangent(p, v), n)) < 1e-12


def test_projection_idempotent():
    rng = np.random.default_rng(1)
    for target in (S2, T2, TargetManifold.from_name("sphere:5")):
        scale = 0.1 if target.kind == "sphere" else 0.15 * R
        base = target.project_point(
            rng.uniform(-1.0, 1.0, (40, target.ambient_dim)) * scale
            + target.basepoint())
        again = target.project_point(base)
        assert np.max(np.abs(again - base)) < 1e-12


def test_tangent_projection_idempotent_and_orthogonal():
    rng = np.random.default_rng(2)
    for target in (S2, T2):
        scale = 0.1 if target.kind == "sphere" else 0.15 * R
        p = target.project_point(
            target.basepoint() + scale * rng.uniform(-1.0, 1.0, (30, target.ambient_dim)))
        v = rng.standard_normal((30, target.ambient_dim))
        tv = target.project_tangent(p, v)
        twice = target.project_tangent(p, tv)
        assert np.max(np.abs(twice - tv)) < 1e-12
        normals = target.normal_basis(p)
        dots = np.einsum("...k,...nk->...n", tv, normals)
        assert np.max(np.abs(dots)) < 1e-12


def test_torus_embedding_is_isometric():
    # analytic pullback metric of the parameterization is the identity
    rng = np.random.default_rng(3)
    x, y = rng.uniform(size=20), rng.uniform(size=20)
    fx = np.stack([-np.sin(2 * np.pi * x), np.cos(2 * np.pi * x),
                   np.zeros_like(x), np.zeros_like(x)], axis=-1)
    fy = np.stack([np.zeros_like(y), np.zeros_like(y),
                   -np.sin(2 * np.pi * y), np.cos(2 * np.pi * y)], axis=-1)
    assert np.max(np.abs(np.sum(fx * fx, axis=-1) - 1.0)) < 1e-14
    assert np.max(np.abs(np.sum(fy * fy, axis=-1) - 1.0)) < 1e-14
    assert np.max(np.abs(np.sum(fx * fy, axis=-1))) < 1e-14
    # and the embedding actually lands on the manifold
    pts = torus_embedding(x, y)
    assert np.max(T2.distance_to(pts)) < 1e-15


def test_degenerate_points_raise():
    with pytest.raises(ProjectionError):
        S2.project_point(np.zeros(3))
    with pytest.raises(ProjectionError):
        T2.project_point(np.array([0.0, 0.0, R, 0.0]))


def test_tube_violations_raise():
    # the stepper-side window: radial error must stay under the tube width
    with pytest.raises(ProjectionError):
        S2.project_point(np.array([0.1, 0.0, 0.0]), tube=True)
    S2.project_point(np.array([0.0, 0.0, 2.0]))  # fine without the tube check
    with pytest.raises(ProjectionError):
        T2.project_point(np.array([R * 2.0, 0.0, R, 0.0]), tube=True)
    with pytest.raises(ProjectionError) as err:
        T2.project_point(np.tile([R * 2.0, 0.0, R, 0.0], (4, 4, 1)), tube=True)
    assert err.value.grid_index == (0, 0)


def test_off_manifold_tangent_base_rejected():
    with pytest.raises(ContractViolation):
        S2.project_tangent(np.array([0.0, 0.0, 1.5]), np.array([1.0, 0.0, 0.0]))


def test_target_names():
    assert S2.name == "sphere:3"
    assert T2.name == "flat-torus"
    with pytest.raises(ValueError):
        TargetManifold.from_name("klein-bottle")
    with pytest.raises(ValueError):
        TargetManifold.from_name("sphere:1")
