"""Collar geometry closed forms against high-precision and quadrature oracles."""

import math

import numpy as np
import pytest

from torusflow.hyperbolic import (collar_density, collar_halfwidth, collar_report,
                                  collar_width, collar_width_by_quadrature,
                                  incompressible_energy_bound,
                                  small_length_divergence_ratio, verify_collar)

# frozen from a 50-digit mpmath evaluation of the closed forms
X_OF_1 = 6.8512810628292355137
X_OF_2 = 2.2149071522967361498
W_OF_1 = 2.8136582274945905055
W_OF_2 = 1.5438736658106094501
RHO_AT_EDGE_1 = 0.34440388241708793659


def test_halfwidth_values():
    assert collar_halfwidth(1.0) == pytest.approx(X_OF_1, rel=1e-14)
    assert collar_halfwidth(2.0) == pytest.approx(X_OF_2, rel=1e-14)
    # small-length limit: X(ell) * ell -> pi^2
    assert collar_halfwidth(1e-8) * 1e-8 == pytest.approx(math.pi**2, rel=1e-7)


def test_width_values_and_limit():
    assert collar_width(2.0) == pytest.approx(W_OF_2, rel=1e-14)
    assert collar_width(1.0) == pytest.approx(W_OF_1, rel=1e-14)
    assert collar_width(50.0) < 1e-9  # w -> 0 as ell -> infinity


def test_density_examples():
    for ell in (0.3, 1.0, 4.0):
        assert collar_density(0.0, ell) == pytest.approx(ell / (2 * math.pi), rel=1e-15)
        x = 0.7 * collar_halfwidth(ell)
        assert collar_density(x, ell) == pytest.approx(collar_density(-x, ell), rel=1e-15)
        assert collar_density(x, ell) >= ell / (2 * math.pi)
    assert collar_density(collar_halfwidth(1.0), 1.0) == pytest.approx(RHO_AT_EDGE_1, rel=1e-12)


def test_domain_errors():
    for bad in (0.0, -1.0, float("inf")):
        with pytest.raises(ValueError):
            collar_halfwidth(bad)
        with pytest.raises(ValueError):
            collar_width(bad)
    with pytest.raises(ValueError):
        collar_density(collar_halfwidth(1.0) * 1.01, 1.0)
    with pytest.raises(ValueError):
        incompressible_energy_bound(1.0, -2.0)


def test_width_defining_identity():
    for ell in np.geomspace(0.01, 5.0, 17):
        w = collar_width(float(ell))
        assert abs(math.sinh(ell / 2) * math.sinh(w / 2) - 1.0) < 1e-12


def test_width_identity_quadrature():
    # the sharp-width claim: integral of the density across the collar
    # reproduces 2 arcsinh(1/sinh(ell/2))
    for ell in (0.01, 0.1, 0.5, 1.0, 2.0, 5.0):
        assert abs(collar_width_by_quadrature(ell) - collar_width(ell)) < 1e-8


def test_bound_identity_and_small_length():
    for ell in (0.01, 0.1, 0.5, 1.0, 2.0, 5.0):
        lhs = incompressible_energy_bound(ell, 1.0)
        rhs = (1.0 / (2 * math.pi)) * collar_halfwidth(ell)
        assert abs(lhs - rhs) < 1e-12
    # phi(ell) -> c^2 pi / 2 as ell -> 0
    c = 1.7
    phi_small = incompressible_energy_bound(1e-9, c) * 1e-9
    assert phi_small == pytest.approx(c * c * math.pi / 2.0, rel=1e-8)
    # degenerate target systole
    assert incompressible_energy_bound(1.0, 0.0) == 0.0


def test_monotonicity():
    ells = np.geomspace(0.01, 5.0, 25)
    xs = [collar_halfwidth(float(l)) for l in ells]
    ws = [collar_width(float(l)) for l in ells]
    bs = [incompressible_energy_bound(float(l), 1.0) for l in ells]
    assert all(u > v for u, v in zip(xs, xs[1:]))
    assert all(u > v for u, v in zip(ws, ws[1:]))
    assert all(u > v for u, v in zip(bs, bs[1:]))


def test_divergence_mechanism():
    assert 0.99 <= small_length_divergence_ratio(1e-3) <= 1.01
    assert small_length_divergence_ratio(1e-6) == pytest.approx(1.0, abs=1e-5)


def test_verify_collar_passes():
    ok, rows = verify_collar()
    assert ok
    assert len(rows) == 6


def test_report_row_shape():
    rows = collar_report((1.0,), c=2.0)
    ell, x_half, w, integral, bound, rw, rb = rows[0]
    assert ell == 1.0
    assert bound == pytest.approx(4.0 * (1 / (2 * math.pi)) * x_half, rel=1e-12)
