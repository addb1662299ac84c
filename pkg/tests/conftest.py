"""Shared helpers: discrete-symbol oracles for the centered stencils."""

import numpy as np


def diff_symbol(k: int, n: int) -> float:
    """Reduction factor of the centered first difference on mode k over n nodes.

    D_x e^{2 pi i k x} = i * (sin(2 pi k h)/h) e^{...}, h = 1/n; the factor
    relative to the exact derivative 2 pi k is sin(2 pi k h)/(2 pi k h).
    """
    h = 1.0 / n
    return float(np.sin(2.0 * np.pi * k * h) / (2.0 * np.pi * k * h))


def second_diff_eigenvalue(k: int, n: int) -> float:
    """Eigenvalue of the compact 3-point second difference on mode k: -(2/h)^2 sin^2(pi k h)."""
    h = 1.0 / n
    return float(-((2.0 / h) ** 2) * np.sin(np.pi * k * h) ** 2)


def covering_integrals(p: int, q: int, n: int) -> tuple[float, float, float]:
    """Exact discrete gradient integrals of the degree-(p, q) covering on an n^2 grid."""
    ixx = (p * diff_symbol(p, n)) ** 2 if p else 0.0
    iyy = (q * diff_symbol(q, n)) ** 2 if q else 0.0
    return ixx, iyy, 0.0
