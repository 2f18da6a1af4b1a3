"""Uniform-grid trapezoid quadrature helpers shared by the sampled-function code.

Everything here operates on samples at the nodes x_j = j/N of the unit
interval.  The trapezoid rule is used throughout: it is second-order
accurate and exact for the linear integrands that drive the constraint
machinery, which keeps the constraint functional of a linear function
exact to roundoff.
"""

from __future__ import annotations

import numpy as np


def grid(N: int) -> np.ndarray:
    """Nodes x_j = j/N, j = 0..N."""
    if N < 1:
        raise ValueError(f"grid resolution must be >= 1, got {N}")
    return np.arange(N + 1) / N


def weights(N: int) -> np.ndarray:
    """Trapezoid weights on the uniform grid: h at interior nodes, h/2 at the ends."""
    h = 1.0 / N
    w = np.full(N + 1, h)
    w[0] = w[-1] = h / 2
    return w


def centered_nodes(N: int) -> np.ndarray:
    """Samples of x - 1/2, computed as (2j - N)/(2N) so the vector is
    exactly antisymmetric about the midpoint in floating point."""
    return (2.0 * np.arange(N + 1) - N) / (2.0 * N)


def integrate(values: np.ndarray, N: int) -> float:
    """Trapezoid approximation of the integral over [0, 1]."""
    return float(weights(N) @ values)


def cumulative(values: np.ndarray, N: int) -> np.ndarray:
    """Running trapezoid integral c_j = integral over [0, x_j], with c_0 = 0.

    A single forward prefix pass; callers obtain the complementary
    integral over [x_j, 1] as c_N - c_j, so the split is exact by
    construction.
    """
    h = 1.0 / N
    out = np.empty_like(values, dtype=float)
    out[0] = 0.0
    np.cumsum((values[:-1] + values[1:]) * (h / 2), out=out[1:])
    return out
