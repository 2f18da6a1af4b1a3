"""Selection-gradient operators for both game representations.

The unconstrained selection gradient sends a strategy to the direction of
steepest payoff improvement; the constrained variant additionally removes
the component normal to the mean-competitive-ability boundary whenever the
constraint is active.  The switch between the two is a Heaviside gate on
the constraint functional w, and it is deliberately abrupt: no smoothing
is applied at the boundary.

Discrete game
    ``build_operators`` assembles the antisymmetric win-loss matrix, the
    constraint normal, and the rank-one projection onto it;
    ``apply_A_discrete`` evaluates the gated, projected gradient.

Sampled function-valued game
    ``gradient_function`` and ``apply_A_function`` are the trapezoid
    discretisations of the corresponding integral operators.  The
    projection is normalised by the quadrature norm of the constraint
    direction rather than its continuum value 12; with that choice the
    constant strategies are annihilated to machine precision and the
    constraint functional is conserved exactly along the constrained
    flow.  The two normalisations agree in the continuum limit.

``apply_adjoint_function`` is the exact adjoint of ``apply_A_function``
under the trapezoid inner product.  It equals the analytic adjoint
formula up to O(h) corrections at the two boundary nodes; those
corrections are what make ``<A u, v> == <u, A* v>`` hold to roundoff
instead of to quadrature error.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import quadrature
from .strategies import DimensionMismatchError, SampledStrategy, Strategy

#: The constraint gate fires for w >= -HEAVISIDE_TOL, so that roundoff in a
#: state sitting exactly on the boundary cannot toggle the regime.
HEAVISIDE_TOL = 1e-12


def heaviside(x: float, tol: float = HEAVISIDE_TOL) -> int:
    """Indicator of x >= 0, with H(0) = 1 and a small negative slack."""
    return 1 if x >= -tol else 0


@dataclass(frozen=True)
class DiscreteOperators:
    """Matrices driving the discrete adaptive dynamics on a fixed grid.

    ``gradient_matrix`` is antisymmetric with -1 above and +1 below the
    diagonal; applied to a composition it yields the selection gradient.
    ``constraint_vector`` has components k/M - 1/2; the MCA constraint is
    ``constraint_vector . y <= 0``.  ``projection`` is the orthogonal
    projection onto the constraint normal.
    """

    gradient_matrix: np.ndarray
    constraint_vector: np.ndarray
    projection: np.ndarray
    M: int

    def constrained_matrix(self) -> np.ndarray:
        """(I - P) L: the generator of the boundary (equality) regime."""
        n = self.M + 1
        return (np.eye(n) - self.projection) @ self.gradient_matrix


def build_operators(M: int) -> DiscreteOperators:
    """Assemble the discrete operators for grid order M >= 1.

    The constraint vector is computed as (2k - M)/(2M), which equals
    k/M - 1/2 but is exactly antisymmetric about the grid midpoint in
    floating point.
    """
    if M < 1:
        raise ValueError(f"grid order must be >= 1, got {M}")
    n = M + 1
    L = np.tril(np.ones((n, n)), -1) - np.triu(np.ones((n, n)), 1)
    w = (2.0 * np.arange(n) - M) / (2.0 * M)
    P = np.outer(w, w) / (w @ w)
    return DiscreteOperators(L, w, P, M)


def gradient_discrete(ops: DiscreteOperators, values: np.ndarray) -> np.ndarray:
    """Unconstrained selection gradient of a discrete composition."""
    return ops.gradient_matrix @ values


def apply_A_discrete(ops: DiscreteOperators, y: Strategy) -> np.ndarray:
    """Gated constrained selection gradient (I - H(w.y) P) L y."""
    if y.M != ops.M:
        raise DimensionMismatchError(f"operator grid M={ops.M} vs strategy M={y.M}")
    return apply_A_discrete_values(ops, y.values)


def apply_A_discrete_values(ops: DiscreteOperators, values: np.ndarray) -> np.ndarray:
    g = ops.gradient_matrix @ values
    if heaviside(float(ops.constraint_vector @ values)):
        w = ops.constraint_vector
        g = g - w * (float(w @ g) / float(w @ w))
    return g


# ---------------------------------------------------------------------------
# Sampled function-valued operators


def gradient_function(f: SampledStrategy) -> SampledStrategy:
    """Unconstrained selection gradient on the sample grid.

    Returns samples of (integral over [0, x_j]) - (integral over [x_j, 1])
    of f, evaluated as 2 c_j - c_N from a single cumulative trapezoid pass
    so the identity holds at machine precision.  The image is nondecreasing
    whenever f is nonnegative.
    """
    c = quadrature.cumulative(f.samples, f.N)
    return SampledStrategy(2.0 * c - c[-1], f.N)


def w_functional(f: SampledStrategy) -> float:
    """Constraint functional: trapezoid value of integral (x - 1/2) f(x) dx.

    Nonpositive exactly when the MCA bound holds (given positive mass);
    zero on the constraint boundary.
    """
    om = quadrature.weights(f.N)
    v = quadrature.centered_nodes(f.N)
    return float((om * v) @ f.samples)


def apply_A_function(f: SampledStrategy) -> SampledStrategy:
    """Constrained selection gradient of a sampled strategy.

    The gradient is projected off the constraint direction x - 1/2 when
    the Heaviside gate is on.  The projection coefficient is the
    reciprocal of the quadrature norm of the constraint direction (the
    continuum value is 12); this keeps constants exactly stationary and
    conserves the constraint functional exactly along the gated flow.
    """
    om = quadrature.weights(f.N)
    v = quadrature.centered_nodes(f.N)
    g = gradient_function(f).samples
    if heaviside(float((om * v) @ f.samples)):
        vnorm2 = float((om * v) @ v)
        g = g - (float((om * v) @ g) / vnorm2) * v
    return SampledStrategy(g, f.N)


def apply_adjoint_function(u: SampledStrategy) -> SampledStrategy:
    """Adjoint of the constrained selection gradient in the quadrature inner product.

    Acts as minus the selection gradient of the projected input, plus
    boundary corrections of size h at the two end nodes.  At interior
    nodes applied to constants this reproduces the analytic adjoint
    exactly (for u == 1 the result is 1 - 2x away from the ends).
    """
    N = u.N
    h = 1.0 / N
    om = quadrature.weights(N)
    v = quadrature.centered_nodes(N)
    vnorm2 = float((om * v) @ v)
    p = u.samples - (float((om * v) @ u.samples) / vnorm2) * v
    c = quadrature.cumulative(p, N)
    out = -(2.0 * c - c[-1])
    out[0] -= h * p[0]
    out[-1] += h * p[-1]
    return SampledStrategy(out, N)


# ---------------------------------------------------------------------------
# Kernel view of the operators


@dataclass(frozen=True)
class KernelSpec:
    """Closed-form kernel of the (un)constrained selection gradient.

    The unconstrained kernel is the win-loss sign function, constant above
    and below the diagonal and undefined on it.  The constrained kernel
    adds the separable projection term and is antisymmetric about the
    point (1/2, 1/2).
    """

    regime: str  # "unconstrained" | "constrained"

    def __post_init__(self):
        if self.regime not in ("unconstrained", "constrained"):
            raise ValueError(f"unknown kernel regime {self.regime!r}")


def kernel_eval(spec: KernelSpec, x: float, y: float) -> float:
    """Evaluate the kernel at an off-diagonal point (x, y)."""
    if x == y:
        raise ValueError("kernel is singular on the diagonal x == y")
    s = -1.0 if x < y else 1.0
    if spec.regime == "constrained":
        s += 12.0 * (x - 0.5) * (y * y - y)
    return s


def write_matrix_csv(matrix: np.ndarray, path) -> None:
    """Debug export of a matrix as rows of i,j,value."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["i", "j", "value"])
        for i, row in enumerate(np.atleast_2d(matrix)):
            for j, val in enumerate(row):
                writer.writerow([i, j, format(val, ".17g")])
