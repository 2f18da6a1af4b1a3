"""Core domain types and payoff functionals for the game of teams.

A team is identified with its strategy: the amount of members it fields at
each competitive-ability (CA) value.  Two representations coexist:

* :class:`Strategy` is the discrete game: a nonnegative vector indexed by
  the CA grid {k/M, k = 0..M}.  Payoffs are raw sums of pairwise wins
  minus losses.
* :class:`SampledStrategy` is the function-valued game sampled on a
  uniform grid over [0, 1]; integrals are trapezoid quadratures, so the
  sampled operations converge to the continuum versions as the grid is
  refined.

A strategy is *valid* for the game when its components are nonnegative,
its total mass is positive, and its mean competitive ability (MCA) does
not exceed one half.  The types deliberately admit invalid states: the
adaptive dynamics can push a state outside the strategy set, and we want
to observe that rather than crash.  Use :func:`validate` to interrogate a
state.

Both payoff functionals are evaluated in explicitly antisymmetrised form,
so the zero-sum identity ``payoff(a, b) + payoff(b, a) == 0`` and the
self-play identity ``payoff(a, a) == 0`` hold exactly in floating point,
not merely up to rounding.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from . import quadrature

#: Components no smaller than -NONNEG_TOL count as nonnegative (absorbs roundoff).
NONNEG_TOL = 1e-12

#: The MCA constraint is considered satisfied up to this slack.
MCA_TOL = 1e-12


class ZeroMassError(ValueError):
    """Raised when an operation needs a strategy with nonzero total mass."""


class DimensionMismatchError(ValueError):
    """Raised when two strategies live on different grids."""


@dataclass(frozen=True)
class Strategy:
    """Discrete team composition: ``values[k]`` members at CA k/M."""

    values: np.ndarray
    M: int

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", vals)
        if vals.ndim != 1 or len(vals) != self.M + 1:
            raise ValueError(
                f"strategy over grid order M={self.M} needs {self.M + 1} components, "
                f"got shape {vals.shape}"
            )

    @classmethod
    def from_values(cls, values) -> "Strategy":
        values = np.asarray(values, dtype=float)
        return cls(values, len(values) - 1)

    def __add__(self, other: "Strategy") -> "Strategy":
        # Team combination: competing against several teams reduces to
        # competing against their sum.
        _check_same_grid(self, other)
        return Strategy(self.values + other.values, self.M)


@dataclass(frozen=True)
class SampledStrategy:
    """Function-valued strategy sampled at x_j = j/N with a quadrature rule."""

    samples: np.ndarray
    N: int
    quadrature: str = "trapezoid"

    def __post_init__(self):
        vals = np.asarray(self.samples, dtype=float)
        object.__setattr__(self, "samples", vals)
        if vals.ndim != 1 or len(vals) != self.N + 1:
            raise ValueError(
                f"sampled strategy at resolution N={self.N} needs {self.N + 1} samples, "
                f"got shape {vals.shape}"
            )
        if self.quadrature != "trapezoid":
            raise ValueError(f"unsupported quadrature rule: {self.quadrature!r}")

    @classmethod
    def from_function(cls, fn, N: int) -> "SampledStrategy":
        return cls(fn(quadrature.grid(N)), N)

    @classmethod
    def from_samples(cls, samples) -> "SampledStrategy":
        samples = np.asarray(samples, dtype=float)
        return cls(samples, len(samples) - 1)

    def __add__(self, other: "SampledStrategy") -> "SampledStrategy":
        _check_same_grid(self, other)
        return SampledStrategy(self.samples + other.samples, self.N)


AnyStrategy = Union[Strategy, SampledStrategy]


@dataclass(frozen=True)
class ValidityReport:
    """Outcome of the validity checks for one state."""

    nonnegative: bool
    positive_mass: bool
    mca_ok: bool
    mca_value: float
    first_negative_index: Optional[int] = None

    @property
    def is_valid(self) -> bool:
        return self.nonnegative and self.positive_mass and self.mca_ok


def _check_same_grid(a: AnyStrategy, b: AnyStrategy) -> None:
    if isinstance(a, Strategy) != isinstance(b, Strategy):
        raise DimensionMismatchError("cannot mix discrete and sampled strategies")
    if isinstance(a, Strategy):
        if a.M != b.M:
            raise DimensionMismatchError(f"grid orders differ: M={a.M} vs M={b.M}")
    else:
        if a.N != b.N:
            raise DimensionMismatchError(f"grid resolutions differ: N={a.N} vs N={b.N}")
        if a.quadrature != b.quadrature:
            raise DimensionMismatchError(
                f"quadrature rules differ: {a.quadrature!r} vs {b.quadrature!r}"
            )


def _payoff_discrete_raw(a: np.ndarray, b: np.ndarray) -> float:
    # sum_k a_k (sum_{j<k} b_j - sum_{l>k} b_l), via one prefix pass
    prefix = np.cumsum(b)
    total = prefix[-1]
    below = prefix - b          # strictly below k
    above = total - prefix      # strictly above k
    return float(a @ (below - above))


def payoff_discrete(a: Strategy, b: Strategy) -> float:
    """Expected net win rate of team ``a`` against team ``b`` (discrete game).

    Each member of ``a`` beats every weaker member of ``b`` and loses to
    every stronger one; ties are washes.  Antisymmetrised so the game is
    exactly zero-sum.
    """
    _check_same_grid(a, b)
    return 0.5 * (_payoff_discrete_raw(a.values, b.values)
                  - _payoff_discrete_raw(b.values, a.values))


def _payoff_function_raw(a: np.ndarray, b: np.ndarray, N: int) -> float:
    # integral of a(x) * (integral_0^x b - integral_x^1 b) dx, with the
    # node x_j excluded from both sides of its own split (the win-loss
    # kernel carries no mass on the diagonal).
    om = quadrature.weights(N)
    wb = om * b
    prefix = np.cumsum(wb)
    total = prefix[-1]
    below = prefix - wb
    above = total - prefix
    return float((om * a) @ (below - above))


def payoff_function(a: SampledStrategy, b: SampledStrategy) -> float:
    """Payoff of ``a`` against ``b`` in the sampled function-valued game."""
    _check_same_grid(a, b)
    return 0.5 * (_payoff_function_raw(a.samples, b.samples, a.N)
                  - _payoff_function_raw(b.samples, a.samples, a.N))


def mca_discrete(a: Strategy) -> float:
    """Mean competitive ability sum_k (k/M) a_k / sum_k a_k."""
    total = float(np.sum(a.values))
    if total == 0.0:
        raise ZeroMassError("MCA is undefined for a zero-mass strategy")
    ca = np.arange(a.M + 1) / a.M
    return float(ca @ a.values) / total


def mca_function(f: SampledStrategy) -> float:
    """Mean competitive ability of a sampled strategy (quadrature integrals)."""
    om = quadrature.weights(f.N)
    total = float(om @ f.samples)
    if total == 0.0:
        raise ZeroMassError("MCA is undefined for a zero-mass strategy")
    x = quadrature.grid(f.N)
    return float((om * x) @ f.samples) / total


def mass(a: AnyStrategy) -> float:
    """Total population size: component sum (discrete) or integral (sampled)."""
    if isinstance(a, Strategy):
        return float(np.sum(a.values))
    return quadrature.integrate(a.samples, a.N)


def mca(a: AnyStrategy) -> float:
    return mca_discrete(a) if isinstance(a, Strategy) else mca_function(a)


def validate(a: AnyStrategy) -> ValidityReport:
    """Check the strategy-set membership conditions without raising.

    Reports componentwise nonnegativity (with roundoff slack), positive
    total mass, and the MCA bound.  When the mass is not positive the MCA
    is undefined and reported as ``nan`` with ``mca_ok=False``.
    """
    vals = a.values if isinstance(a, Strategy) else a.samples
    negatives = np.flatnonzero(vals < -NONNEG_TOL)
    nonnegative = negatives.size == 0
    first_negative = int(negatives[0]) if negatives.size else None
    total = mass(a)
    positive_mass = total > 0.0
    if total == 0.0:
        mca_value = float("nan")
        mca_ok = False
    else:
        mca_value = mca(a)
        mca_ok = bool(mca_value <= 0.5 + MCA_TOL)
    return ValidityReport(
        nonnegative=nonnegative,
        positive_mass=positive_mass,
        mca_ok=mca_ok,
        mca_value=mca_value,
        first_negative_index=first_negative,
    )


# ---------------------------------------------------------------------------
# Strategy file format: CSV with header "index,value" (discrete) or
# "x,value" (sampled), UTF-8, LF line endings.

def write_strategy_csv(a: AnyStrategy, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if isinstance(a, Strategy):
            writer.writerow(["index", "value"])
            for k, val in enumerate(a.values):
                writer.writerow([k, format(val, ".17g")])
        else:
            writer.writerow(["x", "value"])
            x = quadrature.grid(a.N)
            for xj, val in zip(x, a.samples):
                writer.writerow([format(xj, ".17g"), format(val, ".17g")])


def read_strategy_csv(path) -> AnyStrategy:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        rows = [row for row in csv.reader(fh) if row and not row[0].startswith("#")]
    if not rows:
        raise ValueError(f"empty strategy file: {path}")
    header = [c.strip().lower() for c in rows[0]]
    body = rows[1:]
    values = np.array([float(r[1]) for r in body])
    if header == ["index", "value"]:
        return Strategy.from_values(values)
    if header == ["x", "value"]:
        return SampledStrategy.from_samples(values)
    raise ValueError(f"unrecognised strategy header {rows[0]!r} in {path}")
