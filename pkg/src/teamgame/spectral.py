"""Spectral analysis of the discrete selection-gradient operators.

Two exact routes to the characteristic polynomial of the win-loss matrix
are provided and cross-checked: a first-column determinant expansion in
the form of an integer recurrence, and closed-form binomial coefficients.
Both use Python integers, so the identity between them can be asserted
exactly up to the configured size budget.

Numerical spectra exploit proven structure instead of a general
eigensolver.  The win-loss matrix L is real antisymmetric, so i L is
Hermitian and its eigenvalues are computed with a symmetric solver.  The
boundary-regime generator (I - P) L maps everything into the orthogonal
complement of the constraint normal and restricts to an antisymmetric
operator there; in a basis adapted to that splitting it is block
triangular with a 1x1 zero block.  Diagonalising the restriction through
the Hermitian solver yields eigenvalues that are purely imaginary by
construction, sidestepping the sqrt(eps) real-part noise a general
eigensolver injects at the defective zero eigenvalue.

The propagator evaluates exp(t G) y for either generator from that same
factorisation, which realises the closed-form solutions (rotation blocks
plus a polynomial part from the zero eigenvalue) in a numerically stable
way.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import comb
from typing import List, Optional, Tuple

import numpy as np

from .operators import DiscreteOperators

#: Largest matrix size (M+1) for which exact integer characteristic
#: polynomials are offered.  Binomial coefficients stay comfortably inside
#: arbitrary-precision integers; the cap merely keeps the dual-route
#: identity check at desk scale.
EXACT_CHARPOLY_MAX_SIZE = 24

#: Relative tolerance used to cluster eigenvalues and to pair +-ib.
PAIRING_RTOL = 1e-9


@dataclass(frozen=True)
class CharPoly:
    """det(L - lambda I) with exact integer coefficients, ascending powers."""

    coefficients: Tuple[int, ...]
    n_plus_1: int

    def __call__(self, lam: complex) -> complex:
        acc = 0
        for c in reversed(self.coefficients):
            acc = acc * lam + c
        return acc


def charpoly_direct(M: int) -> CharPoly:
    """Characteristic polynomial by first-column determinant expansion.

    Row-reducing det(L - lambda I) and expanding along the first column
    produces the recurrence p_{n+1} = -(1 + lambda) p_n + (1 - lambda)^n
    with p_1 = -lambda, which is iterated in exact integer arithmetic.
    """
    size = M + 1
    if size > EXACT_CHARPOLY_MAX_SIZE:
        raise ValueError(
            f"exact characteristic polynomial limited to size {EXACT_CHARPOLY_MAX_SIZE}, "
            f"got M+1={size}"
        )
    if size < 1:
        raise ValueError("need M >= 0")
    p = [0, -1]  # p_1(lambda) = -lambda
    for n in range(1, size):
        # (1 - lambda)^n, ascending coefficients
        pow_ = [comb(n, k) * (-1) ** k for k in range(n + 1)]
        nxt = [0] * (n + 2)
        for k, c in enumerate(p):
            nxt[k] -= c          # -1 * p_n
            nxt[k + 1] -= c      # -lambda * p_n
        for k, c in enumerate(pow_):
            nxt[k] += c
        p = nxt
    return CharPoly(tuple(p), size)


def charpoly_binomial(M: int) -> CharPoly:
    """Characteristic polynomial from the closed-form binomial sums.

    Even size n+1: sum_k C(n+1, 2k) lambda^(2k).
    Odd size n+1: -lambda sum_k C(n+1, 2k+1) lambda^(2k).
    """
    size = M + 1
    if size < 1:
        raise ValueError("need M >= 0")
    coeffs = [0] * (size + 1)
    if size % 2 == 0:
        for k in range(size // 2 + 1):
            coeffs[2 * k] = comb(size, 2 * k)
    else:
        for k in range((size - 1) // 2 + 1):
            coeffs[2 * k + 1] = -comb(size, 2 * k + 1)
    return CharPoly(tuple(coeffs), size)


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalue multiset plus analytic kernel data for one generator.

    ``eigenvalues`` lists (real, imag, algebraic multiplicity); real parts
    are identically zero by construction.  ``kernel_basis`` holds the
    closed-form null vectors; ``jordan_chain`` is the (v2, v1) pair with
    generator(v2) = v1 when the zero eigenvalue is defective.
    """

    eigenvalues: List[Tuple[float, float, int]]
    kernel_dim: int
    kernel_basis: List[np.ndarray]
    jordan_chain: Optional[Tuple[np.ndarray, np.ndarray]]
    regime: str

    def zero_multiplicity(self) -> int:
        for re, im, mult in self.eigenvalues:
            if re == 0.0 and im == 0.0:
                return mult
        return 0

    def max_abs(self) -> float:
        return max(abs(complex(re, im)) for re, im, _ in self.eigenvalues)


def _skew_eig(S: np.ndarray) -> np.ndarray:
    """Imaginary parts of the eigenvalues of a real antisymmetric matrix.

    i S is Hermitian, so a symmetric solver applies; eigenvalues of S are
    -i times the returned reals.
    """
    vals = np.linalg.eigvalsh(1j * S)
    return -vals


def _complement_basis(w: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement of w (columns)."""
    U, _, _ = np.linalg.svd(w.reshape(-1, 1), full_matrices=True)
    return U[:, 1:]


def _restricted_generator(ops: DiscreteOperators):
    """Restriction of (I - P) L to the constraint-orthogonal subspace.

    Returns (Q, S, b, what) where the columns of Q span {w}^perp, S is the
    antisymmetric restriction, b the coordinates of the image of the unit
    normal, and what the unit constraint normal.
    """
    w = ops.constraint_vector
    what = w / np.linalg.norm(w)
    Q = _complement_basis(w)
    S = Q.T @ ops.gradient_matrix @ Q
    S = 0.5 * (S - S.T)  # exactly antisymmetric in exact arithmetic
    b = Q.T @ (ops.gradient_matrix @ what)
    return Q, S, b, what


def _cluster(imags: np.ndarray) -> List[Tuple[float, float, int]]:
    vals = np.sort(imags)
    scale = max(float(np.max(np.abs(vals))), 1.0e-300) if len(vals) else 0.0
    tol = max(PAIRING_RTOL * scale, 1e-12)
    out: List[Tuple[float, float, int]] = []
    i = 0
    while i < len(vals):
        j = i
        while j + 1 < len(vals) and vals[j + 1] - vals[j] <= tol:
            j += 1
        group = vals[i:j + 1]
        rep = float(np.mean(group))
        if abs(rep) <= tol:
            rep = 0.0
        out.append((0.0, rep, len(group)))
        i = j + 1
    return out


def _alternating(n: int) -> np.ndarray:
    v = np.ones(n)
    v[1::2] = -1.0
    return v


def _even_odd_indicators(n: int) -> Tuple[np.ndarray, np.ndarray]:
    ve = np.zeros(n)
    ve[0::2] = 1.0
    vo = np.zeros(n)
    vo[1::2] = 1.0
    return ve, vo


def compute_spectrum(ops: DiscreteOperators, regime: str) -> Spectrum:
    """Eigenvalues, kernel basis and Jordan data for L or (I - P) L.

    regime "L": the unconstrained generator.  Kernel is the alternating
    vector when the size M+1 is odd and trivial when it is even.

    regime "constrained": the boundary generator.  When M+1 is odd the
    kernel is spanned by the even- and odd-slot indicator vectors; when
    M+1 is even the kernel is the constant vector, with Jordan partner
    (2, 0, 2, 0, ..., 2, 0).
    """
    n = ops.M + 1
    if regime == "L":
        imags = _skew_eig(ops.gradient_matrix)
        eigenvalues = _cluster(imags)
        if n % 2 == 1:
            kernel = [_alternating(n)]
        else:
            kernel = []
        return Spectrum(eigenvalues, len(kernel), kernel, None, regime)
    if regime != "constrained":
        raise ValueError(f"unknown regime {regime!r}")
    _, S, _, _ = _restricted_generator(ops)
    imags = np.concatenate([_skew_eig(S), [0.0]])  # +0 from the normal direction block
    eigenvalues = _cluster(imags)
    if n % 2 == 1:
        ve, vo = _even_odd_indicators(n)
        kernel = [vo, ve]
        chain = None
    else:
        v1 = np.ones(n)
        v2 = np.zeros(n)
        v2[0::2] = 2.0
        kernel = [v1]
        chain = (v2, v1)
    return Spectrum(eigenvalues, len(kernel), kernel, chain, regime)


def stationary_basis(M: int) -> List[np.ndarray]:
    """Basis of the stationary compositions, which are the game equilibria.

    M odd: positive multiples of the constant vector.  M even: the span of
    the even- and odd-slot indicators, i.e. all (a, b, a, ..., a).
    """
    n = M + 1
    if M % 2 == 1:
        return [np.ones(n)]
    ve, vo = _even_odd_indicators(n)
    return [ve, vo]


@dataclass(frozen=True)
class Propagator:
    """Evaluator of y(t) = exp(t G) y0 for one frozen regime.

    Stores a unitary diagonalisation of the antisymmetric part and, for
    the constrained regime, the coupling of the constraint-normal
    coordinate into the complement (the source of the polynomial-in-time
    part of the solution).
    """

    regime: str
    M: int
    _theta: np.ndarray = field(repr=False)      # Hermitian eigenvalues of i*S
    _U: np.ndarray = field(repr=False)          # unitary eigenvectors
    _Q: Optional[np.ndarray] = field(repr=False, default=None)
    _b: Optional[np.ndarray] = field(repr=False, default=None)
    _what: Optional[np.ndarray] = field(repr=False, default=None)

    def propagate(self, t: float, y0: np.ndarray) -> np.ndarray:
        y0 = np.asarray(y0, dtype=float)
        phase = np.exp(-1j * self._theta * t)
        if self.regime == "L":
            z = self._U.conj().T @ y0
            return (self._U @ (phase * z)).real
        z = self._U.conj().T @ (self._Q.T @ y0)
        c = float(self._what @ y0)
        bz = self._U.conj().T @ self._b
        phi = _phase_integral(self._theta, t)
        zt = self._U @ (phase * z + phi * bz * c)
        return (self._Q @ zt.real) + c * self._what


def _phase_integral(theta: np.ndarray, t: float) -> np.ndarray:
    """integral_0^t exp(-i theta s) ds, elementwise, safe at theta == 0."""
    out = np.empty(len(theta), dtype=complex)
    small = np.abs(theta * t) < 1e-8
    th = np.where(small, 1.0, theta)
    out = (np.exp(-1j * th * t) - 1.0) / (-1j * th)
    out[small] = t * (1.0 - 0.5j * theta[small] * t)
    return out


def build_propagator(ops: DiscreteOperators, regime: str) -> Propagator:
    """Factorise the chosen generator for repeated exp(t G) y evaluation."""
    if regime == "L":
        S = 0.5 * (ops.gradient_matrix - ops.gradient_matrix.T)
        theta, U = np.linalg.eigh(1j * S)
        return Propagator(regime, ops.M, theta, U)
    if regime != "constrained":
        raise ValueError(f"unknown regime {regime!r}")
    Q, S, b, what = _restricted_generator(ops)
    theta, U = np.linalg.eigh(1j * S)
    return Propagator(regime, ops.M, theta, U, Q, b, what)


def write_spectrum_csv(spec: Spectrum, path) -> None:
    """Export eigenvalues as rows of re,im,multiplicity."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("re,im,multiplicity\n")
        for re, im, mult in spec.eigenvalues:
            fh.write(f"{format(re, '.17g')},{format(im, '.17g')},{mult}\n")


def write_charpoly(poly: CharPoly, path) -> None:
    """Export exact coefficients, one integer per line, ascending powers."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for c in poly.coefficients:
            fh.write(f"{c}\n")
