"""Named initial conditions for the experiment runners.

Every preset can be realised on the discrete CA grid (order M) or as a
sampled function (resolution N).  The seeded presets draw from a 64-bit
PCG generator so runs are reproducible from the recorded seed.

``tent`` solves for its right-arm slope on the actual grid so that the
sampled mean competitive ability sits exactly on the boundary; with the
continuum slope the quadrature error would leave the state strictly
inside or outside the constraint and change which regime the dynamics
starts in.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, Optional

import numpy as np

from . import quadrature
from .strategies import SampledStrategy, Strategy


class PresetError(ValueError):
    """Unknown preset name or unusable preset parameters."""


@dataclass(frozen=True)
class Preset:
    name: str
    description: str
    discrete: Callable[..., Strategy]
    sampled: Callable[..., SampledStrategy]


def _ca_grid(M: int) -> np.ndarray:
    return np.arange(M + 1) / M


def _constant_discrete(M: int, **_) -> Strategy:
    return Strategy(np.ones(M + 1), M)


def _constant_sampled(N: int, **_) -> SampledStrategy:
    return SampledStrategy(np.ones(N + 1), N)


def _parabola(x: np.ndarray) -> np.ndarray:
    return (x - 0.5) ** 2


def _decreasing(x: np.ndarray) -> np.ndarray:
    return 1.0 - x


def _tent_values(x: np.ndarray, weights: np.ndarray, r: float) -> np.ndarray:
    if not (0.5 < r < 1.0):
        raise PresetError(f"tent parameter r must lie in (1/2, 1), got {r}")
    left = np.where(x <= r, 1.0 - x / r, 0.0)
    right = np.where(x >= r, x - r, 0.0)
    v = x - 0.5
    # slope a with sum_j weights_j v_j (left + a * right)_j = 0, i.e. the
    # grid MCA exactly 1/2 so the run starts on the constraint boundary
    w_left = float((weights * v) @ left)
    w_right = float((weights * v) @ right)
    if w_right == 0.0:
        raise PresetError(f"degenerate tent: no grid points beyond r={r}")
    a = -w_left / w_right
    if a <= 0:
        raise PresetError(f"tent slope came out nonpositive for r={r}")
    return left + a * right


def _tent_discrete(M: int, r: float = 0.75, **_) -> Strategy:
    return Strategy(_tent_values(_ca_grid(M), np.ones(M + 1), r), M)


def _tent_sampled(N: int, r: float = 0.75, **_) -> SampledStrategy:
    x = quadrature.grid(N)
    return SampledStrategy(_tent_values(x, quadrature.weights(N), r), N)


def _perturbed_discrete(M: int, delta: float = 0.01, k: Optional[int] = None, **_) -> Strategy:
    if k is None:
        k = M // 2
    if not (0 <= k <= M):
        raise PresetError(f"perturbation index k={k} outside 0..{M}")
    vals = np.ones(M + 1)
    vals[k] += delta
    return Strategy(vals, M)


def _perturbed_sampled(N: int, delta: float = 0.01, k: Optional[int] = None, **_) -> SampledStrategy:
    if k is None:
        k = N // 2
    if not (0 <= k <= N):
        raise PresetError(f"perturbation index k={k} outside 0..{N}")
    vals = np.ones(N + 1)
    vals[k] += delta
    return SampledStrategy(vals, N)


def _negative_demo_discrete(M: int, **_) -> Strategy:
    vals = np.ones(M + 1)
    vals[M // 2] = -0.25
    return Strategy(vals, M)


def _negative_demo_sampled(N: int, **_) -> SampledStrategy:
    vals = np.ones(N + 1)
    vals[N // 2] = -0.25
    return SampledStrategy(vals, N)


def _random_boundary_values(n: int, rng: np.random.Generator) -> np.ndarray:
    """Random positive vector with grid MCA on the boundary.

    A mirror-symmetrised positive draw has the boundary MCA by symmetry;
    an asymmetric component projected off the constraint direction is
    added on top, small enough to keep every entry positive.
    """
    base = rng.uniform(0.4, 1.6, n)
    sym = base + base[::-1]
    noise = rng.uniform(-1.0, 1.0, n)
    v = (2.0 * np.arange(n) - (n - 1)) / (2.0 * (n - 1))
    noise = noise - v * (float(v @ noise) / float(v @ v))
    scale = 0.25 * sym.min() / max(float(np.max(np.abs(noise))), 1e-30)
    return sym + scale * noise


def _random_discrete(M: int, seed: int = 0, **_) -> Strategy:
    rng = np.random.default_rng(seed)
    return Strategy(_random_boundary_values(M + 1, rng), M)


def _random_sampled(N: int, seed: int = 0, **_) -> SampledStrategy:
    rng = np.random.default_rng(seed)
    samples = _random_boundary_values(N + 1, rng)
    # re-centre with quadrature weights: the end nodes carry half weight
    om = quadrature.weights(N)
    v = quadrature.centered_nodes(N)
    shift = float((om * v) @ samples) / float((om * v) @ v)
    samples = samples - shift * v
    return SampledStrategy(samples, N)


def _random_low_mca_values(x: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    envelope = (1.0 - x) ** 3 + 0.02
    return rng.uniform(0.5, 1.5, len(x)) * envelope


def _random_low_discrete(M: int, seed: int = 0, **_) -> Strategy:
    rng = np.random.default_rng(seed)
    return Strategy(_random_low_mca_values(_ca_grid(M), rng), M)


def _random_low_sampled(N: int, seed: int = 0, **_) -> SampledStrategy:
    rng = np.random.default_rng(seed)
    return SampledStrategy(_random_low_mca_values(quadrature.grid(N), rng), N)


REGISTRY: Dict[str, Preset] = {
    p.name: p
    for p in [
        Preset("constant", "the equilibrium composition (1, ..., 1)",
               _constant_discrete, _constant_sampled),
        Preset("parabola", "samples of (x - 1/2)^2",
               lambda M, **kw: Strategy(_parabola(_ca_grid(M)), M),
               lambda N, **kw: SampledStrategy(_parabola(quadrature.grid(N)), N)),
        Preset("decreasing", "samples of 1 - x (MCA one third)",
               lambda M, **kw: Strategy(_decreasing(_ca_grid(M)), M),
               lambda N, **kw: SampledStrategy(_decreasing(quadrature.grid(N)), N)),
        Preset("tent", "piecewise-linear spike at 0 and ramp past r, boundary MCA",
               _tent_discrete, _tent_sampled),
        Preset("perturbed-constant", "all ones except one bumped component",
               _perturbed_discrete, _perturbed_sampled),
        Preset("negative-demo", "deliberately invalid state with a negative dip",
               _negative_demo_discrete, _negative_demo_sampled),
        Preset("random", "seeded positive strategy with boundary MCA",
               _random_discrete, _random_sampled),
        Preset("random-low-mca", "seeded positive strategy concentrated at low CA",
               _random_low_discrete, _random_low_sampled),
    ]
}


def names() -> list:
    return sorted(REGISTRY)


def get(name: str) -> Preset:
    try:
        return REGISTRY[name]
    except KeyError:
        raise PresetError(
            f"unknown preset {name!r}; available: {', '.join(names())}"
        ) from None


def make_discrete(name: str, M: int, **params) -> Strategy:
    return get(name).discrete(M, **params)


def make_sampled(name: str, N: int, **params) -> SampledStrategy:
    return get(name).sampled(N, **params)
