"""Adaptive dynamics for the game of teams.

Strategies are compositions of competitive ability, either as vectors on
a discrete CA grid or as sampled functions on [0, 1].  The package builds
the constrained selection-gradient operators for both representations,
analyses their spectra exactly and numerically, integrates the gated
dynamics with sharp regime switching, and ships a CLI plus presets for
the standard experiments.
"""

from .strategies import (
    DimensionMismatchError,
    SampledStrategy,
    Strategy,
    ValidityReport,
    ZeroMassError,
    mass,
    mca,
    mca_discrete,
    mca_function,
    payoff_discrete,
    payoff_function,
    read_strategy_csv,
    validate,
    write_strategy_csv,
)
from .operators import (
    DiscreteOperators,
    KernelSpec,
    apply_A_discrete,
    apply_A_function,
    apply_adjoint_function,
    build_operators,
    gradient_function,
    heaviside,
    kernel_eval,
    w_functional,
)
from .spectral import (
    CharPoly,
    Propagator,
    Spectrum,
    build_propagator,
    charpoly_binomial,
    charpoly_direct,
    compute_spectrum,
    stationary_basis,
)
from .dynamics import (
    IntegratorConfig,
    MCABound,
    NonFiniteStateError,
    Trajectory,
    defeat_check,
    is_stationary,
    mca_lower_bound,
    mca_rate,
    reverse_simulate,
    simulate,
    switch_time,
    write_trajectory_csv,
)

__version__ = "0.1.0"

__all__ = [
    "CharPoly",
    "DimensionMismatchError",
    "DiscreteOperators",
    "IntegratorConfig",
    "KernelSpec",
    "MCABound",
    "NonFiniteStateError",
    "Propagator",
    "SampledStrategy",
    "Spectrum",
    "Strategy",
    "Trajectory",
    "ValidityReport",
    "ZeroMassError",
    "apply_A_discrete",
    "apply_A_function",
    "apply_adjoint_function",
    "build_operators",
    "build_propagator",
    "charpoly_binomial",
    "charpoly_direct",
    "compute_spectrum",
    "defeat_check",
    "gradient_function",
    "heaviside",
    "is_stationary",
    "kernel_eval",
    "mass",
    "mca",
    "mca_discrete",
    "mca_function",
    "mca_lower_bound",
    "mca_rate",
    "payoff_discrete",
    "payoff_function",
    "read_strategy_csv",
    "reverse_simulate",
    "simulate",
    "stationary_basis",
    "switch_time",
    "validate",
    "w_functional",
    "write_strategy_csv",
    "write_trajectory_csv",
]
