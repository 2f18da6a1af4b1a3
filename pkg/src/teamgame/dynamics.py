"""Time integration of the constrained adaptive dynamics.

The state evolves by ``d/dt y = A y`` where A is the gated constrained
selection gradient.  The gate is re-evaluated at every integrator step
(and every stage of the fourth-order method), and the moment the
constraint functional crosses zero is located by bisection inside the
offending step, so the abrupt regime change is resolved sharply instead
of being smeared across a step.  Once the gate is on it stays on: the
constrained flow conserves the constraint functional.

Three stepping methods are offered.  ``euler`` and ``rk4`` work for both
the discrete and the sampled representation; ``closed_form`` evaluates
the exact matrix-exponential solution of the current regime and is
available for discrete strategies, where the generators are explicit
matrices.

States that leave the strategy set (negative components) do not abort
the run; a validity report is recorded with every sample so the
phenomenon can be observed downstream.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Optional, Union

import numpy as np

from . import quadrature
from .operators import (
    DiscreteOperators,
    apply_A_discrete_values,
    apply_A_function,
    build_operators,
    heaviside,
)
from .spectral import Propagator, build_propagator
from .strategies import (
    AnyStrategy,
    SampledStrategy,
    Strategy,
    ValidityReport,
    ZeroMassError,
    payoff_discrete,
    payoff_function,
    validate,
)

#: Bisection target for the value of the constraint functional at a switch.
SWITCH_TOL = 1e-10

#: Default stationarity tolerance: ||A y||_inf <= tol * ||y||_inf.
STATIONARY_TOL = 1e-10


class NonFiniteStateError(RuntimeError):
    """Raised when integration produces NaN or infinite components."""


@dataclass(frozen=True)
class IntegratorConfig:
    """Step-size, horizon and method selection for one simulation."""

    method: str = "rk4"           # euler | rk4 | closed_form
    dt: float = 1e-3
    T: float = 1.0
    record_every: int = 10

    def __post_init__(self):
        if self.method not in ("euler", "rk4", "closed_form"):
            raise ValueError(f"unknown method {self.method!r}")
        if not (self.dt > 0):
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.T < 0:
            raise ValueError(f"horizon must be nonnegative, got {self.T}")
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")


@dataclass
class Trajectory:
    """Recorded samples of one run: states plus per-sample diagnostics."""

    times: np.ndarray
    states: List[AnyStrategy]
    regime_flags: np.ndarray
    mca: np.ndarray
    mass: np.ndarray
    l2_norm: np.ndarray
    payoff_vs_initial: np.ndarray
    validity: List[ValidityReport]
    switch_time: Optional[float] = None

    def __post_init__(self):
        if len(self.times) > 1 and not np.all(np.diff(self.times) > 0):
            raise ValueError("trajectory times must be strictly increasing")


@dataclass(frozen=True)
class MCABound:
    """Closed-form lower bound for the MCA growth below the boundary.

    ``c0`` is fixed by matching the bound to the initial MCA:
    mca(f0) = 1/2 - 1/c0, so the bound starts exactly at the initial
    value and increases toward 1/2.
    """

    c0: float

    def __post_init__(self):
        if not (self.c0 > 0):
            raise ValueError(f"c0 must be positive (initial MCA below 1/2), got {self.c0}")

    @classmethod
    def from_initial(cls, initial: AnyStrategy) -> "MCABound":
        from .strategies import mca as _mca

        m0 = _mca(initial)
        if not (m0 < 0.5):
            raise ValueError(f"bound requires initial MCA < 1/2, got {m0}")
        return cls(1.0 / (0.5 - m0))


def mca_lower_bound(bound: MCABound, t: float) -> float:
    """Value 1/2 - 1/(c0 + 2t) of the growth bound at time t >= 0."""
    if t < 0:
        raise ValueError(f"time must be nonnegative, got {t}")
    return 0.5 - 1.0 / (bound.c0 + 2.0 * t)


# ---------------------------------------------------------------------------
# Internal representation-specific glue


class _DiscreteModel:
    kind = "discrete"

    def __init__(self, M: int, ops: Optional[DiscreteOperators] = None):
        self.ops = ops if ops is not None else build_operators(M)
        self.M = M
        self._props: dict = {}

    def unwrap(self, state: Strategy) -> np.ndarray:
        return state.values.copy()

    def wrap(self, arr: np.ndarray) -> Strategy:
        return Strategy(arr.copy(), self.M)

    def w_value(self, arr: np.ndarray) -> float:
        return float(self.ops.constraint_vector @ arr)

    def rhs(self, arr: np.ndarray) -> np.ndarray:
        return apply_A_discrete_values(self.ops, arr)

    def rhs_reverse(self, arr: np.ndarray) -> np.ndarray:
        return -(self.ops.gradient_matrix @ arr)

    def mass(self, arr: np.ndarray) -> float:
        return float(np.sum(arr))

    def mca(self, arr: np.ndarray) -> float:
        total = float(np.sum(arr))
        if total == 0.0:
            raise ZeroMassError("zero-mass state encountered (MCA undefined)")
        return float((np.arange(self.M + 1) / self.M) @ arr) / total

    def l2(self, arr: np.ndarray) -> float:
        return float(np.linalg.norm(arr))

    def payoff(self, a: np.ndarray, b: np.ndarray) -> float:
        return payoff_discrete(self.wrap(a), self.wrap(b))

    def propagator(self, regime: str) -> Propagator:
        if regime not in self._props:
            self._props[regime] = build_propagator(self.ops, regime)
        return self._props[regime]


class _SampledModel:
    kind = "sampled"

    def __init__(self, N: int):
        self.N = N
        self._om = quadrature.weights(N)
        self._x = quadrature.grid(N)
        self._v = quadrature.centered_nodes(N)
        self._omv = self._om * self._v

    def unwrap(self, state: SampledStrategy) -> np.ndarray:
        return state.samples.copy()

    def wrap(self, arr: np.ndarray) -> SampledStrategy:
        return SampledStrategy(arr.copy(), self.N)

    def w_value(self, arr: np.ndarray) -> float:
        return float(self._omv @ arr)

    def rhs(self, arr: np.ndarray) -> np.ndarray:
        return apply_A_function(SampledStrategy(arr, self.N)).samples

    def rhs_reverse(self, arr: np.ndarray) -> np.ndarray:
        c = quadrature.cumulative(arr, self.N)
        return -(2.0 * c - c[-1])

    def mass(self, arr: np.ndarray) -> float:
        return float(self._om @ arr)

    def mca(self, arr: np.ndarray) -> float:
        total = float(self._om @ arr)
        if total == 0.0:
            raise ZeroMassError("zero-mass state encountered (MCA undefined)")
        return float((self._om * self._x) @ arr) / total

    def l2(self, arr: np.ndarray) -> float:
        return float(np.sqrt((self._om * arr) @ arr))

    def payoff(self, a: np.ndarray, b: np.ndarray) -> float:
        return payoff_function(self.wrap(a), self.wrap(b))

    def propagator(self, regime: str):
        raise ValueError(
            "closed_form integration is available for discrete strategies only; "
            "use euler or rk4 for sampled strategies"
        )


def _model_for(state: AnyStrategy):
    if isinstance(state, Strategy):
        return _DiscreteModel(state.M)
    if isinstance(state, SampledStrategy):
        return _SampledModel(state.N)
    raise TypeError(f"expected Strategy or SampledStrategy, got {type(state)!r}")


def _make_stepper(model, method: str) -> Callable[[np.ndarray, float, int], np.ndarray]:
    """One integration step of the full gated dynamics.

    For the polynomial methods the gate is re-evaluated inside the rhs at
    every stage; for closed_form the regime passed by the caller is frozen
    across the step, which is valid because steps are split at switches.
    """
    if method == "euler":
        def step(y, dt, regime):
            return y + dt * model.rhs(y)
        return step
    if method == "rk4":
        def step(y, dt, regime):
            k1 = model.rhs(y)
            k2 = model.rhs(y + 0.5 * dt * k1)
            k3 = model.rhs(y + 0.5 * dt * k2)
            k4 = model.rhs(y + dt * k3)
            return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        return step
    if method == "closed_form":
        def step(y, dt, regime):
            prop = model.propagator("constrained" if regime else "L")
            return prop.propagate(dt, y)
        return step
    raise ValueError(f"unknown method {method!r}")


def _bisect_switch(step, y: np.ndarray, dt: float, regime: int, w_of) -> float:
    """Largest step fraction landing just past the constraint boundary.

    Assumes the full step fires the gate while the zero step does not.
    Returns tau such that the state after a step of size tau has
    w >= -HEAVISIDE_TOL and w <= SWITCH_TOL (or the bracket is exhausted).
    """
    lo, hi = 0.0, dt
    for _ in range(200):
        w_hi = w_of(step(y, hi, regime))
        if 0.0 <= w_hi <= SWITCH_TOL or (hi - lo) <= 1e-16 * dt:
            break
        mid = 0.5 * (lo + hi)
        if heaviside(w_of(step(y, mid, regime))):
            hi = mid
        else:
            lo = mid
    return hi


def simulate(initial: AnyStrategy, cfg: IntegratorConfig) -> Trajectory:
    """Integrate the gated dynamics from ``initial`` over the horizon.

    Samples (state plus diagnostics) are recorded at t = 0, every
    ``record_every``-th step, at the exact regime switch, and at the final
    time.  Raises on non-finite states and on zero-mass states, for which
    the MCA diagnostic is undefined.
    """
    model = _model_for(initial)
    if cfg.T > 0 and cfg.dt > cfg.T:
        raise ValueError(f"dt={cfg.dt} exceeds horizon T={cfg.T}")
    step = _make_stepper(model, cfg.method)

    y = model.unwrap(initial)
    y0 = y.copy()
    t = 0.0
    regime = heaviside(model.w_value(y))
    switch_time: Optional[float] = 0.0 if regime else None

    times: List[float] = []
    states: List[AnyStrategy] = []
    flags: List[int] = []
    mcas: List[float] = []
    masses: List[float] = []
    l2s: List[float] = []
    payoffs: List[float] = []
    reports: List[ValidityReport] = []

    def record(tcur: float, ycur: np.ndarray, flag: int) -> None:
        if times and not (tcur > times[-1]):
            return
        if not np.all(np.isfinite(ycur)):
            raise NonFiniteStateError(f"non-finite state at t={tcur}")
        state = model.wrap(ycur)
        times.append(tcur)
        states.append(state)
        flags.append(flag)
        mcas.append(model.mca(ycur))
        masses.append(model.mass(ycur))
        l2s.append(model.l2(ycur))
        payoffs.append(model.payoff(ycur, y0))
        reports.append(validate(state))

    record(t, y, regime)
    nstep = 0
    end = cfg.T * (1.0 - 1e-14)
    while t < end:
        dt = min(cfg.dt, cfg.T - t)
        y_new = step(y, dt, regime)
        flag_new = heaviside(model.w_value(y_new))
        if regime == 0 and flag_new == 1:
            tau = _bisect_switch(step, y, dt, regime, model.w_value)
            y = step(y, tau, regime)
            t += tau
            regime = 1
            switch_time = t
            nstep += 1
            record(t, y, regime)
            continue
        y = y_new
        t += dt
        nstep += 1
        if nstep % cfg.record_every == 0 or t >= end:
            record(t, y, regime)
    if not times or times[-1] < cfg.T * (1.0 - 1e-14):
        record(t, y, regime)

    return Trajectory(
        times=np.array(times),
        states=states,
        regime_flags=np.array(flags, dtype=int),
        mca=np.array(mcas),
        mass=np.array(masses),
        l2_norm=np.array(l2s),
        payoff_vs_initial=np.array(payoffs),
        validity=reports,
        switch_time=switch_time,
    )


def reverse_simulate(target: AnyStrategy, T: float, cfg: IntegratorConfig) -> AnyStrategy:
    """State that evolves into ``target`` after time T under the ungated flow.

    Integrates d/dt y = -grad from the target.  The reversal applies to
    the strict-inequality regime: along the reverse path the constraint
    functional decreases away from zero, so the forward run from the
    returned state is ungated until it reaches the target exactly when the
    constraint activates.  (Reversing the gated generator from a boundary
    state would be useless: boundary equilibria are fixed points of it.)
    """
    if T < 0:
        raise ValueError(f"reverse horizon must be nonnegative, got {T}")
    model = _model_for(target)
    y = model.unwrap(target)
    if T == 0:
        return model.wrap(y)
    if cfg.method == "closed_form":
        prop = model.propagator("L")
        return model.wrap(prop.propagate(-T, y))
    t = 0.0
    end = T * (1.0 - 1e-14)
    while t < end:
        dt = min(cfg.dt, T - t)
        if cfg.method == "euler":
            y = y + dt * model.rhs_reverse(y)
        else:
            k1 = model.rhs_reverse(y)
            k2 = model.rhs_reverse(y + 0.5 * dt * k1)
            k3 = model.rhs_reverse(y + 0.5 * dt * k2)
            k4 = model.rhs_reverse(y + dt * k3)
            y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        if not np.all(np.isfinite(y)):
            raise NonFiniteStateError(f"non-finite state at reverse time {t}")
        t += dt
    return model.wrap(y)


def is_stationary(state: AnyStrategy, tol: float = STATIONARY_TOL) -> bool:
    """Whether the gated generator annihilates the state (relative sup norm)."""
    model = _model_for(state)
    arr = model.unwrap(state)
    scale = float(np.max(np.abs(arr)))
    if scale == 0.0:
        return True
    return float(np.max(np.abs(model.rhs(arr)))) <= tol * scale


def mca_rate(f: SampledStrategy) -> float:
    """Instantaneous time derivative of the MCA along the sampled dynamics.

    Equal to 2 (1/2 - mca)^2 plus, while the gate is off, the mean of
    x (1 - x) under the strategy.  Vanishes exactly on the boundary.
    """
    om = quadrature.weights(f.N)
    x = quadrature.grid(f.N)
    v = quadrature.centered_nodes(f.N)
    total = float(om @ f.samples)
    if total == 0.0:
        raise ZeroMassError("zero-mass strategy (MCA rate undefined)")
    m = float((om * x) @ f.samples) / total
    rate = 2.0 * (0.5 - m) ** 2
    if not heaviside(float((om * v) @ f.samples)):
        rate += float((om * (x * (1.0 - x))) @ f.samples) / total
    return rate


def defeat_check(traj: Trajectory) -> np.ndarray:
    """Payoff of each recorded state against the initial state.

    Positive entries mean the evolved strategy defeats where it started.
    """
    if not traj.states:
        raise ValueError("empty trajectory")
    first = traj.states[0]
    if isinstance(first, Strategy):
        return np.array([payoff_discrete(s, first) for s in traj.states])
    return np.array([payoff_function(s, first) for s in traj.states])


def switch_time(traj: Trajectory) -> Optional[float]:
    """First time the constraint gate is on, refined by the in-step bisection.

    None when the trajectory never reaches the boundary.
    """
    if traj.switch_time is not None:
        return traj.switch_time
    hits = np.flatnonzero(traj.regime_flags == 1)
    if hits.size:
        return float(traj.times[hits[0]])
    return None


def write_trajectory_csv(traj: Trajectory, path, comments: Optional[List[str]] = None) -> None:
    """Export a trajectory with header t,regime,mca,mass,l2,payoff_vs_initial,y_0,...

    Comment lines (prefixed ``#``) go before the header.
    """
    first = traj.states[0]
    ncomp = len(first.values if isinstance(first, Strategy) else first.samples)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in comments or []:
            fh.write(f"# {line}\n")
        cols = ["t", "regime", "mca", "mass", "l2", "payoff_vs_initial"]
        cols += [f"y_{k}" for k in range(ncomp)]
        fh.write(",".join(cols) + "\n")
        for i, state in enumerate(traj.states):
            arr = state.values if isinstance(state, Strategy) else state.samples
            row = [
                format(traj.times[i], ".17g"),
                str(int(traj.regime_flags[i])),
                format(traj.mca[i], ".17g"),
                format(traj.mass[i], ".17g"),
                format(traj.l2_norm[i], ".17g"),
                format(traj.payoff_vs_initial[i], ".17g"),
            ]
            row += [format(val, ".17g") for val in arr]
            fh.write(",".join(row) + "\n")
