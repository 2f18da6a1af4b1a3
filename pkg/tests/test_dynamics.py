"""Integration, regime switching, conservation, stationarity, diagnostics."""

import numpy as np
import pytest

from teamgame import (
    IntegratorConfig,
    MCABound,
    SampledStrategy,
    Strategy,
    ZeroMassError,
    build_operators,
    build_propagator,
    defeat_check,
    is_stationary,
    mca_lower_bound,
    mca_rate,
    reverse_simulate,
    simulate,
    switch_time,
    validate,
    w_functional,
    write_trajectory_csv,
)
from teamgame import presets, quadrature


def total_variation(samples):
    return float(np.sum(np.abs(np.diff(samples))))


class TestSimulateBasics:
    def test_constant_trajectory(self):
        traj = simulate(presets.make_discrete("constant", 8),
                        IntegratorConfig(method="rk4", dt=0.01, T=1.0))
        for state in traj.states:
            assert np.max(np.abs(state.values - 1.0)) <= 1e-12
        assert np.all(traj.regime_flags == 1)
        assert switch_time(traj) == 0.0

    def test_scaled_constant_also_starts_on_boundary(self):
        scaled = Strategy(3.0 * np.ones(9), 8)
        traj = simulate(scaled, IntegratorConfig(method="rk4", dt=0.01, T=0.2))
        assert switch_time(traj) == 0.0
        assert np.max(np.abs(traj.states[-1].values - 3.0)) <= 1e-12

    def test_horizon_zero_gives_single_sample(self):
        traj = simulate(presets.make_discrete("constant", 4),
                        IntegratorConfig(method="rk4", dt=0.1, T=0.0))
        assert len(traj.times) == 1 and traj.times[0] == 0.0

    def test_dt_larger_than_horizon_rejected(self):
        with pytest.raises(ValueError):
            simulate(presets.make_discrete("constant", 4),
                     IntegratorConfig(method="rk4", dt=0.5, T=0.1))

    def test_bad_config_rejected(self):
        with pytest.raises(ValueError):
            IntegratorConfig(method="verlet")
        with pytest.raises(ValueError):
            IntegratorConfig(dt=-1.0)
        with pytest.raises(ValueError):
            IntegratorConfig(T=-2.0)

    def test_closed_form_rejected_for_sampled_states(self):
        f = presets.make_sampled("constant", 32)
        with pytest.raises(ValueError):
            simulate(f, IntegratorConfig(method="closed_form", dt=0.01, T=0.1))

    def test_zero_mass_state_raises(self):
        zero = Strategy.from_values(np.zeros(5))
        with pytest.raises(ZeroMassError):
            simulate(zero, IntegratorConfig(dt=0.01, T=0.1))

    def test_times_strictly_increasing_and_final_recorded(self):
        traj = simulate(presets.make_discrete("random", 10, seed=3),
                        IntegratorConfig(method="rk4", dt=1e-3, T=0.53, record_every=7))
        assert np.all(np.diff(traj.times) > 0)
        assert traj.times[-1] == pytest.approx(0.53, abs=1e-12)


class TestConservationOnBoundary:
    def test_mca_mass_and_norm_are_conserved(self):
        y0 = presets.make_discrete("random", 50, seed=0)
        traj = simulate(y0, IntegratorConfig(method="rk4", dt=1e-3, T=10.0))
        assert np.max(np.abs(traj.mca - 0.5)) <= 1e-8
        assert np.max(np.abs(traj.mass / traj.mass[0] - 1.0)) <= 1e-6
        assert np.max(np.abs(traj.l2_norm / traj.l2_norm[0] - 1.0)) <= 1e-6

    def test_regime_absorption(self):
        y0 = presets.make_discrete("decreasing", 20)
        traj = simulate(y0, IntegratorConfig(method="rk4", dt=1e-3, T=3.0))
        ts = switch_time(traj)
        assert ts is not None
        assert np.all(np.diff(traj.regime_flags) >= 0)
        w = build_operators(20).constraint_vector
        after = traj.times >= ts
        assert np.all(traj.regime_flags[after] == 1)
        for state, flagged in zip(traj.states, after):
            if flagged:
                assert float(w @ state.values) >= -1e-10


class TestMonotoneGrowth:
    def test_mass_and_mca_increase_until_switch(self):
        y0 = presets.make_discrete("decreasing", 30)
        traj = simulate(y0, IntegratorConfig(method="rk4", dt=1e-3, T=3.0))
        ts = switch_time(traj)
        assert ts is not None and ts > 0
        pre = traj.times <= ts
        assert np.all(np.diff(traj.mca[pre]) > 0)
        assert np.all(np.diff(traj.mass[pre]) > 0)

    def test_rate_exceeds_quadratic_floor(self):
        f0 = presets.make_sampled("decreasing", 256)
        traj = simulate(f0, IntegratorConfig(method="rk4", dt=1e-3, T=0.5))
        for state, m in zip(traj.states, traj.mca):
            if m < 0.5 - 1e-6:
                assert mca_rate(state) > 2.0 * (0.5 - m) ** 2


class TestLinearityWithinRegime:
    def test_scaling(self):
        y0 = presets.make_discrete("random", 12, seed=5)
        cfg = IntegratorConfig(method="rk4", dt=1e-3, T=1.0)
        base = simulate(y0, cfg)
        scaled = simulate(Strategy(3.0 * y0.values, 12), cfg)
        for s1, s3 in zip(base.states, scaled.states):
            assert np.max(np.abs(s3.values - 3.0 * s1.values)) \
                <= 1e-12 * np.max(np.abs(s3.values))

    def test_superposition_same_regime(self):
        a = presets.make_discrete("random", 12, seed=6)
        b = presets.make_discrete("random", 12, seed=7)
        cfg = IntegratorConfig(method="rk4", dt=1e-3, T=1.0)
        ta, tb = simulate(a, cfg), simulate(b, cfg)
        tsum = simulate(a + b, cfg)
        for sa, sb, ss in zip(ta.states, tb.states, tsum.states):
            assert np.max(np.abs(ss.values - sa.values - sb.values)) <= 1e-11


class TestMethodAgreement:
    def test_euler_rk4_closed_form(self):
        y0 = presets.make_discrete("random", 9, seed=1)
        y0 = Strategy(y0.values / np.max(np.abs(y0.values)), 9)
        stride = 10_000
        t_e = simulate(y0, IntegratorConfig("euler", 1e-5, 2.0, record_every=20 * stride))
        t_r = simulate(y0, IntegratorConfig("rk4", 1e-3, 2.0, record_every=2 * stride))
        t_c = simulate(y0, IntegratorConfig("closed_form", 1e-3, 2.0, record_every=2 * stride))
        final = [t.states[-1].values for t in (t_e, t_r, t_c)]
        assert np.max(np.abs(final[0] - final[1])) <= 1e-5
        assert np.max(np.abs(final[1] - final[2])) <= 1e-5
        assert np.max(np.abs(final[0] - final[2])) <= 1e-5


class TestRegimeSwitchHandling:
    def test_switch_time_step_size_independent(self):
        y0 = presets.make_discrete("random-low-mca", 50, seed=7)
        coarse = simulate(y0, IntegratorConfig("rk4", 0.02, 2.0))
        fine = simulate(y0, IntegratorConfig("rk4", 0.0002, 2.0))
        t1, t2 = switch_time(coarse), switch_time(fine)
        assert t1 is not None and t2 is not None
        assert abs(t1 - t2) <= 0.04

    def test_switch_sample_sits_on_boundary(self):
        y0 = presets.make_discrete("decreasing", 16)
        traj = simulate(y0, IntegratorConfig("rk4", 0.01, 2.0))
        ts = switch_time(traj)
        idx = int(np.argmin(np.abs(traj.times - ts)))
        w = build_operators(16).constraint_vector
        wval = float(w @ traj.states[idx].values)
        assert -1e-12 <= wval <= 1e-10

    def test_no_switch_reports_none(self):
        # gate stays off over a tiny horizon
        y0 = presets.make_discrete("decreasing", 16)
        traj = simulate(y0, IntegratorConfig("rk4", 1e-3, 0.01))
        assert switch_time(traj) is None
        assert np.all(traj.regime_flags == 0)

    def test_closed_form_splits_at_switch(self):
        y0 = presets.make_discrete("random-low-mca", 20, seed=1)
        closed = simulate(y0, IntegratorConfig("closed_form", 0.01, 1.5))
        fine = simulate(y0, IntegratorConfig("rk4", 1e-4, 1.5))
        t1, t2 = switch_time(closed), switch_time(fine)
        assert t1 is not None and t2 is not None
        assert abs(t1 - t2) <= 1e-4
        assert np.max(np.abs(closed.states[-1].values - fine.states[-1].values)) <= 1e-5


class TestSmoothnessProxy:
    def test_total_variation_grows_at_most_linearly(self):
        # the spatial derivative of the field is 2f minus a constant, so
        # TV(state) gains at most (2 mass + 3 sup) per unit time
        f0 = presets.make_sampled("tent", 256)
        traj = simulate(f0, IntegratorConfig("rk4", 1e-3, 1.0))
        tv0 = total_variation(traj.states[0].samples)
        rate_bound = 2.0 * np.max(traj.mass) + 3.0 * max(
            np.max(np.abs(s.samples)) for s in traj.states)
        for t, state in zip(traj.times, traj.states):
            assert total_variation(state.samples) <= tv0 + rate_bound * t + 1e-9


class TestStrategySpaceExit:
    def test_tent_goes_negative_but_run_continues(self):
        f0 = presets.make_sampled("tent", 256, r=0.75)
        traj = simulate(f0, IntegratorConfig("rk4", 1e-3, 0.2))
        assert validate(f0).is_valid
        assert any(not rep.nonnegative for rep in traj.validity)
        # the dip appears near the kink where the constrained gradient is negative
        bad = [rep.first_negative_index for rep in traj.validity if not rep.nonnegative]
        assert all(abs(idx / 256 - 0.75) < 0.2 for idx in bad)


class TestIsStationary:
    def test_constant_and_alternating(self):
        assert is_stationary(Strategy.from_values(np.ones(7)))
        assert is_stationary(Strategy.from_values([1.0, 0.0, 1.0]))
        assert is_stationary(presets.make_sampled("constant", 64))

    def test_perturbed_equilibrium_is_not(self):
        vals = np.ones(7)
        vals[3] += 1e-3
        assert not is_stationary(Strategy.from_values(vals))


class TestMcaRateAndBound:
    def test_rate_vanishes_on_boundary(self):
        f = presets.make_sampled("random", 128, seed=2)
        assert mca_rate(f) <= 1e-15

    def test_rate_of_decreasing_profile(self):
        f = presets.make_sampled("decreasing", 2048)
        assert mca_rate(f) == pytest.approx(2 / 9, abs=1e-6)

    def test_rate_matches_finite_difference(self):
        f = presets.make_sampled("random-low-mca", 256, seed=4)
        h = 1e-5
        traj = simulate(f, IntegratorConfig("rk4", h, h, record_every=1))
        fd = (traj.mca[-1] - traj.mca[0]) / h
        assert mca_rate(f) == pytest.approx(fd, abs=1e-4)

    def test_bound_construction_and_evaluation(self):
        f = presets.make_sampled("decreasing", 512)
        bound = MCABound.from_initial(f)
        assert bound.c0 == pytest.approx(6.0, abs=1e-3)
        from teamgame.strategies import mca_function
        assert mca_lower_bound(bound, 0.0) == pytest.approx(mca_function(f), abs=1e-14)
        ts = np.linspace(0.0, 50.0, 200)
        vals = [mca_lower_bound(bound, t) for t in ts]
        assert np.all(np.diff(vals) > 0)
        assert vals[-1] < 0.5
        with pytest.raises(ValueError):
            mca_lower_bound(bound, -1.0)

    def test_bound_requires_subcritical_mca(self):
        with pytest.raises(ValueError):
            MCABound.from_initial(presets.make_sampled("constant", 64))

    def test_trajectory_dominates_bound(self):
        f0 = presets.make_sampled("decreasing", 512)
        bound = MCABound.from_initial(f0)
        traj = simulate(f0, IntegratorConfig("rk4", 1e-3, 2.0))
        ts = switch_time(traj)
        for t, m in zip(traj.times, traj.mca):
            if 0.0 < t <= ts:
                assert m > mca_lower_bound(bound, t)


class TestDefeat:
    def test_stationary_initial_gives_zeros(self):
        traj = simulate(presets.make_discrete("constant", 10),
                        IntegratorConfig("rk4", 0.01, 0.5))
        assert np.array_equal(defeat_check(traj), np.zeros(len(traj.times)))

    def test_nonconstant_boundary_initial_wins_early(self):
        f0 = presets.make_sampled("random", 128, seed=9)
        traj = simulate(f0, IntegratorConfig("rk4", 1e-3, 0.1, record_every=20))
        values = defeat_check(traj)
        assert values[-1] > 0
        assert np.array_equal(values, traj.payoff_vs_initial)

    def test_never_returns_to_constant(self):
        f0 = presets.make_sampled("random", 128, seed=9)
        om = quadrature.weights(128)
        traj = simulate(f0, IntegratorConfig("rk4", 1e-3, 2.0))
        for state in traj.states:
            mean = float(om @ state.samples)  # unit-length domain
            assert np.max(np.abs(state.samples - mean)) > 1e-6


class TestReverse:
    def test_zero_horizon_returns_target(self):
        target = presets.make_discrete("constant", 9)
        out = reverse_simulate(target, 0.0, IntegratorConfig("rk4", 1e-3, 1.0))
        assert np.array_equal(out.values, target.values)

    def test_round_trip(self):
        target = presets.make_discrete("constant", 9)
        cfg = IntegratorConfig("rk4", 1e-3, 0.5)
        start = reverse_simulate(target, 0.5, cfg)
        fwd = simulate(start, cfg)
        assert np.max(np.abs(fwd.states[-1].values - 1.0)) <= 1e-8

    def test_small_horizon_stays_positive(self):
        target = presets.make_discrete("constant", 9)
        cfg = IntegratorConfig("rk4", 1e-4, 0.1)
        start = reverse_simulate(target, 0.1, cfg)
        assert np.min(start.values) > 0

    def test_closed_form_matches_rk4(self):
        target = presets.make_discrete("constant", 9)
        r1 = reverse_simulate(target, 0.4, IntegratorConfig("rk4", 1e-4, 0.4))
        r2 = reverse_simulate(target, 0.4, IntegratorConfig("closed_form", 1e-2, 0.4))
        assert np.max(np.abs(r1.values - r2.values)) <= 1e-9

    def test_sampled_round_trip(self):
        target = presets.make_sampled("constant", 64)
        cfg = IntegratorConfig("rk4", 1e-3, 0.2)
        start = reverse_simulate(target, 0.2, cfg)
        fwd = simulate(start, cfg)
        assert np.max(np.abs(fwd.states[-1].samples - 1.0)) <= 1e-8


class TestBranchRegimes:
    def test_centre_perturbations_mirror_exactly(self):
        # the centre component has zero constraint weight, so both signs
        # stay in the boundary regime and the midpoint stays put
        M, delta = 50, 0.01
        cfg = IntegratorConfig("rk4", 1e-2, 2.0)
        up = simulate(presets.make_discrete("perturbed-constant", M, delta=delta), cfg)
        down = simulate(presets.make_discrete("perturbed-constant", M, delta=-delta), cfg)
        for su, sd in zip(up.states, down.states):
            mid = 0.5 * (su.values + sd.values)
            assert np.max(np.abs(mid - 1.0)) <= 1e-9

    def test_edge_perturbations_split_regimes(self):
        # at k = 0 the two signs start on opposite sides of the constraint
        # boundary; each branch follows its own regime's linear flow, so
        # superposition applies per regime rather than across the pair
        M, delta = 20, 0.01
        ops = build_operators(M)
        cfg = IntegratorConfig("rk4", 1e-3, 0.5, record_every=100)
        up = simulate(presets.make_discrete("perturbed-constant", M, delta=delta, k=0), cfg)
        down = simulate(presets.make_discrete("perturbed-constant", M, delta=-delta, k=0), cfg)
        assert up.regime_flags[0] == 0 and down.regime_flags[0] == 1
        e0 = np.zeros(M + 1)
        e0[0] = 1.0
        prop_L = build_propagator(ops, "L")
        prop_c = build_propagator(ops, "constrained")
        ts_up = switch_time(up)
        for t, state in zip(up.times, up.states):
            if t < ts_up:
                expected = prop_L.propagate(t, np.ones(M + 1) + delta * e0)
                assert np.max(np.abs(state.values - expected)) <= 1e-9
        for t, state in zip(down.times, down.states):
            expected = prop_c.propagate(t, np.ones(M + 1) - delta * e0)
            assert np.max(np.abs(state.values - expected)) <= 1e-9


def test_trajectory_csv_format(tmp_path):
    traj = simulate(presets.make_discrete("constant", 3),
                    IntegratorConfig("rk4", 0.1, 0.3))
    path = tmp_path / "trajectory.csv"
    write_trajectory_csv(traj, path, comments=["demo run"])
    lines = path.read_text().splitlines()
    assert lines[0] == "# demo run"
    assert lines[1] == "t,regime,mca,mass,l2,payoff_vs_initial,y_0,y_1,y_2,y_3"
    data = np.genfromtxt(path, delimiter=",", skip_header=2)
    assert data.shape == (len(traj.times), 10)
    assert np.allclose(data[:, 2], 0.5)
