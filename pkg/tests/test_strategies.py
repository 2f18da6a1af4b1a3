"""Payoffs, MCA, validity and file round-trips for both strategy types."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from teamgame import (
    DimensionMismatchError,
    SampledStrategy,
    Strategy,
    ZeroMassError,
    mass,
    mca_discrete,
    mca_function,
    payoff_discrete,
    payoff_function,
    read_strategy_csv,
    validate,
    write_strategy_csv,
)
from teamgame import quadrature


def disc(*values):
    return Strategy.from_values(np.array(values, dtype=float))


def sampled(fn, N):
    return SampledStrategy.from_function(fn, N)


finite_components = st.floats(min_value=0.0, max_value=2.0, allow_nan=False)


class TestPayoffDiscrete:
    def test_self_play_ones(self):
        a = disc(1, 1)
        assert payoff_discrete(a, a) == 0.0

    def test_hand_value_single_winner(self):
        # (0,1) has its one member at CA 1; it beats the (1,0) member at CA 0
        assert payoff_discrete(disc(0, 1), disc(1, 0)) == 1.0

    def test_hand_value_mirror(self):
        assert payoff_discrete(disc(1, 0), disc(0, 1)) == -1.0

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            payoff_discrete(disc(1, 1), disc(1, 1, 1))

    @given(arrays(float, 7, elements=finite_components),
           arrays(float, 7, elements=finite_components))
    @settings(max_examples=60, deadline=None)
    def test_zero_sum_exact(self, a, b):
        sa, sb = Strategy.from_values(a), Strategy.from_values(b)
        assert payoff_discrete(sa, sb) + payoff_discrete(sb, sa) == 0.0

    @given(arrays(float, 6, elements=finite_components))
    @settings(max_examples=60, deadline=None)
    def test_self_play_zero_exact(self, a):
        sa = Strategy.from_values(a)
        assert payoff_discrete(sa, sa) == 0.0

    @given(arrays(float, 6, elements=finite_components),
           arrays(float, 6, elements=finite_components),
           st.floats(min_value=0.1, max_value=8.0))
    @settings(max_examples=60, deadline=None)
    def test_bilinearity_in_first_slot(self, a, b, c):
        sa, sb = Strategy.from_values(a), Strategy.from_values(b)
        scaled = Strategy.from_values(c * a)
        lhs = payoff_discrete(scaled, sb)
        rhs = c * payoff_discrete(sa, sb)
        assert abs(lhs - rhs) <= 1e-12 * (1.0 + abs(rhs))


class TestPayoffFunction:
    def test_self_play_various(self):
        for fn in (lambda x: np.ones_like(x), lambda x: 1 - x, lambda x: (x - 0.3) ** 2):
            f = sampled(fn, 200)
            assert abs(payoff_function(f, f)) <= 1e-14

    def test_uniform_vs_decreasing(self):
        # E[1, 1-x] = 2 (1/2 - 1/3) * 1/2 = 1/6
        f = sampled(lambda x: np.ones_like(x), 256)
        g = sampled(lambda x: 1 - x, 256)
        assert payoff_function(f, g) == pytest.approx(1 / 6, abs=2e-3)

    def test_antisymmetric_pair(self):
        f = sampled(lambda x: np.ones_like(x), 256)
        g = sampled(lambda x: 1 - x, 256)
        assert payoff_function(g, f) == pytest.approx(-1 / 6, abs=2e-3)

    def test_dimension_and_quadrature_mismatch(self):
        f = sampled(lambda x: np.ones_like(x), 64)
        g = sampled(lambda x: np.ones_like(x), 128)
        with pytest.raises(DimensionMismatchError):
            payoff_function(f, g)

    @given(arrays(float, 65, elements=finite_components),
           arrays(float, 65, elements=finite_components))
    @settings(max_examples=60, deadline=None)
    def test_zero_sum_exact(self, a, b):
        fa, fb = SampledStrategy.from_samples(a), SampledStrategy.from_samples(b)
        assert payoff_function(fa, fb) + payoff_function(fb, fa) == 0.0

    @given(arrays(float, 65, elements=finite_components))
    @settings(max_examples=60, deadline=None)
    def test_self_play_zero(self, a):
        fa = SampledStrategy.from_samples(a)
        # evaluation is antisymmetrised, so this is exact
        assert payoff_function(fa, fa) == 0.0

    def test_payoff_against_uniform_identity(self):
        # E[u, g] = 2 (1/2 - mca(g)) mass(g) u, up to quadrature error
        N = 128
        h = 1.0 / N
        rng = np.random.default_rng(11)
        for u in (1.0, 2.5):
            uf = SampledStrategy.from_samples(np.full(N + 1, u))
            for _ in range(20):
                g = SampledStrategy.from_samples(rng.uniform(0.0, 2.0, N + 1))
                expected = 2.0 * (0.5 - mca_function(g)) * mass(g) * u
                got = payoff_function(uf, g)
                assert abs(got - expected) <= u * h * h * float(np.max(g.samples) + 1)


class TestMca:
    def test_uniform_is_half(self):
        assert mca_discrete(disc(1, 1, 1, 1)) == 0.5

    def test_all_mass_at_zero(self):
        assert mca_discrete(disc(1, 0, 0, 0)) == 0.0

    def test_symmetric_three_point(self):
        assert mca_discrete(disc(1, 0, 1)) == 0.5

    def test_zero_mass_raises(self):
        with pytest.raises(ZeroMassError):
            mca_discrete(disc(0, 0, 0))
        with pytest.raises(ZeroMassError):
            mca_function(SampledStrategy.from_samples(np.zeros(9)))

    def test_constant_function(self):
        f = sampled(lambda x: np.full_like(x, 3.7), 256)
        assert mca_function(f) == pytest.approx(0.5, abs=1e-14)

    def test_decreasing_function(self):
        f = sampled(lambda x: 1 - x, 1024)
        assert mca_function(f) == pytest.approx(1 / 3, abs=1e-6)

    def test_increasing_function(self):
        f = sampled(lambda x: x, 1024)
        assert mca_function(f) == pytest.approx(2 / 3, abs=1e-6)

    def test_monotone_strategies_bound(self):
        # nondecreasing samples push the MCA to 1/2 or above (and mirrored)
        rng = np.random.default_rng(21)
        N = 129
        for _ in range(100):
            inc = np.sort(rng.uniform(0.0, 2.0, N + 1))
            assert mca_function(SampledStrategy.from_samples(inc)) >= 0.5 - 1e-9
            assert mca_function(SampledStrategy.from_samples(inc[::-1])) <= 0.5 + 1e-9

    def test_strictly_increasing_continuous(self):
        rng = np.random.default_rng(22)
        N = 200
        for _ in range(50):
            f = np.cumsum(rng.uniform(0.01, 1.0, N + 1))
            assert mca_function(SampledStrategy.from_samples(f)) > 0.5


class TestValidate:
    def test_all_good(self):
        rep = validate(disc(1, 1, 1))
        assert rep.nonnegative and rep.positive_mass and rep.mca_ok
        assert rep.mca_value == 0.5
        assert rep.first_negative_index is None
        assert rep.is_valid

    def test_negative_component(self):
        rep = validate(disc(1, -0.1, 1))
        assert not rep.nonnegative
        assert rep.first_negative_index == 1

    def test_mca_violation(self):
        rep = validate(disc(0, 0, 1))
        assert not rep.mca_ok
        assert rep.mca_value == 1.0
        assert not rep.is_valid

    def test_roundoff_negative_tolerated(self):
        rep = validate(disc(1.0, -1e-13, 1.0))
        assert rep.nonnegative

    def test_zero_mass(self):
        rep = validate(disc(0, 0, 0))
        assert not rep.positive_mass
        assert not rep.mca_ok
        assert np.isnan(rep.mca_value)


class TestConstruction:
    def test_length_enforced(self):
        with pytest.raises(ValueError):
            Strategy(np.ones(3), M=3)
        with pytest.raises(ValueError):
            SampledStrategy(np.ones(3), N=3)

    def test_unknown_quadrature_rejected(self):
        with pytest.raises(ValueError):
            SampledStrategy(np.ones(5), 4, quadrature="simpson")

    def test_addition_combines_teams(self):
        s = disc(1, 0, 2) + disc(0, 1, 1)
        assert np.array_equal(s.values, [1, 1, 3])
        with pytest.raises(DimensionMismatchError):
            disc(1, 0) + disc(1, 0, 0)

    def test_addition_rejects_mixed_kinds(self):
        with pytest.raises(DimensionMismatchError):
            disc(1, 1) + SampledStrategy.from_samples(np.ones(2))


class TestCsvRoundTrip:
    def test_discrete(self, tmp_path):
        a = disc(1.0, 0.25, 3.5, 0.0)
        path = tmp_path / "strategy.csv"
        write_strategy_csv(a, path)
        back = read_strategy_csv(path)
        assert isinstance(back, Strategy)
        assert np.array_equal(back.values, a.values)

    def test_sampled(self, tmp_path):
        f = sampled(lambda x: (x - 0.5) ** 2, 32)
        path = tmp_path / "strategy.csv"
        write_strategy_csv(f, path)
        back = read_strategy_csv(path)
        assert isinstance(back, SampledStrategy)
        assert np.array_equal(back.samples, f.samples)

    def test_line_endings_are_lf(self, tmp_path):
        path = tmp_path / "strategy.csv"
        write_strategy_csv(disc(1, 2), path)
        raw = path.read_bytes()
        assert b"\r" not in raw
        assert raw.startswith(b"index,value\n")

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "strategy.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(ValueError):
            read_strategy_csv(path)


def test_quadrature_helpers_exactness():
    # dyadic N keeps the constraint-direction weights exactly summable
    N = 256
    om = quadrature.weights(N)
    v = quadrature.centered_nodes(N)
    assert float(np.sum(om)) == pytest.approx(1.0, abs=1e-15)
    assert float((om * v) @ np.ones(N + 1)) == 0.0
    assert np.array_equal(v, -v[::-1])
