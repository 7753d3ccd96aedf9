import math

import numpy as np
import pytest

from uadet.cs import (
    DenseCodebook,
    MaxIterations,
    NoiseAdaptiveStop,
    ResidualBelow,
    coherence,
    empirical_m_estimate,
    gen_bernoulli_codebook,
    noise_floor_threshold,
    omp,
    recoverable_amplitude,
    required_m_bound,
)
from uadet.errors import ConditionNotMet, ConfigError
from uadet.model import SystemConfig, substream


def make_codebook(m, N, seed=0):
    return gen_bernoulli_codebook(SystemConfig(N=N, k=0, m=m), substream(seed, "codebook"))


class TestCodebook:
    def test_entries_and_norms(self):
        cb = make_codebook(32, 50)
        assert cb.matrix.shape == (32, 50)
        assert np.all(np.isin(cb.matrix, [-1 / math.sqrt(32), 1 / math.sqrt(32)]))
        assert np.allclose(np.linalg.norm(cb.matrix, axis=0), 1.0)

    def test_transmit_energy_is_squared_amplitude(self):
        cb = make_codebook(64, 10)
        a = 3.0
        assert float(np.sum((a * cb.column(4)) ** 2)) == pytest.approx(a * a, rel=1e-9)

    def test_seeded_determinism(self):
        assert np.array_equal(make_codebook(16, 8, seed=5).matrix,
                              make_codebook(16, 8, seed=5).matrix)

    def test_sign_balance(self):
        cb = make_codebook(128, 200)
        frac = float(np.mean(cb.matrix > 0))
        assert abs(frac - 0.5) < 0.01


class TestCoherence:
    def test_orthogonal_columns(self):
        assert coherence(DenseCodebook(np.eye(3))) == 0.0

    def test_duplicate_columns(self):
        col = np.array([[1.0], [1.0]]) / math.sqrt(2)
        cb = DenseCodebook(np.hstack([col, col]))
        assert coherence(cb) == pytest.approx(1.0, rel=1e-12)

    def test_matches_bruteforce(self):
        cb = make_codebook(24, 12, seed=9)
        expected = max(
            abs(float(cb.column(i) @ cb.column(j)))
            for i in range(12) for j in range(i + 1, 12))
        assert coherence(cb) == pytest.approx(expected, rel=1e-12)

    def test_needs_two_columns(self):
        with pytest.raises(ConfigError):
            coherence(DenseCodebook(np.ones((4, 1))))


class TestOmp:
    def test_zero_measurement(self):
        res = omp(np.zeros(16), make_codebook(16, 8))
        assert res.support == ()
        assert res.iterations == 0
        assert not res.hit_iteration_cap

    def test_single_column(self):
        cb = make_codebook(32, 12, seed=1)
        res = omp(2.5 * cb.column(7), cb)
        assert res.support == (7,)
        assert res.iterations == 1
        assert res.coefficients[0] == pytest.approx(2.5, rel=1e-9)
        assert res.final_residual_norm <= 1e-8

    def test_two_columns_exact(self):
        cb = make_codebook(64, 20, seed=2)
        y = 1.0 * cb.column(3) + 1.0 * cb.column(15)
        res = omp(y, cb)
        assert set(res.support) == {3, 15}
        assert res.final_residual_norm <= 1e-8 * np.linalg.norm(y)

    def test_tie_breaks_to_lowest_index(self):
        col = substream(3, "codebook").integers(0, 2, size=16) * 2.0 - 1.0
        col /= np.linalg.norm(col)
        other = np.roll(col, 5)
        cb = DenseCodebook(np.column_stack([other, col, col]))
        res = omp(col.copy(), cb)
        assert res.support[0] == 1  # indices 1 and 2 tie, lowest wins

    def test_residual_orthogonal_to_support(self):
        cb = make_codebook(48, 30, seed=4)
        rng = substream(4, "mix")
        y = cb.matrix @ rng.normal(size=30)
        res = omp(y, cb, stop=MaxIterations(5))
        r = y - cb.matrix[:, list(res.support)] @ res.coefficients
        # least-squares refit leaves the residual orthogonal to picked columns
        assert np.max(np.abs(cb.matrix[:, list(res.support)].T @ r)) < 1e-9

    def test_max_iterations_rule(self):
        cb = make_codebook(64, 20, seed=5)
        y = cb.matrix[:, [2, 9, 17]].sum(axis=1)
        res = omp(y, cb, stop=MaxIterations(1))
        assert res.iterations == 1
        assert len(res.support) == 1
        assert not res.hit_iteration_cap

    def test_residual_below_rule(self):
        cb = make_codebook(64, 20, seed=6)
        y = cb.column(11)
        res = omp(y, cb, stop=ResidualBelow(10.0))
        assert res.support == ()  # ||y|| = 1 already below 10

    def test_noise_adaptive_rule_stops_at_floor(self):
        cb = make_codebook(100, 40, seed=7)
        y = 9.0 * cb.column(3) + substream(7, "noise").standard_normal(100)
        res = omp(y, cb, stop=NoiseAdaptiveStop(1.0))
        assert 3 in res.support
        assert res.final_residual_norm <= noise_floor_threshold(1.0, 100)

    def test_iteration_cap_on_unreachable_target(self):
        # 5 columns cannot span generic noise in 8 dimensions
        cb = make_codebook(8, 5, seed=8)
        y = substream(8, "noise").standard_normal(8)
        res = omp(y, cb)
        assert res.hit_iteration_cap
        assert res.iterations == 5

    def test_exact_recovery_of_single_users(self):
        cb = make_codebook(64, 32, seed=9)
        for j in range(32):
            res = omp(1.7 * cb.column(j), cb)
            assert res.support == (j,)

    def test_shape_mismatch(self):
        with pytest.raises(ConfigError):
            omp(np.zeros(5), make_codebook(16, 8))

    def test_unknown_rule(self):
        with pytest.raises(ConfigError):
            omp(np.zeros(16), make_codebook(16, 8), stop="whenever")

    def test_negative_iteration_count(self):
        with pytest.raises(ConfigError):
            omp(np.zeros(16), make_codebook(16, 8), stop=MaxIterations(-1))


class TestNoiseFloor:
    def test_zero_noise(self):
        assert noise_floor_threshold(0.0, 100) == 0.0

    def test_reference_value(self):
        assert noise_floor_threshold(1.0, 3) == pytest.approx(2.194411990925493, rel=1e-12)

    def test_scales_linearly_in_sigma(self):
        assert noise_floor_threshold(2.0, 278) == pytest.approx(35.64006123699635, rel=1e-12)

    def test_monotone_in_m(self):
        vals = [noise_floor_threshold(1.0, m) for m in (2, 5, 20, 100, 1000)]
        assert all(a < b for a, b in zip(vals, vals[1:]))

    def test_rejects_bad_inputs(self):
        with pytest.raises(ConfigError):
            noise_floor_threshold(1.0, 0)
        with pytest.raises(ConfigError):
            noise_floor_threshold(-1.0, 10)


class TestRecoverableAmplitude:
    def test_reference_value(self):
        assert recoverable_amplitude(1.0, 278, 25, 0.01) == pytest.approx(
            69.88247301371834, rel=1e-12)

    def test_zero_coherence(self):
        assert recoverable_amplitude(1.0, 100, 5, 0.0) == pytest.approx(
            2 * noise_floor_threshold(1.0, 100), rel=1e-12)

    def test_coherence_too_large(self):
        with pytest.raises(ConditionNotMet):
            recoverable_amplitude(1.0, 278, 25, 1 / 49)
        with pytest.raises(ConditionNotMet):
            recoverable_amplitude(1.0, 278, 25, 0.5)

    def test_rejects_bad_inputs(self):
        with pytest.raises(ConfigError):
            recoverable_amplitude(1.0, 278, 0, 0.01)
        with pytest.raises(ConfigError):
            recoverable_amplitude(1.0, 278, 25, -0.1)


class TestSampleBounds:
    def test_sufficient_bound_value(self):
        assert required_m_bound(256, 25, 0.01) == 1016

    def test_scales_with_constant(self):
        assert required_m_bound(256, 25, 0.01, constant_c=8.0) == math.ceil(
            8 * 25 * math.log(256 / 0.01))

    def test_zero_active_users(self):
        assert required_m_bound(256, 0, 0.01) == 0

    @pytest.mark.parametrize("delta", [0.0, 0.36, 0.5, 1.0, -0.2])
    def test_rejects_delta_outside_range(self, delta):
        with pytest.raises(ConfigError):
            required_m_bound(256, 25, delta)

    def test_rejects_bad_population(self):
        with pytest.raises(ConfigError):
            required_m_bound(0, 0, 0.01)
        with pytest.raises(ConfigError):
            required_m_bound(10, 11, 0.01)
        with pytest.raises(ConfigError):
            required_m_bound(10, 2, 0.01, constant_c=0.0)

    def test_empirical_estimate_value(self):
        assert empirical_m_estimate(256, 25) == 278

    def test_empirical_estimate_monotone(self):
        assert empirical_m_estimate(256, 26) > empirical_m_estimate(256, 25)
        assert empirical_m_estimate(512, 25) > empirical_m_estimate(256, 25)

    def test_empirical_rejects_bad_inputs(self):
        with pytest.raises(ConfigError):
            empirical_m_estimate(1, 5)
