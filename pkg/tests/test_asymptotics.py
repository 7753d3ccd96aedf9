import math
import time

import numpy as np
import pytest

from uadet.asymptotics import (
    biawgn_capacity,
    csa_required_slots,
    csa_required_symbols,
    de_probe,
    density_evolution_threshold,
    noisy_csa_required_symbols,
)
from uadet.csa import DEFAULT_DISTRIBUTION, DegreeDistribution
from uadet.errors import ConfigError

OPTIMIZED = DEFAULT_DISTRIBUTION
PAIR_ONLY = DegreeDistribution(((2, 1.0),))
SINGLE_COPY = DegreeDistribution(((1, 1.0),))


class TestDeProbe:
    def test_low_load_converges(self):
        p = de_probe(OPTIMIZED, 0.5)
        assert p.converged
        assert p.load == 0.5
        assert p.iterations > 0

    def test_overload_fails(self):
        assert not de_probe(OPTIMIZED, 1.0).converged

    def test_zero_load(self):
        assert de_probe(OPTIMIZED, 0.0).converged

    def test_rejects_negative_load(self):
        with pytest.raises(ConfigError):
            de_probe(OPTIMIZED, -0.1)


class TestThreshold:
    def test_optimized_profile_value_and_speed(self):
        t0 = time.perf_counter()
        res = density_evolution_threshold(OPTIMIZED)
        elapsed = time.perf_counter() - t0
        assert abs(res.g_star - 0.892) <= 0.002
        assert elapsed < 5.0

    def test_threshold_is_a_boundary(self):
        res = density_evolution_threshold(OPTIMIZED)
        assert de_probe(OPTIMIZED, res.g_star - res.tol).converged
        assert not de_probe(OPTIMIZED, res.g_star + 2 * res.tol).converged

    def test_pair_distribution(self):
        # Lambda(x) = x^2 peels up to load 1/2 exactly
        res = density_evolution_threshold(PAIR_ONLY)
        assert abs(res.g_star - 0.5) <= 5e-4

    def test_single_copy_never_peels(self):
        # one replica per user gives no cancellation leverage at any load
        res = density_evolution_threshold(SINGLE_COPY)
        assert res.g_star == 0.0

    def test_probe_log_is_kept(self):
        res = density_evolution_threshold(OPTIMIZED)
        assert len(res.probes) >= 2
        assert {p.load for p in res.probes} >= {0.01, 1.2}

    def test_tol_validation(self):
        with pytest.raises(ConfigError):
            density_evolution_threshold(OPTIMIZED, tol=0.0)
        with pytest.raises(ConfigError):
            density_evolution_threshold(OPTIMIZED, bracket=(0.5, 0.2))


class TestBudgets:
    def test_slots_at_unit_threshold(self):
        assert csa_required_slots(25, 1.0) == 25

    def test_reference_operating_point(self):
        g = density_evolution_threshold(OPTIMIZED).g_star
        assert csa_required_slots(25, g) == 29
        assert csa_required_symbols(25, g, 8) == 225

    def test_larger_population(self):
        g = density_evolution_threshold(OPTIMIZED).g_star
        slots = csa_required_slots(100, g)
        assert slots == math.ceil(100 / g)
        assert csa_required_symbols(100, g, 10) == math.ceil(1000 / g)

    def test_zero_users(self):
        assert csa_required_slots(0, 0.9) == 0
        assert csa_required_symbols(0, 0.9, 8) == 0

    def test_float_fuzz_does_not_overcount(self):
        # 1 / (1/3) lands just above 3.0 in floats; the budget is still 3
        assert csa_required_slots(1, 1 / 3) == 3

    def test_rejects_bad_inputs(self):
        with pytest.raises(ConfigError):
            csa_required_slots(10, 0.0)
        with pytest.raises(ConfigError):
            csa_required_slots(-1, 0.9)
        with pytest.raises(ConfigError):
            csa_required_symbols(10, 0.9, 0)


class TestCapacity:
    def test_extremes(self):
        assert biawgn_capacity(0.05) > 0.9999
        assert biawgn_capacity(100.0) < 1e-3

    def test_half_rate_point(self):
        # the binary-input channel crosses 1/2 bit per use near sigma 0.9787
        assert biawgn_capacity(0.9787009277403811) == pytest.approx(0.5, abs=0.005)

    def test_regression_value(self):
        assert biawgn_capacity(0.9787009277403811) == pytest.approx(
            0.4999954359506965, abs=1e-9)

    def test_strictly_decreasing_in_sigma(self):
        grid = np.linspace(0.2, 3.0, 20)
        vals = [biawgn_capacity(float(s)) for s in grid]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_bounded_in_unit_interval(self):
        for s in (0.01, 0.5, 1.0, 5.0, 50.0):
            assert 0.0 <= biawgn_capacity(s) <= 1.0

    def test_quadrature_is_converged(self):
        # the integrand has a softplus kink, so convergence is slowest at
        # small sigma; 96 nodes sits within 2e-7 of 192 there
        for s in (0.3, 0.9787009277403811, 2.0):
            assert biawgn_capacity(s) == pytest.approx(
                biawgn_capacity(s, nodes=192), abs=1e-6)

    def test_monte_carlo_cross_check(self):
        # independent estimate: sample the same expectation directly
        sigma = 0.9787009277403811
        rng = np.random.default_rng(616)
        z = rng.standard_normal(300_000)
        t = -2.0 * (1.0 + sigma * z) / sigma ** 2
        mc = 1.0 - float(np.mean(np.logaddexp(0.0, t))) / math.log(2.0)
        assert biawgn_capacity(sigma) == pytest.approx(mc, abs=0.005)

    def test_rejects_bad_inputs(self):
        with pytest.raises(ConfigError):
            biawgn_capacity(0.0)
        with pytest.raises(ConfigError):
            biawgn_capacity(1.0, nodes=0)


class TestNoisyBudget:
    def test_divides_by_capacity(self):
        g = 0.892
        base = csa_required_symbols(25, g, 16)
        got = noisy_csa_required_symbols(25, g, 16, 0.9787009277403811)
        assert got == math.ceil(base / biawgn_capacity(0.9787009277403811))

    def test_noise_inflates_budget(self):
        a = noisy_csa_required_symbols(25, 0.892, 16, 0.3)
        b = noisy_csa_required_symbols(25, 0.892, 16, 1.0)
        assert csa_required_symbols(25, 0.892, 16) <= a < b

    def test_zero_users(self):
        assert noisy_csa_required_symbols(0, 0.892, 16, 1.0) == 0
