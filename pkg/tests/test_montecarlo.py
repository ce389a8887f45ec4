import math

import numpy as np
import pytest

from padnet.empirical import EmpiricalDistribution
from padnet.montecarlo import (simulate_coverage, simulate_energy,
                               simulate_interference_functional,
                               wilson_interval)
from padnet.params import NumericsConfig, SystemParams

P = SystemParams()
NUM = NumericsConfig()


class TestWilson:
    def test_half_width_near_half(self):
        lo, hi = wilson_interval(50_000, 100_000)
        assert hi - lo < 0.02
        assert lo < 0.5 < hi

    def test_bounds(self):
        lo, hi = wilson_interval(0, 100)
        assert lo == pytest.approx(0.0, abs=1e-12) and hi < 0.05
        lo, hi = wilson_interval(100, 100)
        assert hi == pytest.approx(1.0, abs=1e-12) and lo > 0.95


class TestCoverageLimits:
    def test_vanishing_threshold_covers_everyone(self):
        p = SystemParams(gamma_thr=1e-12)
        est = simulate_coverage("s1", p, NUM, 2000, np.random.default_rng(0))
        assert est.p_total > 0.999

    def test_overwhelming_noise_covers_no_one(self):
        p = SystemParams(sigma2=1e6)
        est = simulate_coverage("s1", p, NUM, 2000, np.random.default_rng(1))
        assert est.p_total == 0.0

    def test_served_fractions_partition(self):
        est = simulate_coverage("s1", P, NUM, 5000, np.random.default_rng(2))
        total = est.served_uav_los + est.served_uav_nlos + est.served_tbs
        assert total == pytest.approx(1.0, abs=1e-12)
        assert est.p_uav_los <= est.served_uav_los
        assert est.p_tbs <= est.served_tbs


class TestDeterminism:
    def test_bit_exact_repeat(self):
        a = simulate_coverage("s2", P, NUM, 10_000, np.random.default_rng(3))
        b = simulate_coverage("s2", P, NUM, 10_000, np.random.default_rng(3))
        assert a == b

    def test_worker_count_invariant(self):
        a = simulate_coverage("s1", P, NUM, 9000, np.random.default_rng(4),
                              workers=1)
        b = simulate_coverage("s1", P, NUM, 9000, np.random.default_rng(4),
                              workers=3)
        assert a == b

    def test_functional_determinism(self):
        a = simulate_interference_functional(
            1e7, 100.0, 1e-5, P, NUM, 5000, np.random.default_rng(5))
        b = simulate_interference_functional(
            1e7, 100.0, 1e-5, P, NUM, 5000, np.random.default_rng(5))
        assert a == b


class TestFunctional:
    def test_zero_s_is_exactly_one(self):
        est, se = simulate_interference_functional(
            0.0, 100.0, 1e-5, P, NUM, 1000, np.random.default_rng(6))
        assert est == 1.0 and se == 0.0

    def test_no_interferers(self):
        # a vanishing UAV field and a negligible terrestrial one
        p = SystemParams(lambda_t=1e-12)
        num = NumericsConfig(integral_truncation_radius=1e7)
        est, _ = simulate_interference_functional(
            1e9, 100.0, 0.0, p, num, 1000, np.random.default_rng(7))
        assert est == pytest.approx(1.0, abs=2e-3)

    def test_vector_s(self):
        s = np.array([1e6, 1e7])
        est, se = simulate_interference_functional(
            s, 100.0, 1e-5, P, NUM, 2000, np.random.default_rng(8))
        assert est.shape == (2,) and se.shape == (2,)
        assert est[0] > est[1]

    def test_exclusion_inside_window_required(self):
        with pytest.raises(ValueError):
            simulate_interference_functional(
                1e7, 2e4, 1e-5, P, NUM, 10, np.random.default_rng(9))


class TestDropLog:
    def test_csv_schema(self, tmp_path):
        path = tmp_path / "drops.csv"
        simulate_coverage("s1", P, NUM, 500, np.random.default_rng(10),
                          log_path=path)
        lines = path.read_text().splitlines()
        assert lines[0] == "drop_id,served_by,sinr_db,covered,user_cluster"
        assert len(lines) == 501
        cells = lines[1].split(",")
        assert cells[1] in ("uav_los", "uav_nlos", "tbs")
        assert cells[3] in ("0", "1")
        assert cells[4] in ("own", "cross")


class TestSimulatedEnergy:
    def test_reports_and_determinism(self):
        a = simulate_energy("s1", P, NUM, 4000, np.random.default_rng(11))
        b = simulate_energy("s1", P, NUM, 4000, np.random.default_rng(11))
        assert a.ee == b.ee and a.mean_travel == b.mean_travel
        assert a.se > 0 and a.p_tot > 0
        assert a.ee == pytest.approx(a.se / a.p_tot)

    def test_s2_density_in_range(self):
        rep = simulate_energy("s2", P, NUM, 4000, np.random.default_rng(12))
        assert P.lambda_user <= rep.lambda_u <= 2 * P.lambda_user


class TestEmpiricalDistribution:
    def test_cdf_and_mean(self):
        emp = EmpiricalDistribution([3.0, 1.0, 2.0, 2.0])
        assert emp.cdf(0.5) == 0.0
        assert emp.cdf(2.0) == 0.75
        assert emp.mean() == 2.0

    def test_ks_with_shared_atom(self):
        # half the mass at zero on both sides: the gap is the tail shape
        samples = np.concatenate((np.zeros(5000),
                                  np.random.default_rng(13).uniform(0, 1, 5000)))

        def cdf(x):
            x = np.asarray(x, dtype=float)
            return np.clip(0.5 + 0.5 * x, 0.0, 1.0) * (x >= 0)

        assert EmpiricalDistribution(samples).ks_distance(cdf) < 0.02

    def test_csv_round_trip(self, tmp_path):
        emp = EmpiricalDistribution([1.0, 2.0])
        path = tmp_path / "emp.csv"
        emp.to_csv(path)
        lines = path.read_text().splitlines()
        assert lines[0] == "l_m,cdf"
        assert lines[1] == "1.0,0.5"
        assert lines[2] == "2.0,1.0"
