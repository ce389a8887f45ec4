import math

import numpy as np
import pytest

from padnet.geometry import ClusterPairGeometry, mean_rmm
from padnet.params import NumericsConfig
from padnet.travel import (TravelCdfError, _case_table, cdf_l, cdf_l_arcwise,
                           distinct_pad_region_area, mean_l, prob_l_zero,
                           sample_l_oracle, travel_distribution,
                           uav_density_s2)

NUM = NumericsConfig()


def grid_cdf(geom, lambda_c, n=400):
    top = 2 * geom.r_mn
    grid = np.concatenate(([0.0], np.geomspace(top * 1e-4, top, n - 1)))
    vals = np.array([cdf_l(float(l), geom, lambda_c) for l in grid])
    return lambda x: np.interp(x, grid, vals)


class TestProbLZero:
    def test_vanishing_density_limit(self):
        g = ClusterPairGeometry(100.0, 1.0, 300.0)
        assert prob_l_zero(g, 1e-15) == pytest.approx(1.0, abs=1e-9)

    def test_reference_geometry_value(self):
        g = ClusterPairGeometry(100.0, math.pi / 2, 300.0)
        assert distinct_pad_region_area(g) == pytest.approx(296276.2, rel=1e-6)
        assert prob_l_zero(g, 1e-5) == pytest.approx(0.0517, abs=2e-4)

    def test_monotone_in_density(self):
        g = ClusterPairGeometry(100.0, 1.0, 300.0)
        vals = [prob_l_zero(g, lam) for lam in (1e-6, 1e-5, 1e-4)]
        assert vals[0] > vals[1] > vals[2]

    def test_region_area_equals_disk_minus_lens(self):
        # the pad-free requirement region is the far disk minus its
        # overlap with the near pad-free disk, computed independently
        # by the standard two-circle lens formula
        for r_mm, th in ((80.0, 0.7), (150.0, 2.2), (30.0, 2.9)):
            g = ClusterPairGeometry(r_mm, th, 300.0)
            lens = (g.r_mm ** 2 * g.theta_1 + g.r_mn ** 2 * g.theta_3
                    - g.r_mm * g.d_nm * math.sin(g.theta_1))
            expected = math.pi * g.r_mn ** 2 - lens
            assert distinct_pad_region_area(g) == pytest.approx(
                expected, rel=1e-12)

    def test_monte_carlo_agreement(self):
        gen = np.random.default_rng(21)
        g = ClusterPairGeometry(100.0, math.pi / 2, 300.0)
        emp = sample_l_oracle(g, 1e-5, 200_000, gen)
        p_hat = float(np.mean(emp.samples == 0.0))
        assert abs(p_hat - prob_l_zero(g, 1e-5)) < 0.003


class TestCdfL:
    def test_atom_at_zero(self):
        g = ClusterPairGeometry(120.0, 1.2, 300.0)
        assert cdf_l(0.0, g, 1e-5) == prob_l_zero(g, 1e-5)
        assert cdf_l_arcwise(0.0, g, 1e-5) == prob_l_zero(g, 1e-5)

    def test_full_support(self):
        g = ClusterPairGeometry(120.0, 1.2, 300.0)
        top = 2 * g.r_mn
        assert cdf_l(top, g, 1e-5) == 1.0
        assert abs(cdf_l(top * 0.99999, g, 1e-5) - 1.0) < 1e-3

    @pytest.mark.parametrize("r_frac,theta_1,d_nm", [
        (0.2, 0.3, 300.0), (0.45, math.pi / 4, 300.0), (0.6, 1.9, 300.0),
        (0.83, 2.356, 300.0), (0.95, 2.3, 600.0), (0.33, math.pi / 2, 600.0),
        (0.6, 2.8, 300.0), (0.1, 3.1, 600.0),
    ])
    def test_tabulated_matches_arcwise(self, r_frac, theta_1, d_nm):
        # the case-split composition against the direct arc-overlap
        # integral, across every regime
        g = ClusterPairGeometry(r_frac * d_nm, theta_1, d_nm)
        top = 2 * g.r_mn
        for l in np.linspace(top * 1e-3, top * 0.999, 37):
            a = cdf_l(float(l), g, 1e-5)
            b = cdf_l_arcwise(float(l), g, 1e-5)
            assert abs(a - b) < 5e-6, f"l={l}"

    def test_continuous_at_case_boundaries(self):
        for r_mm, theta_1 in ((120.0, 0.6), (180.0, 1.3), (250.0, 2.4),
                              (90.0, 2.0), (200.0, 2.9)):
            g = ClusterPairGeometry(r_mm, theta_1, 300.0)
            edges = sorted({x for lo, hi, _ in _case_table(g)
                            for x in (lo, hi) if 0.0 < x < 2 * g.r_mn})
            for edge in edges:
                lo = cdf_l(edge * (1 - 1e-7), g, 1e-5)
                hi = cdf_l(edge * (1 + 1e-7), g, 1e-5)
                assert abs(hi - lo) < 5e-3, f"edge={edge}"

    def test_nondecreasing_on_grid(self):
        gen = np.random.default_rng(12)
        for _ in range(20):
            d_nm = float(gen.choice([300.0, 600.0]))
            g = ClusterPairGeometry(float(gen.uniform(5.0, 0.98 * d_nm)),
                                    float(gen.uniform(0.0, math.pi)), d_nm)
            grid = np.linspace(0.0, 2 * g.r_mn, 200)
            vals = np.array([cdf_l(float(l), g, 1e-5) for l in grid])
            assert np.all(np.diff(vals) > -5e-6), (g.r_mm, g.theta_1, d_nm)

    @pytest.mark.parametrize("d_nm", [300.0, 600.0])
    @pytest.mark.parametrize("lambda_c", [1e-5, 1e-4])
    @pytest.mark.parametrize("theta_1", [math.pi / 6, math.pi / 2,
                                         5 * math.pi / 6])
    def test_matches_oracle(self, d_nm, lambda_c, theta_1):
        gen = np.random.default_rng(int(d_nm + 1e6 * lambda_c + theta_1 * 100))
        g = ClusterPairGeometry(mean_rmm(lambda_c, d_nm), theta_1, d_nm)
        emp = sample_l_oracle(g, lambda_c, 100_000, gen)
        assert emp.ks_distance(grid_cdf(g, lambda_c)) < 0.02

    def test_no_case_error_is_reported(self, monkeypatch):
        # force an empty case list: the evaluator must say so rather
        # than return something
        from padnet import travel
        g = ClusterPairGeometry(120.0, 1.2, 300.0)
        monkeypatch.setattr(travel, "_case_table", lambda geom: [])
        with pytest.raises(TravelCdfError):
            cdf_l(10.0, g, 1e-5)


class TestTravelDistribution:
    def test_grid_invariants(self):
        g = ClusterPairGeometry(120.0, 1.8, 300.0)
        dist = travel_distribution(g, 1e-5, n_grid=128)
        assert dist.p_zero == pytest.approx(prob_l_zero(g, 1e-5))
        assert np.all(np.diff(dist.grid_cdf) >= 0.0)
        assert dist.grid_cdf[-1] == pytest.approx(1.0, abs=1e-3)
        assert dist.cdf(-1.0) == 0.0 and dist.cdf(1e9) == 1.0


class TestOracle:
    def test_determinism(self):
        g = ClusterPairGeometry(100.0, 1.0, 300.0)
        a = sample_l_oracle(g, 1e-5, 5000, np.random.default_rng(3))
        b = sample_l_oracle(g, 1e-5, 5000, np.random.default_rng(3))
        assert np.array_equal(a.samples, b.samples)

    def test_dense_pads_match_atom(self):
        g = ClusterPairGeometry(8.0, 1.0, 300.0)
        gen = np.random.default_rng(4)
        emp = sample_l_oracle(g, 1e-2, 50_000, gen)
        p_hat = float(np.mean(emp.samples == 0.0))
        p_ana = prob_l_zero(g, 1e-2)
        sigma = math.sqrt(max(p_ana * (1 - p_ana), 1e-12) / 50_000)
        assert abs(p_hat - p_ana) <= 3 * sigma + 1e-9

    def test_support_bound(self):
        g = ClusterPairGeometry(150.0, 2.0, 300.0)
        emp = sample_l_oracle(g, 1e-4, 20_000, np.random.default_rng(5))
        assert emp.samples.max() <= 2 * g.r_mn + 1e-9


class TestMeanL:
    def test_wider_pairs_travel_farther(self):
        assert mean_l(1e-5, 600.0, NUM) > mean_l(1e-5, 300.0, NUM)

    def test_support_bound(self):
        value = mean_l(1e-5, 300.0, NUM)
        assert 0.0 < value < 2 * (300.0 + mean_rmm(1e-5, 300.0))

    def test_dense_pads_against_oracle(self):
        # with dense pads each cluster keeps its own nearby pad, so the
        # mean travel distance approaches the pair separation; the
        # sampling oracle arbitrates the plug-in approximation
        gen = np.random.default_rng(6)
        lam = 1e-3
        g = ClusterPairGeometry(mean_rmm(lam, 300.0), math.pi / 2, 300.0)
        analytic = mean_l(lam, 300.0, NUM)
        # orientation-averaged oracle
        totals = []
        for theta in np.linspace(0.05, math.pi - 0.05, 16):
            gg = ClusterPairGeometry(mean_rmm(lam, 300.0), float(theta), 300.0)
            totals.append(sample_l_oracle(gg, lam, 6_250, gen).mean())
        assert abs(analytic - float(np.mean(totals))) < 1.0
        assert abs(analytic - 300.0) < 2.0


class TestUavDensityS2:
    def test_limits(self):
        assert uav_density_s2(1e-5, 1e-12, 300.0, NUM) == pytest.approx(
            1e-5, rel=1e-3)
        assert uav_density_s2(1e-5, 1e-1, 300.0, NUM) == pytest.approx(
            2e-5, rel=1e-3)

    def test_bounds_always(self):
        for lam_c in (1e-6, 1e-5, 1e-4, 1e-3):
            value = uav_density_s2(1e-5, lam_c, 300.0, NUM)
            assert 1e-5 <= value <= 2e-5

    def test_against_distinct_pad_fraction(self):
        # geometric oracle: draw the serving-pad geometry per pair, drop
        # a pad field on the far disk, thin by the pad-free disk, and
        # count pairs whose far cluster finds a closer pad of its own
        gen = np.random.default_rng(7)
        lam_c, d_nm = 1e-4, 300.0
        n = 200_000
        from padnet.geometry import sample_rmm
        r = sample_rmm(lam_c, d_nm, gen, n)
        theta = gen.uniform(0.0, math.pi, n)
        r_mn = np.sqrt(r ** 2 + d_nm ** 2 - 2 * d_nm * r * np.cos(theta))
        counts = gen.poisson(lam_c * math.pi * r_mn ** 2)
        ids = np.repeat(np.arange(n), counts)
        total = int(counts.sum())
        rad = np.repeat(r_mn, counts) * np.sqrt(gen.random(total))
        ang = gen.uniform(0.0, 2 * math.pi, total)
        # pad positions relative to the near center (at the origin, far
        # center on the x-axis)
        px = d_nm + rad * np.cos(ang)
        py = rad * np.sin(ang)
        outside = np.hypot(px, py) > np.repeat(r, counts)
        distinct = np.zeros(n, dtype=bool)
        np.logical_or.at(distinct, ids[outside], True)
        estimate = (1.0 + float(np.mean(distinct))) * 1e-5
        analytic = uav_density_s2(1e-5, lam_c, d_nm, NUM)
        assert abs(analytic - estimate) / analytic < 0.01
