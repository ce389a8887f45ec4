"""End-to-end simulation oracle for the pad-powered UAV network.

Drops the full random network around a reference user, applies the
mean-power association rule and the SINR test, and estimates every
quantity the closed-form side computes.  Fields are generated in a disk
window centered on the reference user (the point processes are
stationary, so this loses nothing).

Determinism: work is split into fixed-size partitions regardless of the
worker count; each partition owns a child generator spawned from the
caller's, and the merge is a sum of integer tallies, so results are
bit-exact for a given seed no matter how many workers run.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .empirical import EmpiricalDistribution
from .geometry import ClusterPairGeometry, mean_rmm, sample_rmm
from .params import NumericsConfig, SystemParams, validate, validate_numerics
from .travel import sample_l_oracle
from . import travel as _travel

_PARTITION_DROPS = 4096     # fixed partition size keeps merges seed-stable
_CHUNK_TARGET = 4_000_000   # max interferer rows materialized at once

DROP_LOG_COLUMNS = ("drop_id", "served_by", "sinr_db", "covered", "user_cluster")


@dataclass(frozen=True)
class DropResult:
    """One simulated drop, as written to the optional drop log."""

    served_by: str      # "uav_los" | "uav_nlos" | "tbs"
    sinr: float         # linear
    covered: bool
    user_cluster: str   # "own" | "cross"


@dataclass(frozen=True)
class CoverageEstimate:
    """Simulated coverage with a Wilson 95% interval and per-term joints."""

    scenario: str
    interferer_mode: str
    n_drops: int
    p_total: float
    ci_low: float
    ci_high: float
    p_uav_los: float
    p_uav_nlos: float
    p_tbs: float
    served_uav_los: float
    served_uav_nlos: float
    served_tbs: float

    @property
    def p_uav(self) -> float:
        return self.p_uav_los + self.p_uav_nlos

    @property
    def ci_half_width(self) -> float:
        return 0.5 * (self.ci_high - self.ci_low)


def wilson_interval(successes: int, trials: int, z: float = 1.959963984540054):
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise ValueError("need trials >= 1")
    phat = successes / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2.0 * trials)) / denom
    half = (z / denom) * math.sqrt(phat * (1.0 - phat) / trials
                                   + z * z / (4.0 * trials * trials))
    return max(0.0, center - half), min(1.0, center + half)


def _worker_count(requested, n_partitions: int) -> int:
    if requested is None:
        env = os.environ.get("PADNET_THREADS", "")
        requested = int(env) if env.strip() else 1
    return max(1, min(int(requested), n_partitions))


def _segment_min_rows(values, ids, n_segments):
    """Index of the row with the smallest value per id segment; -1 where
    a segment is empty.  ``ids`` must be nondecreasing within rows."""
    order = np.lexsort((values, ids))
    ids_sorted = ids[order]
    first = np.ones(ids_sorted.size, dtype=bool)
    first[1:] = ids_sorted[1:] != ids_sorted[:-1]
    out = np.full(n_segments, -1, dtype=np.int64)
    out[ids_sorted[first]] = order[first]
    return out


def _los_states(z, params, rng):
    return rng.random(z.size) < (1.0 / (1.0 + params.a_env * np.exp(
        -params.b_env * (np.degrees(np.arctan2(params.h, z)) - params.a_env))))


def _fading(los_mask, params, rng):
    """Per-link power gains: Gamma(m, 1/m) by channel state."""
    out = np.empty(los_mask.size)
    n_los = int(los_mask.sum())
    if n_los:
        out[los_mask] = (rng.gamma(params.m_l, 1.0 / params.m_l, n_los)
                         if params.m_l > 1 else rng.exponential(1.0, n_los))
    n_nlos = los_mask.size - n_los
    if n_nlos:
        out[~los_mask] = (rng.gamma(params.m_n, 1.0 / params.m_n, n_nlos)
                          if params.m_n > 1 else rng.exponential(1.0, n_nlos))
    return out


def _uav_interference_matched(n, lambda_u, params, window, rng):
    """Aggregate power from a homogeneous UAV interferer field at
    altitude h, per drop (length-n array)."""
    counts = rng.poisson(lambda_u * math.pi * window * window, n)
    total = int(counts.sum())
    x = window * np.sqrt(rng.random(total))
    los = _los_states(x, params, rng)
    gain = _fading(los, params, rng)
    d2 = x * x + params.h * params.h
    power = np.where(
        los,
        params.eta_l * params.rho_u * gain * d2 ** (-params.alpha_l / 2.0),
        params.eta_n * params.rho_u * gain * d2 ** (-params.alpha_n / 2.0))
    ids = np.repeat(np.arange(n), counts)
    return np.bincount(ids, weights=power, minlength=n)


def _uav_positions_pair_consistent(scenario, n, params, window, rng):
    """Horizontal interferer-UAV distances per drop under the physical
    deployment rule: pads form their own field, each interfering pair
    parks UAVs at the pads nearest to its busy cluster (one UAV per
    pair) or to both clusters (deduplicated when shared).

    Returns (distances, ids) flat arrays.
    """
    from scipy.spatial import cKDTree

    dists = []
    ids = []
    pad_mean = params.lambda_c * math.pi * window * window
    pair_mean = params.lambda_user * math.pi * window * window
    for i in range(n):
        n_pads = rng.poisson(pad_mean)
        if n_pads == 0:
            continue
        pr = window * np.sqrt(rng.random(n_pads))
        pa = rng.uniform(0.0, 2.0 * math.pi, n_pads)
        pads = np.column_stack((pr * np.cos(pa), pr * np.sin(pa)))
        n_pairs = rng.poisson(pair_mean)
        if n_pairs == 0:
            continue
        cr = window * np.sqrt(rng.random(n_pairs))
        ca = rng.uniform(0.0, 2.0 * math.pi, n_pairs)
        first = np.column_stack((cr * np.cos(ca), cr * np.sin(ca)))
        ori = rng.uniform(0.0, 2.0 * math.pi, n_pairs)
        second = first + params.d_nm * np.column_stack((np.cos(ori), np.sin(ori)))
        tree = cKDTree(pads)
        if scenario == "s1":
            busy_first = rng.random(n_pairs) < params.alpha_time
            centers = np.where(busy_first[:, None], first, second)
            _, idx = tree.query(centers)
            uavs = pads[idx]
        else:
            _, idx1 = tree.query(first)
            _, idx2 = tree.query(second)
            same = idx1 == idx2
            uavs = np.vstack((pads[idx1], pads[idx2[~same]]))
        d = np.hypot(uavs[:, 0], uavs[:, 1])
        dists.append(d)
        ids.append(np.full(d.size, i, dtype=np.int64))
    if not dists:
        return np.empty(0), np.empty(0, dtype=np.int64)
    return np.concatenate(dists), np.concatenate(ids)


def _coverage_partition(scenario, params, numerics, n, interferer_mode,
                        lambda_u_matched, pad_geometry, rng, log_rows=None):
    """Tally one partition of drops; returns integer counts."""
    p = params
    window = numerics.mc_window_radius
    tallies = np.zeros(6, dtype=np.int64)   # (los,nlos,tbs) x (served,covered)
    q_mh = p.lambda_mh / (p.lambda_mh + p.lambda_nl)
    q_nh = p.lambda_nh / (p.lambda_ml + p.lambda_nh)
    p_own = p.alpha_time * q_mh + (1.0 - p.alpha_time) * q_nh
    r_fixed = mean_rmm(p.lambda_c, p.d_nm) if pad_geometry == "mean" else None

    chunk = max(256, int(_CHUNK_TARGET
                         / max(p.lambda_user * 2 * math.pi * window ** 2, 1.0)))
    done = 0
    while done < n:
        c = min(chunk, n - done)
        if r_fixed is None:
            r_mm = sample_rmm(p.lambda_c, p.d_nm, rng, c)
        else:
            r_mm = np.full(c, r_fixed)
        if scenario == "s1":
            own = rng.random(c) < p_own
            theta_1 = rng.uniform(0.0, math.pi, c)
            offset = np.where(own, r_mm, np.sqrt(
                r_mm ** 2 + p.d_nm ** 2
                - 2.0 * p.d_nm * r_mm * np.cos(theta_1)))
        else:
            own = np.ones(c, dtype=bool)
            offset = r_mm

        # user uniform in its cluster disk; z = horizontal distance to UAV
        u_rad = p.r_c * np.sqrt(rng.random(c))
        u_ang = rng.uniform(0.0, 2.0 * math.pi, c)
        z = np.hypot(offset + u_rad * np.cos(u_ang), u_rad * np.sin(u_ang))
        d_uav = np.hypot(z, p.h)
        los = _los_states(z, p, rng)
        eta = np.where(los, p.eta_l, p.eta_n)
        alpha = np.where(los, p.alpha_l, p.alpha_n)
        mean_uav = eta * p.rho_u * d_uav ** (-alpha)

        # terrestrial field: nearest serves or interferes, rest interfere
        t_counts = rng.poisson(p.lambda_t * math.pi * window * window, c)
        t_total = int(t_counts.sum())
        t_r = window * np.sqrt(rng.random(t_total))
        t_ids = np.repeat(np.arange(c), t_counts)
        t_gain = rng.exponential(1.0, t_total)
        t_power = p.rho_t * t_gain * t_r ** (-p.alpha_t)
        nearest = _segment_min_rows(t_r, t_ids, c)
        has_tbs = nearest >= 0
        safe = np.where(has_tbs, nearest, 0)
        r_t = np.where(has_tbs, t_r[safe], np.inf)
        mean_tbs = np.where(has_tbs, p.rho_t * r_t ** (-p.alpha_t), 0.0)
        uav_serves = mean_uav > mean_tbs

        i_tbs_all = np.bincount(t_ids, weights=t_power, minlength=c)
        serving_tbs_power = np.where(has_tbs, t_power[safe], 0.0)

        if interferer_mode == "analysis_matched":
            i_uav = _uav_interference_matched(c, lambda_u_matched, p, window, rng)
        else:
            ux, uids = _uav_positions_pair_consistent(scenario, c, p, window, rng)
            ulos = _los_states(ux, p, rng)
            ugain = _fading(ulos, p, rng)
            ud2 = ux * ux + p.h * p.h
            upow = np.where(
                ulos,
                p.eta_l * p.rho_u * ugain * ud2 ** (-p.alpha_l / 2.0),
                p.eta_n * p.rho_u * ugain * ud2 ** (-p.alpha_n / 2.0))
            i_uav = np.bincount(uids, weights=upow, minlength=c)
            if scenario == "s2":
                # the partner cluster's UAV interferes unless it shares
                # the serving pad
                partner = _partner_uav_distance(c, r_mm, p, rng)
                plos = _los_states(partner, p, rng)
                pgain = _fading(plos, p, rng)
                pd2 = partner ** 2 + p.h ** 2
                ppow = np.where(
                    plos,
                    p.eta_l * p.rho_u * pgain * pd2 ** (-p.alpha_l / 2.0),
                    p.eta_n * p.rho_u * pgain * pd2 ** (-p.alpha_n / 2.0))
                i_uav = i_uav + np.where(np.isfinite(partner), ppow, 0.0)

        serving_gain = _fading(los, p, rng)
        num_uav = eta * p.rho_u * serving_gain * d_uav ** (-alpha)
        num_tbs = serving_tbs_power
        interference = np.where(uav_serves, i_uav + i_tbs_all,
                                i_uav + i_tbs_all - serving_tbs_power)
        numerator = np.where(uav_serves, num_uav, num_tbs)
        sinr = numerator / (p.sigma2 + interference)
        covered = sinr >= p.gamma_thr

        cat_uav_los = uav_serves & los
        cat_uav_nlos = uav_serves & ~los
        cat_tbs = ~uav_serves
        tallies[0] += int(cat_uav_los.sum())
        tallies[1] += int(cat_uav_nlos.sum())
        tallies[2] += int(cat_tbs.sum())
        tallies[3] += int((cat_uav_los & covered).sum())
        tallies[4] += int((cat_uav_nlos & covered).sum())
        tallies[5] += int((cat_tbs & covered).sum())
        if log_rows is not None:
            served = np.where(cat_uav_los, "uav_los",
                              np.where(cat_uav_nlos, "uav_nlos", "tbs"))
            cluster = np.where(own, "own", "cross")
            with np.errstate(divide="ignore"):
                sinr_db = 10.0 * np.log10(sinr)
            for j in range(c):
                log_rows.append((served[j], float(sinr_db[j]),
                                 bool(covered[j]), cluster[j]))
        done += c
    return tallies


def _partner_uav_distance(c, r_mm, params, rng):
    """Horizontal distance from the reference user's own-cluster frame to
    the partner cluster's UAV; inf when one pad serves both clusters.

    Only used by the pair-consistent mode; the geometry is rebuilt from
    the conditional pad construction.
    """
    p = params
    out = np.full(c, np.inf)
    for i in range(int(c)):
        theta_1 = rng.uniform(0.0, math.pi)
        geom = ClusterPairGeometry(float(r_mm[i]), theta_1, p.d_nm)
        n_pads = rng.poisson(p.lambda_c * math.pi * geom.r_mn ** 2)
        if n_pads == 0:
            continue
        rad = geom.r_mn * np.sqrt(rng.random(n_pads))
        ang = rng.uniform(0.0, 2.0 * math.pi, n_pads)
        pts = np.column_stack((p.d_nm + rad * np.cos(ang), rad * np.sin(ang)))
        keep = np.hypot(pts[:, 0], pts[:, 1]) > geom.r_mm
        if not keep.any():
            continue
        pts = pts[keep]
        j = int(np.argmin(np.hypot(pts[:, 0] - p.d_nm, pts[:, 1])))
        c_m = np.array([geom.r_mm * math.cos(theta_1),
                        geom.r_mm * math.sin(theta_1)])
        out[i] = math.hypot(pts[j, 0] - c_m[0], pts[j, 1] - c_m[1])
    return out


def _run_partitions(task, n_total, rng, workers):
    """Split n_total units into fixed partitions, run ``task`` on each
    with a spawned child generator, and sum the integer tallies."""
    sizes = [_PARTITION_DROPS] * (n_total // _PARTITION_DROPS)
    if n_total % _PARTITION_DROPS:
        sizes.append(n_total % _PARTITION_DROPS)
    children = rng.spawn(len(sizes))
    n_workers = _worker_count(workers, len(sizes))
    if n_workers == 1:
        results = [task(size, child) for size, child in zip(sizes, children)]
    else:
        with ProcessPoolExecutor(max_workers=n_workers) as pool:
            results = list(pool.map(task, sizes, children))
    return np.sum(results, axis=0)


class _CoverageTask:
    """Picklable partition task for process pools."""

    def __init__(self, scenario, params, numerics, interferer_mode, lambda_u,
                 pad_geometry):
        self.scenario = scenario
        self.params = params
        self.numerics = numerics
        self.interferer_mode = interferer_mode
        self.lambda_u = lambda_u
        self.pad_geometry = pad_geometry

    def __call__(self, n, rng):
        return _coverage_partition(self.scenario, self.params, self.numerics,
                                   n, self.interferer_mode, self.lambda_u,
                                   self.pad_geometry, rng)


def simulate_coverage(scenario: str, params: SystemParams,
                      numerics: NumericsConfig, n_drops: int, rng,
                      interferer_mode: str = "analysis_matched",
                      pad_geometry: str = "mean",
                      workers=None, log_path=None) -> CoverageEstimate:
    """Estimate coverage by dropping the full network ``n_drops`` times.

    ``interferer_mode`` selects the interfering-UAV field: the
    homogeneous PPP the closed form assumes ("analysis_matched") or the
    physically deployed pad-parked UAVs ("pair_consistent").

    ``pad_geometry`` conditions the serving-pad distance: "mean" pins it
    at the truncated-law mean, matching the closed form's standing
    approximation; "random" draws it per drop (the physical system),
    which also exposes the quality of that approximation.
    """
    if scenario not in ("s1", "s2"):
        raise ValueError("scenario must be 's1' or 's2'")
    if interferer_mode not in ("analysis_matched", "pair_consistent"):
        raise ValueError(f"unknown interferer mode {interferer_mode!r}")
    if pad_geometry not in ("mean", "random"):
        raise ValueError(f"unknown pad geometry {pad_geometry!r}")
    if n_drops < 1:
        raise ValueError("need n_drops >= 1")
    params = validate(params)
    validate_numerics(numerics, params)
    lambda_u = (params.lambda_user if scenario == "s1" else
                _travel.uav_density_s2(params.lambda_user, params.lambda_c,
                                       params.d_nm, numerics))

    if log_path is not None:
        rows = []
        tallies = _coverage_partition(scenario, params, numerics, n_drops,
                                      interferer_mode, lambda_u, pad_geometry,
                                      rng, log_rows=rows)
        with open(log_path, "w", encoding="utf-8") as fh:
            fh.write(",".join(DROP_LOG_COLUMNS) + "\n")
            for i, (served, sinr_db, covered, cluster) in enumerate(rows):
                fh.write(f"{i},{served},{sinr_db:.6f},{int(covered)},{cluster}\n")
    else:
        task = _CoverageTask(scenario, params, numerics, interferer_mode,
                             lambda_u, pad_geometry)
        tallies = _run_partitions(task, n_drops, rng, workers)

    served = tallies[:3]
    covered = tallies[3:]
    total_covered = int(covered.sum())
    lo, hi = wilson_interval(total_covered, n_drops)
    return CoverageEstimate(
        scenario=scenario, interferer_mode=interferer_mode, n_drops=n_drops,
        p_total=total_covered / n_drops, ci_low=lo, ci_high=hi,
        p_uav_los=covered[0] / n_drops, p_uav_nlos=covered[1] / n_drops,
        p_tbs=covered[2] / n_drops,
        served_uav_los=served[0] / n_drops, served_uav_nlos=served[1] / n_drops,
        served_tbs=served[2] / n_drops)


class _FunctionalTask:
    def __init__(self, s, exclusion, lambda_u, params, numerics):
        self.s = np.atleast_1d(np.asarray(s, dtype=float))
        self.exclusion = exclusion
        self.lambda_u = lambda_u
        self.params = params
        self.numerics = numerics

    def __call__(self, n, rng):
        p = self.params
        window = self.numerics.mc_window_radius
        excl = self.exclusion
        sums = np.zeros(self.s.size)
        sq_sums = np.zeros(self.s.size)
        chunk = max(64, int(_CHUNK_TARGET / max(
            (self.lambda_u + p.lambda_t) * math.pi * window ** 2, 1.0)))
        done = 0
        while done < n:
            c = min(chunk, n - done)
            i_uav = _uav_interference_matched(c, self.lambda_u, p, window, rng)
            t_counts = rng.poisson(
                p.lambda_t * math.pi * (window ** 2 - excl ** 2), c)
            t_total = int(t_counts.sum())
            t_r = np.sqrt(excl ** 2 + (window ** 2 - excl ** 2)
                          * rng.random(t_total))
            t_pow = p.rho_t * rng.exponential(1.0, t_total) * t_r ** (-p.alpha_t)
            i_tbs = np.bincount(np.repeat(np.arange(c), t_counts),
                                weights=t_pow, minlength=c)
            i_total = i_uav + i_tbs
            vals = np.exp(-self.s[:, None] * i_total[None, :])
            sums += vals.sum(axis=1)
            sq_sums += (vals * vals).sum(axis=1)
            done += c
        return np.concatenate((sums, sq_sums))


def simulate_interference_functional(s, exclusion: float, lambda_u: float,
                                     params: SystemParams,
                                     numerics: NumericsConfig, n_fields: int,
                                     rng, workers=None):
    """Monte Carlo estimate of E[exp(-s I)] with the analysis-matched
    field construction: unexcluded UAV PPP plus a terrestrial PPP beyond
    ``exclusion``.  Vectorized over s; returns (estimates, std_errors).
    """
    if n_fields < 1:
        raise ValueError("need n_fields >= 1")
    params = validate(params)
    validate_numerics(numerics, params)
    if exclusion >= numerics.mc_window_radius:
        raise ValueError("exclusion radius exceeds the simulation window")
    task = _FunctionalTask(s, exclusion, lambda_u, params, numerics)
    merged = _run_partitions(task, n_fields, rng, workers)
    k = task.s.size
    mean = merged[:k] / n_fields
    var = np.maximum(merged[k:] / n_fields - mean ** 2, 0.0)
    se = np.sqrt(var / n_fields)
    if np.isscalar(s) or np.ndim(s) == 0:
        return float(mean[0]), float(se[0])
    return mean, se


@dataclass(frozen=True)
class SimulatedEnergyReport:
    """Energy metrics with every ingredient estimated by simulation."""

    scenario: str
    se: float
    p_tot: float
    ee: float
    lambda_u: float
    mean_travel: float
    coverage: CoverageEstimate
    master_seed_note: str


def simulate_energy(scenario: str, params: SystemParams,
                    numerics: NumericsConfig, n_drops: int, rng,
                    workers=None) -> SimulatedEnergyReport:
    """Simulation-side energy efficiency: coverage components from the
    drop engine, UAV density and mean traveling distance from the pad
    oracle, plugged into the power and throughput bookkeeping."""
    from .energy import spectral_efficiency, total_power_s1, total_power_s2

    params = validate(params)
    cov = simulate_coverage(scenario, params, numerics, n_drops, rng,
                            workers=workers)
    n_geo = max(2000, n_drops // 10)
    r_mm = sample_rmm(params.lambda_c, params.d_nm, rng, n_geo)
    samples = np.empty(n_geo)
    for i in range(n_geo):
        geom = ClusterPairGeometry(float(r_mm[i]),
                                   float(rng.uniform(0.0, math.pi)),
                                   params.d_nm)
        samples[i] = sample_l_oracle(geom, params.lambda_c, 1, rng).samples[0]
    mean_travel = float(samples.mean())
    p_zero_hat = float(np.mean(samples == 0.0))
    if scenario == "s1":
        lambda_u = params.lambda_user
        p_tot = total_power_s1(lambda_u, params.n_t, mean_travel, params.v,
                               params.p_m, params.p_s, params.lambda_t,
                               params.p_tbs)
    else:
        lambda_u = (2.0 - p_zero_hat) * params.lambda_user
        p_tot = total_power_s2(lambda_u, params.p_s, params.lambda_t,
                               params.p_tbs)
    se = spectral_efficiency(lambda_u, cov.p_uav, params.lambda_t, cov.p_tbs,
                             params)
    return SimulatedEnergyReport(
        scenario=scenario, se=se, p_tot=p_tot, ee=se / p_tot,
        lambda_u=lambda_u, mean_travel=mean_travel, coverage=cov,
        master_seed_note=f"seed={numerics.master_seed} "
                         f"partitions={_PARTITION_DROPS}")


def empirical_distribution_of_l(params: SystemParams, n: int, rng
                                ) -> EmpiricalDistribution:
    """Unconditioned traveling-distance samples (random serving-pad
    distance and orientation per trial)."""
    r_mm = sample_rmm(params.lambda_c, params.d_nm, rng, n)
    out = np.empty(n)
    for i in range(n):
        geom = ClusterPairGeometry(float(r_mm[i]),
                                   float(rng.uniform(0.0, math.pi)),
                                   params.d_nm)
        out[i] = sample_l_oracle(geom, params.lambda_c, 1, rng).samples[0]
    return EmpiricalDistribution(out)
