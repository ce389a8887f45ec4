"""Power and efficiency: propulsion power, spectral efficiency, area
power consumption, and the energy efficiency of both deployments.

Travel enters only the power budget: the UAV's relocation trips consume
the travel-related power for the fraction of the day they occupy, and
service power for the rest.  Coverage is computed travel-free.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import minimize_scalar

from .analysis import CoverageBreakdown, coverage_scenario1, coverage_scenario2
from .params import NumericsConfig, RotorParams, SystemParams, validate, validate_rotor
from .travel import mean_l, uav_density_s2

SECONDS_PER_DAY = 24 * 3600


@dataclass(frozen=True)
class EnergyReport:
    """SE, total power and their ratio for one scenario at one point."""

    scenario: str
    se: float            # bit/s/m^2
    p_tot: float         # W/m^2
    ee: float            # bit/J
    lambda_u: float      # UAVs/m^2
    n_t: float           # switches/day
    mean_travel: float   # m (zero for the per-cluster deployment)
    v: float             # m/s

    CSV_COLUMNS = ("scenario", "se", "p_tot", "ee", "lambda_u", "n_t",
                   "mean_travel", "v")

    def to_csv_row(self) -> str:
        return ",".join(
            v if isinstance(v := getattr(self, c), str) else repr(v)
            for c in self.CSV_COLUMNS)


def propulsion_power(v: float, rotor: RotorParams) -> float:
    """Rotary-wing power at forward speed v: blade profile, induced and
    parasite terms.  Rejects v <= 0 (the induced term diverges; hover
    power is outside this formula's regime)."""
    if v <= 0:
        raise ValueError("propulsion power needs v > 0")
    rotor = validate_rotor(rotor)
    return (rotor.p_0 * (1.0 + 3.0 * v ** 2 / rotor.u_tip ** 2)
            + rotor.p_i * rotor.v_0 / v
            + 0.5 * rotor.d_0 * rotor.rho_air * rotor.s_rotor * rotor.a_1 * v ** 3)


def optimal_velocity(rotor: RotorParams, v_max: float = 200.0) -> float:
    """Speed minimizing the propulsion power, by bounded scalar search."""
    res = minimize_scalar(lambda v: propulsion_power(v, rotor),
                          bounds=(1e-3, v_max), method="bounded",
                          options={"xatol": 1e-8})
    return float(res.x)


def spectral_efficiency(lambda_u: float, p_cov_u: float, lambda_t: float,
                        p_cov_t: float, params: SystemParams) -> float:
    """Area spectral efficiency: bandwidth times the log factor times the
    density-weighted coverage of both station types."""
    for name, value in (("p_cov_u", p_cov_u), ("p_cov_t", p_cov_t)):
        if not 0.0 <= value <= 1.0:
            raise ValueError(f"{name} must be a probability, got {value!r}")
    return (params.b_w * math.log2(1.0 + params.gamma_thr)
            * (lambda_u * p_cov_u + lambda_t * p_cov_t))


def travel_fraction(n_t: float, mean_travel: float, v: float) -> float:
    """Fraction of the day spent relocating: n_t round trips of length
    mean_travel each way at speed v."""
    return n_t * 2.0 * mean_travel / (SECONDS_PER_DAY * v)


def total_power_s1(lambda_u1: float, n_t: float, mean_travel: float, v: float,
                   p_m: float, p_s: float, lambda_t: float,
                   p_tbs: float) -> float:
    """Area power of the per-pair deployment: UAVs split the day between
    travel and service power, TBSs run at constant power."""
    frac = travel_fraction(n_t, mean_travel, v)
    if not 0.0 <= frac <= 1.0:
        raise ValueError(
            f"infeasible schedule: travel fraction {frac:.3f} not in [0, 1] "
            f"(n_t={n_t}, mean travel={mean_travel} m, v={v} m/s)")
    return lambda_u1 * (frac * p_m + (1.0 - frac) * p_s) + lambda_t * p_tbs


def total_power_s2(lambda_u2: float, p_s: float, lambda_t: float,
                   p_tbs: float) -> float:
    """Area power of the per-cluster deployment: no relocation trips."""
    return lambda_u2 * p_s + lambda_t * p_tbs


def energy_efficiency(scenario: str, params: SystemParams,
                      numerics: NumericsConfig, mode: str = "exact",
                      coverage: CoverageBreakdown | None = None) -> EnergyReport:
    """Assembled energy efficiency for one scenario.

    A precomputed coverage breakdown for the same parameters may be
    passed to avoid recomputation in sweeps.
    """
    params = validate(params)
    if scenario == "s1":
        cov = coverage or coverage_scenario1(params, numerics, mode)
        lambda_u = params.lambda_user
        travel_mean = mean_l(params.lambda_c, params.d_nm, numerics)
        p_tot = total_power_s1(lambda_u, params.n_t, travel_mean, params.v,
                               params.p_m, params.p_s, params.lambda_t,
                               params.p_tbs)
    elif scenario == "s2":
        cov = coverage or coverage_scenario2(params, numerics, mode)
        lambda_u = uav_density_s2(params.lambda_user, params.lambda_c,
                                  params.d_nm, numerics)
        travel_mean = 0.0
        p_tot = total_power_s2(lambda_u, params.p_s, params.lambda_t,
                               params.p_tbs)
    else:
        raise ValueError("scenario must be 's1' or 's2'")
    if cov.scenario != scenario:
        raise ValueError(f"coverage breakdown is for {cov.scenario!r}, "
                         f"not {scenario!r}")
    se = spectral_efficiency(lambda_u, cov.p_uav, params.lambda_t, cov.p_tbs,
                             params)
    return EnergyReport(scenario=scenario, se=se, p_tot=p_tot, ee=se / p_tot,
                        lambda_u=lambda_u, n_t=params.n_t,
                        mean_travel=travel_mean, v=params.v)
