"""padnet: stochastic-geometry model of charging-pad-powered UAV networks.

A cellular layout of user-cluster pairs served by pad-perched UAVs and
terrestrial base stations: traveling-distance law between serving pads,
SINR coverage under two UAV deployment strategies, energy efficiency,
and a Monte Carlo oracle validating every closed form.
"""

__version__ = "0.1.0"

from .analysis import (CoverageBreakdown, coverage_scenario1,
                       coverage_scenario2, cov_tbs_term, cov_uav_term,
                       laplace_given_tbs_serving, laplace_uav_field,
                       mixing_weights)
from .channel import (LinkGeometry, assoc_prob_uav, mean_power_uav, prob_los,
                      sample_fading, tbs_threshold, tbs_void_radius)
from .empirical import EmpiricalDistribution
from .energy import (EnergyReport, energy_efficiency, optimal_velocity,
                     propulsion_power, spectral_efficiency, total_power_s1,
                     total_power_s2)
from .geometry import (ClusterPairGeometry, mean_rmm, pdf_rmm, pdf_rnn_given,
                       pdf_user_distance_given, sample_bipolar_pairs,
                       sample_mcp_user, sample_ppp, sample_rmm)
from .montecarlo import (CoverageEstimate, DropResult, SimulatedEnergyReport,
                         simulate_coverage, simulate_energy,
                         simulate_interference_functional, wilson_interval)
from .params import (ConfigError, NumericsConfig, ParamError, RotorParams,
                     SystemParams, load_config, save_config, validate,
                     validate_numerics, validate_rotor)
from .travel import (TravelDistribution, cdf_l, cdf_l_arcwise, mean_l,
                     prob_l_zero, sample_l_oracle, travel_distribution,
                     uav_density_s2)

__all__ = [name for name in dir() if not name.startswith("_")]
