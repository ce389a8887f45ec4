"""Air-to-ground channel: LoS probability, mean powers, fading, association.

Distance conventions matter here and are stated on every signature:
``horizontal`` distances are ground-plane distances to the point under
the UAV, ``euclidean`` distances include the altitude.  TBS distances
are always ground-plane (TBSs and users share the ground).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .params import SystemParams


@dataclass(frozen=True)
class LinkGeometry:
    """One air-to-ground link; euclidean_dist is derived."""

    horizontal_dist: float
    altitude: float
    euclidean_dist: float = field(init=False)

    def __post_init__(self):
        if self.altitude <= 0:
            raise ValueError("altitude must be positive")
        if self.horizontal_dist < 0:
            raise ValueError("horizontal_dist must be nonnegative")
        object.__setattr__(self, "euclidean_dist",
                           math.hypot(self.horizontal_dist, self.altitude))


def prob_los(horizontal_dist, params: SystemParams):
    """LoS occurrence probability at the given horizontal distance(s).

    1 / (1 + a*exp(-b*((180/pi)*arctan(h/r) - a))); at r = 0 the
    elevation angle is 90 degrees.
    """
    r = np.asarray(horizontal_dist, dtype=float)
    with np.errstate(divide="ignore"):
        angle_deg = np.degrees(np.arctan2(params.h, r))
    p = 1.0 / (1.0 + params.a_env
               * np.exp(-params.b_env * (angle_deg - params.a_env)))
    return p if p.ndim else float(p)


def mean_power_uav(link: LinkGeometry, los: bool, params: SystemParams) -> float:
    """Fading-averaged received power from the cluster UAV, W."""
    eta, alpha = (params.eta_l, params.alpha_l) if los else (params.eta_n, params.alpha_n)
    return eta * params.rho_u * link.euclidean_dist ** (-alpha)


def sample_fading(m: int, rng, size: int | None = None):
    """Nakagami-m power gain: Gamma(shape m, scale 1/m), unit mean.

    m = 1 is the exponential gain of the terrestrial links.
    """
    if m < 1 or int(m) != m:
        raise ValueError("fading order m must be a positive integer")
    out = rng.gamma(float(m), 1.0 / float(m), size=1 if size is None else size)
    return float(out[0]) if size is None else out


def tbs_void_radius(r, los: bool, params: SystemParams):
    """Ground distance at which the nearest TBS's mean power ties the
    cluster UAV's at euclidean distance r (vectorized).

    A UAV-served user implies a TBS-free disk of this radius.
    """
    eta, alpha = (params.eta_l, params.alpha_l) if los else (params.eta_n, params.alpha_n)
    r = np.asarray(r, dtype=float)
    out = ((params.rho_t / params.rho_u) ** (1.0 / params.alpha_t)
           * eta ** (-1.0 / params.alpha_t)
           * r ** (alpha / params.alpha_t))
    return out if out.ndim else float(out)


def assoc_prob_uav(r, los: bool, params: SystemParams):
    """Probability the user associates with its cluster UAV at euclidean
    distance r with the given channel type: the TBS void probability."""
    d = tbs_void_radius(r, los, params)
    out = np.exp(-math.pi * params.lambda_t * np.asarray(d, dtype=float) ** 2)
    return out if out.ndim else float(out)


def tbs_threshold(r, los: bool, params: SystemParams):
    """Euclidean UAV distance at which the UAV's mean power ties a TBS at
    ground distance r, clamped below at the altitude (vectorized).

    The user associates with the TBS iff the UAV's horizontal distance
    exceeds sqrt(threshold^2 - h^2); callers evaluate that indicator.
    """
    eta, alpha = (params.eta_l, params.alpha_l) if los else (params.eta_n, params.alpha_n)
    r = np.asarray(r, dtype=float)
    out = np.maximum(((params.rho_u / params.rho_t) ** (1.0 / alpha)
                      * eta ** (1.0 / alpha)
                      * r ** (params.alpha_t / alpha)),
                     params.h)
    return out if out.ndim else float(out)
