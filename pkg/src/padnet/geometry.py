"""Point-process sampling and the conditional distance laws of the pad geometry.

Planar points are plain numpy arrays of shape (n, 2); sampling routines
take an explicit numpy Generator so callers control determinism (one
generator per thread).  Distances follow the cluster-pair construction:
the first cluster center sits at the origin, the second at distance
``d_nm``, and the serving pad is conditioned at polar position
(r_mm, theta_1) relative to the first center.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.integrate import cumulative_simpson

from .quadrature import adaptive_quad


def _clip_cos(x):
    return np.clip(x, -1.0, 1.0)


@dataclass(frozen=True)
class ClusterPairGeometry:
    """Conditional geometry every pad-distance law is conditioned on.

    r_mn and theta_3 are derived: r_mn by the law of cosines from
    (r_mm, theta_1, d_nm), theta_3 as the angle at the second cluster
    center between the serving pad and the first center.
    """

    r_mm: float
    theta_1: float
    d_nm: float
    r_mn: float = field(init=False)
    theta_3: float = field(init=False)

    def __post_init__(self):
        if not (math.isfinite(self.r_mm) and math.isfinite(self.theta_1)
                and math.isfinite(self.d_nm)):
            raise ValueError("geometry values must be finite")
        if not 0.0 <= self.r_mm <= self.d_nm:
            raise ValueError(f"r_mm must lie in [0, d_nm], got {self.r_mm!r}")
        if not 0.0 <= self.theta_1 <= math.pi:
            raise ValueError(f"theta_1 must lie in [0, pi], got {self.theta_1!r}")
        r_mn = math.sqrt(self.r_mm ** 2 + self.d_nm ** 2
                         - 2.0 * self.d_nm * self.r_mm * math.cos(self.theta_1))
        object.__setattr__(self, "r_mn", r_mn)
        if r_mn == 0.0:
            theta_3 = 0.0
        else:
            arg = (self.d_nm ** 2 + r_mn ** 2 - self.r_mm ** 2) / (2.0 * self.d_nm * r_mn)
            theta_3 = math.acos(min(1.0, max(-1.0, arg)))
        object.__setattr__(self, "theta_3", theta_3)


def sample_ppp(density: float, window_radius: float, rng) -> np.ndarray:
    """Homogeneous PPP in the disk of radius ``window_radius`` about the origin."""
    if density < 0 or window_radius <= 0:
        raise ValueError("need density >= 0 and window_radius > 0")
    n = rng.poisson(density * math.pi * window_radius ** 2)
    radii = window_radius * np.sqrt(rng.random(n))
    angles = rng.uniform(0.0, 2.0 * math.pi, n)
    return np.column_stack((radii * np.cos(angles), radii * np.sin(angles)))


def sample_bipolar_pairs(lambda_user: float, d_nm: float,
                         window_radius: float, rng) -> np.ndarray:
    """Poisson bipolar pairs: parents form a PPP, partners sit at distance d_nm.

    Returns an (n, 2, 2) array; [:, 0] are the parents, [:, 1] the
    partners, with orientations uniform on [0, 2*pi).
    """
    parents = sample_ppp(lambda_user, window_radius, rng)
    angles = rng.uniform(0.0, 2.0 * math.pi, len(parents))
    offsets = d_nm * np.column_stack((np.cos(angles), np.sin(angles)))
    return np.stack((parents, parents + offsets), axis=1)


def sample_mcp_user(center, r_c: float, rng, size: int | None = None) -> np.ndarray:
    """Uniform point(s) in the disk of radius r_c around ``center``."""
    if r_c <= 0:
        raise ValueError("need r_c > 0")
    n = 1 if size is None else size
    radii = r_c * np.sqrt(rng.random(n))
    angles = rng.uniform(0.0, 2.0 * math.pi, n)
    pts = np.asarray(center, dtype=float) + np.column_stack(
        (radii * np.cos(angles), radii * np.sin(angles)))
    return pts[0] if size is None else pts


def pdf_rmm(r, lambda_c: float, d_nm: float):
    """Density of the nearest-pad distance, truncated at d_nm.

    2*pi*lambda_c*r*exp(-pi*lambda_c*r^2) / (1 - exp(-pi*lambda_c*d_nm^2))
    on [0, d_nm], zero elsewhere.
    """
    if lambda_c <= 0 or d_nm <= 0:
        raise ValueError("need lambda_c > 0 and d_nm > 0")
    r = np.asarray(r, dtype=float)
    norm = 1.0 - math.exp(-math.pi * lambda_c * d_nm ** 2)
    out = 2.0 * math.pi * lambda_c * r * np.exp(-math.pi * lambda_c * r ** 2) / norm
    return np.where((r >= 0.0) & (r <= d_nm), out, 0.0)


def sample_rmm(lambda_c: float, d_nm: float, rng, size: int | None = None):
    """Draw from the truncated nearest-pad law by inverse CDF."""
    u = rng.random(1 if size is None else size)
    norm = 1.0 - math.exp(-math.pi * lambda_c * d_nm ** 2)
    r = np.sqrt(-np.log1p(-u * norm) / (math.pi * lambda_c))
    return float(r[0]) if size is None else r


def mean_rmm(lambda_c: float, d_nm: float, rel_tol: float = 1e-10) -> float:
    """E[R_mm] under the truncated law, by adaptive quadrature."""
    return adaptive_quad(lambda r: r * pdf_rmm(r, lambda_c, d_nm),
                         0.0, d_nm, rel_tol=rel_tol)


# The second branch of the nearest-pad law for the far cluster needs
# the running integral of 2*theta_d(z)*z; it depends only on (d_nm, r_mm),
# so it is tabulated once per geometry on a sqrt-stretched grid (the
# integrand has a sqrt-type edge at z = d_nm - r_mm) and interpolated.
_EXCLUSION_GRID = 4097


@lru_cache(maxsize=256)
def _exclusion_area_table(d_nm: float, r_mm: float):
    lo = d_nm - r_mm
    hi = d_nm + r_mm
    u = np.linspace(0.0, math.sqrt(hi - lo), _EXCLUSION_GRID)
    z = lo + u ** 2
    with np.errstate(invalid="ignore", divide="ignore"):
        arg = (d_nm ** 2 + z ** 2 - r_mm ** 2) / (2.0 * d_nm * z)
    theta_d = np.arccos(_clip_cos(arg))
    integrand = 2.0 * theta_d * z * 2.0 * u   # dz = 2 u du
    table = cumulative_simpson(integrand, x=u, initial=0.0)
    return u, table


def _exclusion_area(r, d_nm: float, r_mm: float):
    """Integral of 2*theta_d(z)*z from d_nm - r_mm up to r (vectorized)."""
    if r_mm == 0.0:
        return np.zeros_like(np.asarray(r, dtype=float))
    u_grid, table = _exclusion_area_table(d_nm, r_mm)
    r = np.asarray(r, dtype=float)
    u = np.sqrt(np.clip(r - (d_nm - r_mm), 0.0, None))
    return np.interp(u, u_grid, table)


def theta_d(r, geom: ClusterPairGeometry):
    """Half-angle of the arc at radius r (about the far cluster center)
    falling inside the pad-free disk around the near cluster center."""
    r = np.asarray(r, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        arg = (geom.d_nm ** 2 + r ** 2 - geom.r_mm ** 2) / (2.0 * geom.d_nm * r)
    out = np.arccos(_clip_cos(arg))
    return np.where(r > 0.0, out, 0.0)


def pdf_rnn_given(r, geom: ClusterPairGeometry, lambda_c: float):
    """Conditional density of the far cluster's nearest-pad distance.

    Rayleigh-type below d_nm - r_mm; beyond that the circle of radius r
    loses the arc inside the pad-free disk, thinning the density by
    (pi - theta_d) / pi and shrinking the void area accordingly.
    Support is (0, r_mn); the serving pad itself caps the distance.
    """
    if lambda_c <= 0:
        raise ValueError("need lambda_c > 0")
    r = np.asarray(r, dtype=float)
    # below the seam d_nm - r_mm both theta_d and the area correction
    # vanish, so one expression covers both branches
    void = math.pi * r ** 2 - _exclusion_area(r, geom.d_nm, geom.r_mm)
    dens = 2.0 * lambda_c * r * (math.pi - theta_d(r, geom)) * np.exp(-lambda_c * void)
    return np.where((r > 0.0) & (r < geom.r_mn), dens, 0.0)


def pdf_user_distance_given(r, center_offset: float, r_c: float):
    """Density of the horizontal distance from a point at ``center_offset``
    from a cluster's center to a user uniform in that cluster's disk.

    Triangle form 2r/r_c^2 where the circle of radius r lies fully inside
    the disk, arc-fraction form where it only partially overlaps.  The
    measure-zero boundary offset == r_c uses the outside form.
    """
    if r_c <= 0 or center_offset < 0:
        raise ValueError("need r_c > 0 and center_offset >= 0")
    r = np.asarray(r, dtype=float)
    if center_offset == 0.0:
        return np.where((r > 0.0) & (r < r_c), 2.0 * r / r_c ** 2, 0.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        arg = (r ** 2 - r_c ** 2 + center_offset ** 2) / (2.0 * center_offset * r)
        arc = (2.0 * r / (math.pi * r_c ** 2)) * np.arccos(_clip_cos(arg))
    lo = abs(center_offset - r_c)
    hi = center_offset + r_c
    out = np.zeros_like(r)
    if center_offset < r_c:
        inner = (r > 0.0) & (r <= lo)
        out = np.where(inner, 2.0 * r / r_c ** 2, out)
    band = (r > lo) & (r < hi)
    out = np.where(band, arc, out)
    return out
