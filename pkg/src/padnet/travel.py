"""Traveling-distance law between the two clusters' nearest charging pads.

Conditioned on the serving-pad geometry (r_mm, theta_1), the distance L
between the pads nearest to the two cluster centers has an atom at zero
(one pad serves both) and a continuous part supported on (0, 2*r_mn).
The continuous part decomposes over the far cluster's nearest-pad
distance r: given that distance, the pad is uniform on the arc of
radius r outside the pad-free disk of the near cluster, and L <= l on
the portion of that arc within l of the serving pad.

Two evaluators are provided:

* ``cdf_l`` walks a tabulated case split: a regime selector on
  (theta_1, theta_3) and, per regime, l-intervals whose value composes
  quadratures of the nine angular-fraction integrands f1..f9 with
  boundary terms.
* ``cdf_l_arcwise`` integrates the arc-overlap fraction directly via
  interval intersection; it is the reference the tabulated form (and
  the Monte Carlo oracle) are checked against.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .empirical import EmpiricalDistribution
from .geometry import (ClusterPairGeometry, mean_rmm, pdf_rmm, pdf_rnn_given,
                       theta_d)
from .params import NumericsConfig
from .quadrature import adaptive_quad, gl_nodes

_TWO_PI = 2.0 * math.pi


class TravelCdfError(RuntimeError):
    """No tabulated sub-case covers the requested distance."""


def distinct_pad_region_area(geom: ClusterPairGeometry) -> float:
    """Area of the region a pad must avoid for one pad to serve both
    clusters: the disk of radius r_mn about the far center minus its
    overlap with the pad-free disk about the near center."""
    g = geom
    return (g.r_mm ** 2 * (math.pi - g.theta_1)
            + g.r_mn ** 2 * (math.pi - g.theta_3)
            + g.r_mm * g.d_nm * math.sin(g.theta_1)
            - math.pi * g.r_mm ** 2)


def prob_l_zero(geom: ClusterPairGeometry, lambda_c: float) -> float:
    """Probability the same pad is nearest to both cluster centers."""
    if lambda_c <= 0:
        raise ValueError("need lambda_c > 0")
    return math.exp(-lambda_c * distinct_pad_region_area(geom))


def _theta_reach(r, l: float, geom: ClusterPairGeometry):
    """Half-angle, at the far center, of the arc of radius r within
    distance l of the serving pad.  Clamped: 0 when out of reach,
    pi when the whole circle is within reach."""
    r = np.asarray(r, dtype=float)
    with np.errstate(invalid="ignore", divide="ignore"):
        arg = (geom.r_mn ** 2 + r ** 2 - l ** 2) / (2.0 * r * geom.r_mn)
        arg = np.where(r > 0.0, arg, math.inf if geom.r_mn > l else -math.inf)
    return np.arccos(np.clip(arg, -1.0, 1.0))


def _edge_radii(l: float, geom: ClusterPairGeometry):
    """Distances from the far center to the two crossing points of the
    reach circle (radius l about the serving pad) with the pad-free
    circle; equal when the circles do not cross (l >= 2*r_mm)."""
    if geom.r_mm == 0.0:
        base = math.pi - geom.theta_3 - geom.theta_1
        d = math.hypot(l * math.cos(base) - geom.r_mn, l * math.sin(base))
        return d, d
    half = math.acos(min(1.0, max(-1.0, l / (2.0 * geom.r_mm))))
    base = math.pi - geom.theta_3 - geom.theta_1
    r2d = math.hypot(l * math.cos(base - half) - geom.r_mn,
                     l * math.sin(base - half))
    r2d2 = math.hypot(l * math.cos(base + half) - geom.r_mn,
                      l * math.sin(base + half))
    return r2d, r2d2


def _fraction(index: int, r, l: float, geom: ClusterPairGeometry):
    """Angular fraction of integrand f<index>; vectorized over r."""
    th = _theta_reach(r, l, geom)
    td = theta_d(r, geom)
    b = geom.theta_3
    if index == 1:
        return th / math.pi
    if index == 2:
        return (math.pi - th) / math.pi
    if index == 3:
        return th / (math.pi - td)
    if index == 4:
        return (math.pi - th) / (math.pi - td)
    if index == 5:
        return (th - td) / (math.pi - td)
    if index == 6:
        return (th + b - td) / (_TWO_PI - 2.0 * td)
    if index == 7:
        return (th - b - td) / (_TWO_PI - 2.0 * td)
    if index == 8:
        return (b + td - th) / (_TWO_PI - 2.0 * td)
    if index == 9:
        return (_TWO_PI - th - b - td) / (_TWO_PI - 2.0 * td)
    raise ValueError(f"unknown integrand index {index}")


def _integrate_fraction(index: int, a: float, b: float, l: float,
                        geom: ClusterPairGeometry, lambda_c: float,
                        rel_tol: float) -> float:
    a = max(0.0, a)
    b = min(geom.r_mn, b)
    if b <= a:
        return 0.0
    breaks = [x for x in (abs(geom.r_mn - l), geom.d_nm - geom.r_mm) if a < x < b]

    def integrand(r):
        return pdf_rnn_given(r, geom, lambda_c) * _fraction(index, r, l, geom)

    return adaptive_quad(integrand, a, b, rel_tol=rel_tol, abs_tol=1e-13,
                         breakpoints=breaks)


# Tabulated case split.  Each regime lists (lo, hi, terms) with half-open
# matching lo < l <= hi, first match wins; degenerate intervals are
# skipped.  Terms: "P0" adds the shared-pad atom, "EXP" adds
# exp(-lambda*pi*(r_mn-l)^2), "ONE" adds 1, "G" adds the wrap-around
# correction integral of f8, and (sign, index, lo_key, hi_key) adds a
# signed quadrature of f<index> between the named radii.
def _case_table(geom: ClusterPairGeometry):
    g = geom
    m = g.r_mn
    dr = g.d_nm - g.r_mm
    reach_onset = m - dr                      # reach circle first clears the seam
    s_half = 2.0 * g.r_mm * math.sin(0.5 * g.theta_1)
    s_full = 2.0 * g.r_mm * math.sin(g.theta_1)
    p_far = m + dr
    c2 = 2.0 * g.r_mm * math.cos(math.pi - g.theta_1 - g.theta_3)
    two_r = 2.0 * g.r_mm

    if g.theta_1 + g.theta_3 < 0.5 * math.pi:
        return [
            (0.0, reach_onset, ("P0", (+1, 3, "reach", "r2d"), (+1, 6, "r2d", "m"))),
            (reach_onset, s_half, ("P0", (+1, 3, "reach", "dr"),
                                   (+1, 3, "dr", "r2d"), (+1, 6, "r2d", "m"))),
            (s_half, min(s_full, m), ("EXP", (-1, 2, "reach", "dr"),
                                      (-1, 4, "dr", "r2d"), (-1, 9, "r2d", "m"))),
            (s_full, m, ("EXP", (-1, 2, "reach", "dr"), (-1, 4, "dr", "m"))),
            (m, min(p_far, s_full), ("ONE", (-1, 2, "reach", "dr"),
                                     (-1, 4, "dr", "r2d"), (-1, 9, "r2d", "m"))),
            (p_far, s_full, ("ONE", (-1, 4, "dr", "r2d"), (-1, 9, "r2d", "m"))),
            (max(m, s_full), p_far, ("ONE", (-1, 2, "reach", "dr"),
                                     (-1, 4, "dr", "m"))),
            (max(s_full, p_far), 2.0 * m, ("ONE", (-1, 4, "reach", "m"))),
        ]
    if math.cos(math.pi - g.theta_1 - g.theta_3) > math.sin(g.theta_1):
        return [
            (0.0, s_full, ("P0", (+1, 6, "r2d", "m"))),
            (s_full, c2, ("P0", (+1, 6, "r2d", "m"), (+1, 7, "r2d2", "m"))),
            (c2, min(reach_onset, two_r), ("P0", (+1, 6, "r2d", "m"),
                                           (+1, 7, "r2d2", "m"),
                                           (+1, 1, "reach", "dr"),
                                           (+1, 3, "dr", "r2d"))),
            # the reach disk swallows the pad-free disk's near point at
            # l = s_half, switching the seam-to-crossing integrand
            (reach_onset, min(s_half, two_r), ("P0", (+1, 6, "r2d", "m"),
                                               (+1, 7, "r2d2", "m"),
                                               (+1, 3, "reach", "r2d"))),
            (max(reach_onset, s_half), two_r, ("P0", (+1, 6, "r2d", "m"),
                                               (+1, 7, "r2d2", "m"),
                                               (+1, 5, "reach", "r2d"))),
            (two_r, m, ("EXP", (-1, 2, "reach", "dr"), (-1, 4, "dr", "m"))),
            (m, p_far, ("ONE", (-1, 2, "reach", "dr"), (-1, 4, "dr", "m"))),
            (max(two_r, p_far), 2.0 * m, ("ONE", (-1, 4, "reach", "m"))),
        ]
    return [
        (0.0, c2, ("P0", (+1, 6, "r2d", "m"))),
        (c2, s_half, ("P0", (+1, 1, "reach", "dr"), (+1, 3, "dr", "r2d"),
                      (+1, 6, "r2d", "m"), (+1, 7, "r2d2", "m"))),
        # bridge below the integrand switch when the mirror-point
        # distance s_full comes first
        (s_full, min(s_half, m), ("P0", (+1, 3, "reach", "r2d"),
                                  (+1, 6, "r2d", "m"), (+1, 7, "r2d2", "m"))),
        (s_half, min(s_full, m), ("P0", (+1, 1, "reach", "dr"),
                                  (+1, 5, "dr", "r2d"), (+1, 6, "r2d", "m"))),
        (m, min(s_full, p_far), ("ONE", (-1, 2, "reach", "dr"),
                                 (-1, 4, "dr", "r2d"), (-1, 9, "r2d", "m"))),
        (p_far, s_full, ("ONE", (-1, 4, "reach", "r2d"), (-1, 9, "r2d", "m"))),
        (max(s_half, s_full), m, ("EXP", (-1, 2, "reach", "dr"),
                                  (-1, 4, "dr", "m"), "G")),
        (max(m, s_full), p_far, ("ONE", (-1, 2, "reach", "dr"),
                                 (-1, 4, "dr", "m"), "G")),
        (max(p_far, s_full), 2.0 * m, ("ONE", (-1, 4, "reach", "m"), "G")),
    ]


def cdf_l(l: float, geom: ClusterPairGeometry, lambda_c: float, *,
          rel_tol: float = 3e-8) -> float:
    """Conditional CDF of the traveling distance via the tabulated cases."""
    if lambda_c <= 0:
        raise ValueError("need lambda_c > 0")
    if l < 0:
        return 0.0
    if l == 0.0:
        return prob_l_zero(geom, lambda_c)
    m = geom.r_mn
    if l >= 2.0 * m or m == 0.0:
        return 1.0

    r2d, r2d2 = _edge_radii(l, geom)
    # below r_mn - l the reach circle cannot touch radius r; above
    # l - r_mn it covers the whole circle, which the direct-form
    # integrands must include, so the floor is one-sided
    radii = {"reach": max(0.0, m - l), "dr": geom.d_nm - geom.r_mm,
             "r2d": r2d, "r2d2": r2d2, "m": m}

    for lo, hi, terms in _case_table(geom):
        if hi <= lo or not (lo < l <= hi):
            continue
        value = 0.0
        for term in terms:
            if term == "P0":
                value += prob_l_zero(geom, lambda_c)
            elif term == "EXP":
                value += math.exp(-lambda_c * math.pi * (m - l) ** 2)
            elif term == "ONE":
                value += 1.0
            elif term == "G":
                if geom.theta_1 > 0.5 * math.pi and l < 2.0 * geom.r_mm:
                    value += _integrate_fraction(8, r2d, r2d2, l, geom,
                                                 lambda_c, rel_tol)
            else:
                sign, index, lo_key, hi_key = term
                value += sign * _integrate_fraction(
                    index, radii[lo_key], radii[hi_key], l, geom, lambda_c, rel_tol)
        return value
    raise TravelCdfError(
        f"no sub-case covers l={l!r} for geometry {geom!r}")


def _arc_overlap_fraction(r, l: float, geom: ClusterPairGeometry):
    """Fraction of the admissible arc at radius r lying within l of the
    serving pad, by exact circular-interval intersection; vectorized."""
    th = _theta_reach(r, l, geom)
    td = theta_d(r, geom)
    b = geom.theta_3
    # reach arc spans [b - th, b + th]; wraps past +pi when b + th > pi.
    main_lo = b - th
    main_hi = np.minimum(b + th, math.pi)
    ov_main = np.maximum(0.0, np.minimum(main_hi, td) - np.maximum(main_lo, -td))
    wrap_hi = b + th - _TWO_PI          # wrapped portion is [-pi, wrap_hi]
    ov_wrap = np.where(b + th > math.pi,
                       np.maximum(0.0, np.minimum(wrap_hi, td) - (-td)),
                       0.0)
    kept = 2.0 * th - ov_main - ov_wrap
    return kept / (_TWO_PI - 2.0 * td)


def cdf_l_arcwise(l: float, geom: ClusterPairGeometry, lambda_c: float, *,
                  rel_tol: float = 2e-8) -> float:
    """Conditional CDF of the traveling distance by direct integration of
    the arc-overlap fraction against the nearest-pad density."""
    if lambda_c <= 0:
        raise ValueError("need lambda_c > 0")
    if l < 0:
        return 0.0
    if l == 0.0:
        return prob_l_zero(geom, lambda_c)
    m = geom.r_mn
    if l >= 2.0 * m or m == 0.0:
        return 1.0
    r2d, r2d2 = _edge_radii(l, geom)
    candidates = [abs(m - l), geom.d_nm - geom.r_mm, r2d, r2d2]
    # radii where the reach arc starts wrapping past the far side of the
    # circle: theta(r) + theta_3 = pi, i.e. r^2 + 2 r m cos(b) + m^2 = l^2
    b = geom.theta_3
    disc = l ** 2 - (m * math.sin(b)) ** 2
    if disc > 0.0:
        root = math.sqrt(disc)
        candidates.extend((-m * math.cos(b) + root, -m * math.cos(b) - root))
    breaks = [x for x in candidates if 0.0 < x < m]

    def integrand(r):
        return pdf_rnn_given(r, geom, lambda_c) * _arc_overlap_fraction(r, l, geom)

    mass = adaptive_quad(integrand, 0.0, m, rel_tol=rel_tol, abs_tol=1e-13,
                         breakpoints=breaks)
    return prob_l_zero(geom, lambda_c) + mass


@dataclass(frozen=True, eq=False)
class TravelDistribution:
    """Tabulated conditional law of the traveling distance."""

    geom: ClusterPairGeometry
    lambda_c: float
    p_zero: float
    grid_l: np.ndarray
    grid_cdf: np.ndarray

    def cdf(self, l):
        l = np.asarray(l, dtype=float)
        out = np.interp(l, self.grid_l, self.grid_cdf, left=0.0, right=1.0)
        return out if out.ndim else float(out)

    def mean(self) -> float:
        return float(np.trapezoid(1.0 - self.grid_cdf, self.grid_l))


def travel_distribution(geom: ClusterPairGeometry, lambda_c: float,
                        n_grid: int = 512) -> TravelDistribution:
    """Evaluate the tabulated CDF on a grid refined near zero, where the
    atom sits and the curve is steepest."""
    top = 2.0 * geom.r_mn
    grid = np.concatenate(([0.0], np.geomspace(top * 1e-4, top, n_grid - 1)))
    values = np.array([cdf_l(l, geom, lambda_c) for l in grid])
    if np.any(np.diff(values) < -5e-4):
        raise TravelCdfError("tabulated CDF is not monotone on the grid")
    values = np.maximum.accumulate(np.clip(values, 0.0, 1.0))
    if abs(values[-1] - 1.0) > 1e-3:
        raise TravelCdfError(
            f"tabulated CDF reaches {values[-1]!r} at the top of its support")
    return TravelDistribution(geom, lambda_c, values[0], grid, values)


def sample_l_oracle(geom: ClusterPairGeometry, lambda_c: float, n: int,
                    rng) -> EmpiricalDistribution:
    """Monte Carlo oracle for the conditional traveling distance.

    Each trial plants the serving pad at (r_mm, theta_1), draws the rest
    of the pad field outside the pad-free disk, and records the distance
    from the serving pad to the far cluster's nearest pad (zero when the
    serving pad itself is nearest).  Only pads within r_mn of the far
    center can win, so the field is drawn on that disk and thinned.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    m = geom.r_mn
    c_m = np.array([geom.r_mm * math.cos(geom.theta_1),
                    geom.r_mm * math.sin(geom.theta_1)])
    x_n = np.array([geom.d_nm, 0.0])
    out = np.zeros(n)
    if m == 0.0:
        return EmpiricalDistribution(out)
    chunk = max(1, int(2e6 / max(lambda_c * math.pi * m * m, 1.0)))
    done = 0
    while done < n:
        c = min(chunk, n - done)
        counts = rng.poisson(lambda_c * math.pi * m * m, c)
        total = int(counts.sum())
        radii = m * np.sqrt(rng.random(total))
        angles = rng.uniform(0.0, _TWO_PI, total)
        pts = x_n + np.column_stack((radii * np.cos(angles),
                                     radii * np.sin(angles)))
        ids = np.repeat(np.arange(c), counts)
        keep = np.hypot(pts[:, 0], pts[:, 1]) > geom.r_mm      # outside pad-free disk
        pts, ids, radii = pts[keep], ids[keep], radii[keep]
        if len(ids):
            order = np.lexsort((radii, ids))
            ids_s = ids[order]
            first = np.ones(len(ids_s), dtype=bool)
            first[1:] = ids_s[1:] != ids_s[:-1]
            winners = order[first]
            l_vals = np.hypot(pts[winners, 0] - c_m[0], pts[winners, 1] - c_m[1])
            out[done + ids_s[first]] = l_vals
        done += c
    return EmpiricalDistribution(out)


def mean_l(lambda_c: float, d_nm: float, numerics: NumericsConfig) -> float:
    """Mean traveling distance with the serving-pad distance fixed at its
    expectation and the pair orientation averaged over [0, pi]."""
    r_star = mean_rmm(lambda_c, d_nm)
    nodes, weights = gl_nodes(16)
    theta = 0.5 * math.pi * (nodes + 1.0)
    w = 0.5 * math.pi * weights / math.pi        # uniform angle density 1/pi

    def conditional_mean(theta_1: float) -> float:
        geom = ClusterPairGeometry(r_star, theta_1, d_nm)
        top = 2.0 * geom.r_mn
        breaks = sorted({b for lo, hi, _ in _case_table(geom)
                         for b in (lo, hi) if 0.0 < b < top})

        def integrand(l_axis):
            return np.array([1.0 - cdf_l(float(l), geom, lambda_c,
                                         rel_tol=1e-6) for l in l_axis])

        return adaptive_quad(integrand, 0.0, top,
                             rel_tol=max(numerics.quad_rel_tol, 1e-5),
                             abs_tol=1e-6, breakpoints=breaks,
                             n0=8, max_doublings=4)

    return float(sum(wi * conditional_mean(t) for t, wi in zip(theta, w)))


def uav_density_s2(lambda_user: float, lambda_c: float, d_nm: float,
                   numerics: NumericsConfig) -> float:
    """Density of deployed UAVs when each cluster gets its own pad UAV:
    (2 - E[P(shared pad)]) * lambda_user, the expectation running over
    the serving-pad distance and the pair orientation."""
    if lambda_user < 0:
        raise ValueError("need lambda_user >= 0")

    def p_zero_grid(r, theta):
        r_mn = np.sqrt(r ** 2 + d_nm ** 2 - 2.0 * d_nm * r * np.cos(theta))
        with np.errstate(invalid="ignore", divide="ignore"):
            arg = (d_nm ** 2 + r_mn ** 2 - r ** 2) / (2.0 * d_nm * r_mn)
        theta_3 = np.arccos(np.clip(arg, -1.0, 1.0))
        area = (r ** 2 * (math.pi - theta)
                + r_mn ** 2 * (math.pi - theta_3)
                + r * d_nm * np.sin(theta)
                - math.pi * r ** 2)
        return np.exp(-lambda_c * area)

    def outer(r_axis):
        nodes, weights = gl_nodes(64)
        theta = 0.5 * math.pi * (nodes + 1.0)
        w = 0.5 * math.pi * weights / math.pi
        grid = p_zero_grid(r_axis[:, None], theta[None, :])
        return pdf_rmm(r_axis, lambda_c, d_nm) * (grid * w[None, :]).sum(axis=1)

    expected = adaptive_quad(outer, 0.0, d_nm,
                             rel_tol=max(numerics.quad_rel_tol, 1e-8),
                             abs_tol=1e-12)
    return (2.0 - expected) * lambda_user
