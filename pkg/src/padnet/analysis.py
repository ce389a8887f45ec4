"""Closed-form performance: interference Laplace transforms and coverage.

The aggregate interference seen by the reference user is a product of
exponential functionals: a UAV field thinned into LoS/NLoS components
(Gamma fading moment generating functions under the elevation-dependent
LoS probability) and a terrestrial field with an exclusion radius set by
the association rule.  Coverage integrals weight the conditional success
probability by the user-distance density and the association terms.

Conventions: transform arguments ``s`` are in 1/W; ``t`` and ``r``
exclusion/serving radii are ground distances; UAV serving distances are
euclidean.  Coverage integrals run over the horizontal user distance
with its density, evaluating link quantities at the corresponding
euclidean distance (the measure-correct expectation).
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from scipy.special import gammaln, hyp2f1

from .channel import prob_los, tbs_threshold, tbs_void_radius
from .geometry import mean_rmm, pdf_user_distance_given
from .params import NumericsConfig, SystemParams, validate, validate_numerics
from .quadrature import adaptive_quad, gl_nodes, panel_nodes
from .travel import uav_density_s2


class DerivativeInstabilityWarning(RuntimeWarning):
    """Richardson-extrapolated finite differences disagree beyond tolerance."""


class ConvergenceError(RuntimeError):
    """An interference integral does not converge for these exponents."""


def mixing_weights(params: SystemParams):
    """Probabilities of the reference user sitting in either cluster,
    one pair per density state: (q_mh, q_nl, q_ml, q_nh)."""
    if min(params.lambda_mh, params.lambda_ml,
           params.lambda_nh, params.lambda_nl) <= 0:
        raise ValueError("user densities must be positive")
    q_mh = params.lambda_mh / (params.lambda_mh + params.lambda_nl)
    q_nl = params.lambda_nl / (params.lambda_mh + params.lambda_nl)
    q_ml = params.lambda_ml / (params.lambda_ml + params.lambda_nh)
    q_nh = params.lambda_nh / (params.lambda_ml + params.lambda_nh)
    return q_mh, q_nl, q_ml, q_nh


class InterferenceModel:
    """Frozen-quadrature evaluator for the interference functionals.

    The UAV-field integrals use a fixed panel scheme chosen once at
    construction (node doubling until stable); keeping the nodes frozen
    makes the quadrature error vary smoothly with the transform
    argument, which the finite-difference derivatives rely on.
    """

    def __init__(self, params: SystemParams, numerics: NumericsConfig,
                 lambda_u: float):
        if min(params.alpha_l, params.alpha_n, params.alpha_t) <= 2.0:
            raise ConvergenceError(
                "path-loss exponents must exceed 2 for the interference "
                "integrals to converge")
        self.params = params
        self.numerics = numerics
        self.lambda_u = lambda_u
        edges = [0.0, params.h]
        while edges[-1] < numerics.integral_truncation_radius:
            edges.append(min(2.0 * edges[-1], numerics.integral_truncation_radius))
        probe = np.geomspace(1e-2, 1e18, 11)
        n = 16
        reference = self._field_integrals_at(probe, *panel_nodes(edges, n))
        while n < 256:
            refined = self._field_integrals_at(probe, *panel_nodes(edges, 2 * n))
            gap = max(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300))
                      for a, b in zip(reference, refined))
            reference = refined
            n *= 2
            if gap < 0.01 * numerics.quad_rel_tol:
                break
        self._nodes, self._weights = panel_nodes(edges, n)
        p = params
        self._p_l = prob_los(self._nodes, p)
        self._x_wl = self._nodes * self._p_l * self._weights
        self._x_wn = self._nodes * (1.0 - self._p_l) * self._weights
        self._c_l = p.eta_l * p.rho_u * (self._nodes ** 2 + p.h ** 2) ** (-p.alpha_l / 2.0)
        self._c_n = p.eta_n * p.rho_u * (self._nodes ** 2 + p.h ** 2) ** (-p.alpha_n / 2.0)

    def _field_integrals_at(self, s, nodes, weights):
        p = self.params
        p_l = prob_los(nodes, p)
        c_l = p.eta_l * p.rho_u * (nodes ** 2 + p.h ** 2) ** (-p.alpha_l / 2.0)
        c_n = p.eta_n * p.rho_u * (nodes ** 2 + p.h ** 2) ** (-p.alpha_n / 2.0)
        s = np.asarray(s, dtype=float)[..., None]
        br_l = -np.expm1(-p.m_l * np.log1p(s * c_l / p.m_l))
        br_n = -np.expm1(-p.m_n * np.log1p(s * c_n / p.m_n))
        i_l = np.sum(br_l * (nodes * p_l * weights), axis=-1)
        i_n = np.sum(br_n * (nodes * (1.0 - p_l) * weights), axis=-1)
        return i_l, i_n

    def uav_field_integrals(self, s):
        """LoS and NLoS thinned-field integrals, vectorized over s."""
        p = self.params
        s = np.asarray(s, dtype=float)
        flat = np.atleast_1d(s).ravel()
        i_l = np.empty_like(flat)
        i_n = np.empty_like(flat)
        step = max(1, int(8e6 / self._nodes.size))
        for start in range(0, flat.size, step):
            block = flat[start:start + step, None]
            br_l = -np.expm1(-p.m_l * np.log1p(block * self._c_l / p.m_l))
            br_n = -np.expm1(-p.m_n * np.log1p(block * self._c_n / p.m_n))
            i_l[start:start + step] = np.sum(br_l * self._x_wl, axis=-1)
            i_n[start:start + step] = np.sum(br_n * self._x_wn, axis=-1)
        return i_l.reshape(s.shape), i_n.reshape(s.shape)

    def tbs_tail_integral(self, s, t):
        """Exponential-fading terrestrial field integral from radius t,
        in closed form; vectorized over broadcastable (s, t)."""
        p = self.params
        alpha = p.alpha_t
        s = np.asarray(s, dtype=float)
        t = np.asarray(t, dtype=float)
        c = s * p.rho_t
        out = np.zeros(np.broadcast_shapes(s.shape, t.shape))
        c, t = np.broadcast_arrays(c, np.broadcast_to(t, out.shape))
        zero = c <= 0.0
        from_origin = (~zero) & (t <= 0.0)
        if np.any(from_origin):
            full = (c[from_origin] ** (2.0 / alpha)
                    * math.pi / (alpha * math.sin(2.0 * math.pi / alpha)))
            out[from_origin] = full
        body = (~zero) & (t > 0.0)
        if np.any(body):
            w = c[body] * t[body] ** (-alpha)
            out[body] = (t[body] ** 2 * w / (alpha - 2.0)
                         * hyp2f1(1.0, 1.0 - 2.0 / alpha, 2.0 - 2.0 / alpha, -w))
        return out if out.ndim else float(out)

    def laplace(self, s, t, include_noise=False):
        """Transform of the aggregate interference: UAV field (no
        exclusion) times the terrestrial field beyond ``t``; optionally
        noise-inclusive."""
        s = np.asarray(s, dtype=float)
        i_l, i_n = self.uav_field_integrals(s)
        expo = (2.0 * math.pi * self.lambda_u * (i_l + i_n)
                + 2.0 * math.pi * self.params.lambda_t * self.tbs_tail_integral(s, t))
        if include_noise:
            expo = expo + s * self.params.sigma2
        out = np.exp(-expo)
        return out if out.ndim else float(out)


@lru_cache(maxsize=16)
def _interference_model(params: SystemParams, numerics: NumericsConfig,
                        lambda_u: float) -> InterferenceModel:
    return InterferenceModel(params, numerics, lambda_u)


def laplace_uav_field(s, exclusion_radius: float, lambda_u: float,
                      params: SystemParams,
                      numerics: NumericsConfig = NumericsConfig(),
                      include_noise: bool = False):
    """Interference transform when served by the cluster UAV: the UAV
    field is unexcluded, the terrestrial field starts beyond
    ``exclusion_radius`` (the association void)."""
    model = _interference_model(params, numerics, lambda_u)
    return model.laplace(s, exclusion_radius, include_noise)


def _closing_factor(s, horizontal_uav_dist, los, params):
    eta, alpha, m = ((params.eta_l, params.alpha_l, params.m_l) if los
                     else (params.eta_n, params.alpha_n, params.m_n))
    c = eta * params.rho_u * (np.asarray(horizontal_uav_dist, dtype=float) ** 2
                              + params.h ** 2) ** (-alpha / 2.0)
    return np.exp(-m * np.log1p(np.asarray(s, dtype=float) * c / m))


def laplace_given_tbs_serving(s, r, horizontal_uav_dist, los: bool,
                              lambda_u: float, params: SystemParams,
                              numerics: NumericsConfig = NumericsConfig(),
                              include_noise: bool = False):
    """Interference transform when served by the nearest TBS at ground
    distance ``r``: terrestrial field beyond r, unexcluded UAV field,
    and the cluster UAV's own deterministic interference factor for the
    stated channel type at the given horizontal distance."""
    model = _interference_model(params, numerics, lambda_u)
    base = model.laplace(s, r, include_noise)
    out = base * _closing_factor(s, horizontal_uav_dist, los, params)
    return out if np.ndim(out) else float(out)


# Central-difference stencils (offsets in fine-step units, with the
# derivative order); one Richardson step combines the fine- and
# double-step estimates.
_STENCILS = {
    1: ({-1: -0.5, 1: 0.5}, 1),
    2: ({-1: 1.0, 0: -2.0, 1: 1.0}, 2),
    3: ({-2: -0.5, -1: 1.0, 1: -1.0, 2: 0.5}, 3),
    4: ({-2: 1.0, -1: -4.0, 0: 6.0, 1: -4.0, 2: 1.0}, 4),
}


def _laplace_derivatives(evaluate, s0, k_max: int, fd_step: float,
                         rel_tol: float):
    """Derivatives d^k/ds^k up to k_max of a smooth transform.

    ``evaluate`` maps a flat s-array to values; ``s0`` is a 1-d array of
    expansion points.  Central differences at steps eps and eps/2 are
    combined by one Richardson step; a disagreement beyond pertinent
    tolerance raises DerivativeInstabilityWarning.
    """
    s0 = np.asarray(s0, dtype=float)
    if k_max == 0:
        return evaluate(s0)[None, :]
    span = 4 if k_max > 2 else 2
    offsets = np.arange(-span, span + 1)
    half = 0.5 * fd_step * s0
    grid = s0[None, :] + offsets[:, None] * half[None, :]
    values = evaluate(grid.ravel()).reshape(grid.shape)
    idx = {j: i for i, j in enumerate(offsets)}
    out = np.empty((k_max + 1, s0.size))
    out[0] = values[idx[0]]
    base = np.maximum(np.abs(values[idx[0]]), 1e-300)
    worst = 0.0
    for k in range(1, k_max + 1):
        stencil, order = _STENCILS[k]
        fine = sum(c * values[idx[j]] for j, c in stencil.items()) / half ** order
        coarse = (sum(c * values[idx[2 * j]] for j, c in stencil.items())
                  / (2.0 * half) ** order)
        rich = (4.0 * fine - coarse) / 3.0
        out[k] = rich
        # disagreement weighted the way the coverage sums consume the
        # derivative (s^k / k!), against the transform's own size
        weight = s0 ** k / math.factorial(k)
        worst = max(worst, float(np.max(np.abs(rich - fine) * weight / base)))
    if worst > 10.0 * rel_tol:
        warnings.warn(
            f"finite-difference derivatives unstable: Richardson "
            f"disagreement {worst:.2e}", DerivativeInstabilityWarning)
    return out


class UavCoverage(NamedTuple):
    los: float
    nlos: float

    @property
    def total(self) -> float:
        return self.los + self.nlos


def _binomial(n: int, k: int) -> float:
    return math.comb(n, k)


def _uav_success_profile(model: InterferenceModel, z, los: bool,
                         mode: str) -> np.ndarray:
    """Conditional success probability against the SINR threshold for a
    UAV link at horizontal distances z (vectorized)."""
    p = model.params
    eta, alpha, m = ((p.eta_l, p.alpha_l, p.m_l) if los
                     else (p.eta_n, p.alpha_n, p.m_n))
    z = np.asarray(z, dtype=float)
    r = np.hypot(z, p.h)
    g = p.gamma_thr / (p.rho_u * eta) * r ** alpha
    t_void = tbs_void_radius(r, los, p)

    if mode == "exact":
        if m == 1:
            return model.laplace(g, t_void, include_noise=True)
        s0 = m * g

        def evaluate(s_flat):
            reps = s_flat.size // z.size
            t_flat = np.broadcast_to(t_void, (reps, z.size)).ravel()
            return model.laplace(s_flat, t_flat, include_noise=True)

        derivs = _laplace_derivatives(evaluate, s0, m - 1,
                                      model.numerics.fd_step,
                                      model.numerics.quad_rel_tol)
        total = np.zeros_like(s0)
        for k in range(m):
            total += (s0 ** k / math.factorial(k)) * (-1.0) ** k * derivs[k]
        return total

    if mode == "upper_bound":
        beta2 = math.exp(-gammaln(m + 1) / m)
        total = np.zeros_like(g)
        for k in range(1, m + 1):
            total += (_binomial(m, k) * (-1.0) ** (k + 1)
                      * model.laplace(k * beta2 * m * g, t_void,
                                      include_noise=True))
        return total

    raise ValueError(f"unknown mode {mode!r}")


def cov_uav_term(center_offset: float, r_upper: float, lambda_u: float,
                 params: SystemParams, numerics: NumericsConfig,
                 mode: str = "exact") -> UavCoverage:
    """Joint probability of associating with the cluster UAV (LoS and
    NLoS separately) and beating the SINR threshold, for a user whose
    cluster center sits ``center_offset`` from the UAV's ground point.

    ``r_upper`` is the euclidean cutoff of the coverage integral; the
    user-distance density is zero beyond its own support, so a generous
    cutoff is harmless.
    """
    if mode == "exact" and max(params.m_l, params.m_n) - 1 > 4:
        raise ValueError("exact mode supports fading orders up to 5")
    model = _interference_model(params, numerics, lambda_u)
    z_hi = min(center_offset + params.r_c,
               math.sqrt(max(r_upper ** 2 - params.h ** 2, 0.0)))
    z_lo = max(0.0, center_offset - params.r_c)
    if z_hi <= z_lo:
        return UavCoverage(0.0, 0.0)
    seam = abs(params.r_c - center_offset)
    breaks = [seam] if z_lo < seam < z_hi else []

    def integrand(z, los):
        dens = pdf_user_distance_given(z, center_offset, params.r_c)
        occur = prob_los(z, params) if los else 1.0 - prob_los(z, params)
        r = np.hypot(z, params.h)
        assoc = np.exp(-math.pi * params.lambda_t
                       * tbs_void_radius(r, los, params) ** 2)
        return dens * occur * assoc * _uav_success_profile(model, z, los, mode)

    tol = dict(rel_tol=max(numerics.quad_rel_tol, 1e-7),
               abs_tol=numerics.quad_abs_tol, n0=24, max_doublings=5)
    p_los = adaptive_quad(lambda z: integrand(z, True), z_lo, z_hi,
                          breakpoints=breaks, **tol)
    p_nlos = adaptive_quad(lambda z: integrand(z, False), z_lo, z_hi,
                           breakpoints=breaks, **tol)
    return UavCoverage(p_los, p_nlos)


def cov_tbs_term(center_offset: float, lambda_u: float, params: SystemParams,
                 numerics: NumericsConfig) -> float:
    """Joint probability of associating with the nearest TBS and beating
    the SINR threshold, for a user at cluster offset ``center_offset``."""
    model = _interference_model(params, numerics, lambda_u)
    p = params
    z_hi = center_offset + p.r_c
    seam = abs(p.r_c - center_offset)
    d_hi = math.hypot(z_hi, p.h)
    ray_cut = math.sqrt(math.log(1.0 / max(numerics.quad_abs_tol, 1e-300))
                        / (math.pi * p.lambda_t))

    def part(los: bool) -> float:
        eta, alpha = (p.eta_l, p.alpha_l) if los else (p.eta_n, p.alpha_n)
        # beyond this serving distance the association indicator empties
        scale = (p.rho_u / p.rho_t) ** (1.0 / alpha) * eta ** (1.0 / alpha)
        r_cut = (d_hi / scale) ** (alpha / p.alpha_t)
        r_max = min(ray_cut, r_cut)
        if r_max <= 0.0:
            return 0.0
        # kinks of the inner lower limit: the altitude clamp releasing and
        # the crossing of the user-density seam
        kinks = [(p.h / scale) ** (alpha / p.alpha_t),
                 (math.hypot(seam, p.h) / scale) ** (alpha / p.alpha_t)]
        kinks = [k for k in kinks if 0.0 < k < r_max]
        x_nodes, x_weights = gl_nodes(48)

        def outer(r):
            r = np.asarray(r, dtype=float)
            s = p.gamma_thr / p.rho_t * r ** p.alpha_t
            i_l, i_n = model.uav_field_integrals(s)
            base = np.exp(-(s * p.sigma2
                            + 2.0 * math.pi * lambda_u * (i_l + i_n)
                            + 2.0 * math.pi * p.lambda_t
                            * model.tbs_tail_integral(s, r)))
            z_lo = np.sqrt(np.maximum(
                tbs_threshold(r, los, p) ** 2 - p.h ** 2, 0.0))
            lo = np.minimum(z_lo, z_hi)
            # split the z integral at the density seam where applicable
            seg_edges = [lo, np.clip(seam, lo, z_hi), np.full_like(lo, z_hi)]
            inner = np.zeros_like(lo)
            for a, b in zip(seg_edges[:-1], seg_edges[1:]):
                mid = 0.5 * (a + b)[:, None]
                half = 0.5 * (b - a)[:, None]
                z = mid + half * x_nodes[None, :]
                dens = pdf_user_distance_given(z, center_offset, p.r_c)
                occur = prob_los(z, p) if los else 1.0 - prob_los(z, p)
                closing = _closing_factor(s[:, None], z, los, p)
                inner += np.sum(dens * occur * closing * x_weights[None, :]
                                * half, axis=1)
            ray = 2.0 * math.pi * p.lambda_t * r * np.exp(-math.pi * p.lambda_t * r ** 2)
            return ray * base * inner

        return adaptive_quad(outer, 0.0, r_max,
                             rel_tol=max(numerics.quad_rel_tol, 1e-7),
                             abs_tol=numerics.quad_abs_tol,
                             breakpoints=kinks, n0=24, max_doublings=5)

    return part(True) + part(False)


@dataclass(frozen=True)
class CoverageBreakdown:
    """Per-term coverage: joint association-and-success probabilities."""

    scenario: str
    p_uav_los: float
    p_uav_nlos: float
    p_tbs: float
    p_total: float
    own_uav_los: float
    own_uav_nlos: float
    own_tbs: float
    cross_uav_los: float | None = None
    cross_uav_nlos: float | None = None
    cross_tbs: float | None = None

    CSV_COLUMNS = ("scenario", "p_uav_los", "p_uav_nlos", "p_tbs", "p_total",
                   "own_uav_los", "own_uav_nlos", "own_tbs",
                   "cross_uav_los", "cross_uav_nlos", "cross_tbs")

    @property
    def p_uav(self) -> float:
        return self.p_uav_los + self.p_uav_nlos

    def to_csv_row(self) -> str:
        cells = []
        for name in self.CSV_COLUMNS:
            value = getattr(self, name)
            cells.append("" if value is None else
                         (value if isinstance(value, str) else repr(value)))
        return ",".join(cells)


def _check_probability(value: float, label: str) -> float:
    if not -1e-9 <= value <= 1.0 + 1e-9:
        raise RuntimeError(f"{label} = {value!r} is not a probability")
    return min(1.0, max(0.0, value))


def _theta_average(fn, numerics: NumericsConfig, n0: int = 16, n_max: int = 64):
    """Average fn(theta) over theta ~ Uniform(0, pi) by Gauss-Legendre,
    doubling the order until the estimate stabilizes."""

    def estimate(n):
        nodes, weights = gl_nodes(n)
        theta = 0.5 * math.pi * (nodes + 1.0)
        w = 0.5 * weights          # folds the 1/pi density into [0, pi]
        vals = [fn(float(t)) for t in theta]
        return [float(np.dot(w, [v[i] for v in vals])) for i in range(len(vals[0]))]

    n = n0
    current = estimate(n)
    while n < n_max:
        n *= 2
        refined = estimate(n)
        gap = max(abs(a - b) for a, b in zip(current, refined))
        current = refined
        if gap <= max(numerics.quad_rel_tol * max(map(abs, refined)),
                      numerics.quad_abs_tol):
            return current
    warnings.warn("orientation average did not fully stabilize",
                  RuntimeWarning)
    return current


def coverage_scenario1(params: SystemParams, numerics: NumericsConfig,
                       mode: str = "exact") -> CoverageBreakdown:
    """Coverage with one UAV per cluster pair, perched at the pad nearest
    to whichever cluster is in its busy state.

    The serving-pad distance is fixed at its mean; the cross-cluster
    offset is averaged over the pair orientation.  Both clusters'
    deployments contribute through the state weights.
    """
    params = validate(params)
    validate_numerics(numerics, params)
    lambda_u = params.lambda_user
    r_own = mean_rmm(params.lambda_c, params.d_nm)
    upper_own = math.hypot(params.d_nm + params.r_c, params.h)
    upper_cross = math.hypot(2.0 * params.d_nm + params.r_c, params.h)

    own_u = cov_uav_term(r_own, upper_own, lambda_u, params, numerics, mode)
    own_t = cov_tbs_term(r_own, lambda_u, params, numerics)

    def cross_at(theta_1: float):
        offset = math.sqrt(r_own ** 2 + params.d_nm ** 2
                           - 2.0 * params.d_nm * r_own * math.cos(theta_1))
        u = cov_uav_term(offset, upper_cross, lambda_u, params, numerics, mode)
        t = cov_tbs_term(offset, lambda_u, params, numerics)
        return (u.los, u.nlos, t)

    cross_los, cross_nlos, cross_t = _theta_average(cross_at, numerics)

    q_mh, q_nl, q_ml, q_nh = mixing_weights(params)
    a = params.alpha_time
    w_own = a * q_mh + (1.0 - a) * q_nh
    w_cross = a * q_nl + (1.0 - a) * q_ml

    p_uav_los = w_own * own_u.los + w_cross * cross_los
    p_uav_nlos = w_own * own_u.nlos + w_cross * cross_nlos
    p_tbs = w_own * own_t + w_cross * cross_t
    total = _check_probability(p_uav_los + p_uav_nlos + p_tbs, "coverage")
    return CoverageBreakdown(
        scenario="s1",
        p_uav_los=p_uav_los, p_uav_nlos=p_uav_nlos, p_tbs=p_tbs,
        p_total=total,
        own_uav_los=own_u.los, own_uav_nlos=own_u.nlos, own_tbs=own_t,
        cross_uav_los=cross_los, cross_uav_nlos=cross_nlos, cross_tbs=cross_t)


def coverage_scenario2(params: SystemParams, numerics: NumericsConfig,
                       mode: str = "exact") -> CoverageBreakdown:
    """Coverage with one UAV per cluster: every user is served by its own
    cluster's pad UAV, with the denser deployed-UAV interference field."""
    params = validate(params)
    validate_numerics(numerics, params)
    lambda_u = uav_density_s2(params.lambda_user, params.lambda_c,
                              params.d_nm, numerics)
    r_own = mean_rmm(params.lambda_c, params.d_nm)
    upper_own = math.hypot(params.d_nm + params.r_c, params.h)
    u = cov_uav_term(r_own, upper_own, lambda_u, params, numerics, mode)
    t = cov_tbs_term(r_own, lambda_u, params, numerics)
    total = _check_probability(u.los + u.nlos + t, "coverage")
    return CoverageBreakdown(
        scenario="s2",
        p_uav_los=u.los, p_uav_nlos=u.nlos, p_tbs=t, p_total=total,
        own_uav_los=u.los, own_uav_nlos=u.nlos, own_tbs=t)
