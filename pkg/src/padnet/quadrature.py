"""Gauss-Legendre quadrature helpers.

All routines take integrands vectorized over numpy arrays; the adaptive
driver doubles the node count per panel until the estimate stabilizes.
Fixed (frozen) node sets are used deliberately in the interference code
so that quadrature error varies smoothly with the transform argument and
cancels under finite differencing.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""

    def __init__(self, message, achieved_tol=None):
        super().__init__(message)
        self.achieved_tol = achieved_tol


@lru_cache(maxsize=64)
def gl_nodes(n: int):
    """Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def fixed_quad(f, a: float, b: float, n: int = 64) -> float:
    """n-point Gauss-Legendre estimate of the integral of f over [a, b]."""
    if b <= a:
        return 0.0
    x, w = gl_nodes(n)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return float(half * np.sum(w * f(mid + half * x)))


def panel_nodes(edges, n: int):
    """Nodes and weights of an n-point rule applied per panel.

    ``edges`` is an increasing sequence of panel boundaries; the return
    is a flat (nodes, weights) pair covering all panels.
    """
    edges = np.asarray(edges, dtype=float)
    x, w = gl_nodes(n)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def adaptive_quad(f, a: float, b: float, *, rel_tol: float = 1e-9,
                  abs_tol: float = 1e-14, breakpoints=(), n0: int = 16,
                  max_doublings: int = 9) -> float:
    """Integrate vectorized ``f`` over [a, b] by per-panel node doubling.

    ``breakpoints`` lists interior points where the integrand has kinks;
    panels never straddle them.  Raises QuadratureError (carrying the
    achieved tolerance) if doubling stalls before the target is met.
    """
    if b <= a:
        return 0.0
    pts = [a] + sorted(p for p in set(breakpoints) if a < p < b) + [b]
    edges = np.asarray(pts, dtype=float)

    n = n0
    nodes, weights = panel_nodes(edges, n)
    estimate = float(np.sum(weights * f(nodes)))
    for _ in range(max_doublings):
        n *= 2
        nodes, weights = panel_nodes(edges, n)
        refined = float(np.sum(weights * f(nodes)))
        err = abs(refined - estimate)
        estimate = refined
        if err <= max(rel_tol * abs(refined), abs_tol):
            return refined
    achieved = err / max(abs(estimate), 1e-300)
    raise QuadratureError(
        f"quadrature did not converge on [{a:g}, {b:g}]: "
        f"achieved relative tolerance {achieved:.2e}, wanted {rel_tol:.2e}",
        achieved_tol=achieved)


def geometric_edges(a: float, b: float, first: float, ratio: float = 2.0):
    """Panel edges [a, a+first, a+first*ratio, ...] capped at b."""
    if b <= a:
        return np.asarray([a, b])
    edges = [a]
    step = first
    while edges[-1] + step < b:
        edges.append(edges[-1] + step)
        step *= ratio
    edges.append(b)
    return np.asarray(edges)
