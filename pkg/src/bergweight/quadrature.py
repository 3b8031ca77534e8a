"""Gauss-Legendre building blocks for integrands that concentrate near s = 1.

Everything here works on [0, 1) (or a transformed axis) with dyadic grading
toward the right endpoint, because every integral in this package either
degenerates or piles up its mass at the boundary of the disc.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import QuadratureError

_GAUSS_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}

#: Deepest dyadic cell 1 - 2^-j that keeps 1 - s representable in doubles.
MAX_MESH_DEPTH = 48


def gauss_rule(order):
    """Nodes and weights of the Gauss-Legendre rule on [-1, 1], cached."""
    try:
        return _GAUSS_CACHE[order]
    except KeyError:
        nodes, weights = np.polynomial.legendre.leggauss(order)
        _GAUSS_CACHE[order] = (nodes, weights)
        return nodes, weights


def cell_nodes(lo, hi, order):
    """Gauss-Legendre nodes/weights mapped onto the interval [lo, hi]."""
    x, w = gauss_rule(order)
    half = 0.5 * (hi - lo)
    return lo + half * (x + 1.0), half * w


def subdivided_nodes(lo, hi, parts, order):
    """Nodes/weights for [lo, hi] split into ``parts`` equal Gauss cells."""
    if parts <= 1:
        return cell_nodes(lo, hi, order)
    edges = np.linspace(lo, hi, parts + 1)
    xs = []
    ws = []
    for a, b in zip(edges[:-1], edges[1:]):
        x, w = cell_nodes(a, b, order)
        xs.append(x)
        ws.append(w)
    return np.concatenate(xs), np.concatenate(ws)


def adaptive_gauss(fn, lo, hi, rel_tol=5e-13, order=16, max_depth=46):
    """Globally adaptive Gauss-Legendre integral of a vectorized ``fn``.

    Cells are bisected until the refinement correction is below a
    width-proportional share of ``rel_tol`` times the running total.
    Raises :class:`QuadratureError` when the unresolved residual stays
    above tolerance at the depth limit.
    """
    if hi <= lo:
        return 0.0

    def estimate(a, b):
        x, w = cell_nodes(a, b, order)
        return float(np.dot(w, fn(x)))

    first = estimate(lo, hi)
    scale = max(abs(first), 1e-300)
    total = 0.0
    residual = 0.0
    stack = [(lo, hi, first, 0)]
    while stack:
        a, b, coarse, depth = stack.pop()
        mid = 0.5 * (a + b)
        left = estimate(a, mid)
        right = estimate(mid, b)
        fine = left + right
        err = abs(fine - coarse)
        budget = rel_tol * scale * max((b - a) / (hi - lo), 1e-6)
        if err <= budget or depth >= max_depth:
            total += fine
            if err > budget:
                residual += err
            scale = max(scale, abs(total))
        else:
            stack.append((a, mid, left, depth + 1))
            stack.append((mid, b, right, depth + 1))
    if residual > 1e-9 * max(abs(total), 1e-300):
        raise QuadratureError(
            f"adaptive quadrature left a residual of {residual:.3e} "
            f"against total {total:.3e}",
            residual=residual,
        )
    return total


def split_count(x_scale, width, theta, cap=64):
    """Number of equal parts needed so s^x varies mildly across a cell.

    ``width`` is the cell width in 1 - s; the variation of ``x * log s``
    across the cell is roughly ``x_scale * width``.  Cells where s^x is
    already below e^-45 at the right edge need no refinement.
    """
    v = x_scale * width
    if v > 45.0:
        return 1
    return max(1, min(cap, int(math.ceil(v / theta))))


@dataclass(frozen=True)
class RadialRule:
    """Fixed quadrature rule for integrals of g(s) against a radial weight.

    ``integrate`` expects the values of g at ``nodes`` plus g(1);
    ``boundary_mass`` carries the weight mass beyond the resolved mesh,
    attributed to the endpoint (the weights here are the density values
    already multiplied in, so plain dot products remain).
    """

    nodes: np.ndarray
    weights: np.ndarray
    boundary_mass: float

    def integrate(self, g_nodes, g_one=0.0):
        return float(np.dot(self.weights, g_nodes)) + self.boundary_mass * g_one

    def scaled(self, factor):
        return RadialRule(self.nodes, self.weights * factor, self.boundary_mass * factor)
