"""Random angle triples and triangles for tests, reports and the CLI.

Angle triples are drawn uniformly from the angle simplex (flat Dirichlet
scaled by pi) and rejection-filtered to the wanted shape class.
"""

from __future__ import annotations

import math

import numpy as np

from .triangle import HALF_PI, edges_from_angles


def simplex_angles(rng: np.random.Generator, n: int) -> np.ndarray:
    """``n`` uniform angle triples, shape ``(n, 3)``."""
    return rng.dirichlet(np.ones(3), size=n) * math.pi


def _filtered(rng, n, keep, margin):
    out = np.empty((0, 3))
    while len(out) < n:
        x = simplex_angles(rng, max(2 * (n - len(out)), 16))
        x = x[keep(x) & (x.min(axis=1) > margin)]
        out = np.vstack((out, x))
    return out[:n]


def acute_angles(rng: np.random.Generator, n: int, margin: float = 0.0) -> np.ndarray:
    """Angle triples with every angle in ``(margin, pi/2 - margin)``."""
    return _filtered(rng, n, lambda x: x.max(axis=1) < HALF_PI - margin, margin)


def obtuse_angles(rng: np.random.Generator, n: int, margin: float = 0.0) -> np.ndarray:
    return _filtered(rng, n, lambda x: x.max(axis=1) > HALF_PI + margin, margin)


def right_angles(rng: np.random.Generator, n: int, vertex: int = 1, margin: float = 0.0) -> np.ndarray:
    """Triples with ``theta_vertex = pi/2`` and the other two uniform."""
    lo = margin
    x = rng.uniform(lo, HALF_PI - lo, size=n)
    out = np.empty((n, 3))
    j, k = [l for l in (0, 1, 2) if l != vertex - 1]
    out[:, vertex - 1] = HALF_PI
    out[:, j] = x
    out[:, k] = HALF_PI - x
    return out


def acute_edges(rng: np.random.Generator, n: int, area: float = 0.5, margin: float = 0.0) -> np.ndarray:
    return edges_from_angles(acute_angles(rng, n, margin), area)


def random_edges(rng: np.random.Generator, n: int, area: float = 0.5, margin: float = 1e-3) -> np.ndarray:
    """Edge triples of arbitrary shape at a fixed area."""
    return edges_from_angles(_filtered(rng, n, lambda x: np.ones(len(x), bool), margin), area)
