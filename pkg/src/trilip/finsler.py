"""The weak norm ``F(v) = max_i |v_i| / a_i`` on the fixed-area edge surface
and the length of paths measured with it.

Along an angle-model path the edge coordinates are ``a_i = c sin(theta_i)``
with ``c^2 = 2A / prod sin(theta_l)``, so the logarithmic edge velocity is

    d log a_i / dt = cot(theta_i) theta_i' - 1/2 sum_l cot(theta_l) theta_l'

and ``F`` of the edge velocity is the largest absolute value of these.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NoPivot, NotTangent
from .geodesic import ModuliPath
from .metric import pivot_index
from .triangle import ModuliPoint, angles_from_edges

TANGENT_TOL = 1e-9
SPEED_TOL = 1e-8
# bisection floor when locating a kink of F along the path
KINK_TOL = 1e-13


def area_gradient(edges) -> np.ndarray:
    """``dK/da_i = a_i cot(theta_i) / 2`` from Heron's formula."""
    a = np.asarray(edges, dtype=float)
    th = angles_from_edges(a)
    return 0.5 * a * np.cos(th) / np.sin(th)


@dataclass(frozen=True, eq=False)
class TangentVector:
    """Edge-length rates ``(v1, v2, v3)`` at a point of the fixed-area surface."""

    base: ModuliPoint
    v: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.v, dtype=float).reshape(3)
        object.__setattr__(self, "v", v)
        g = area_gradient(self.base.edges)
        lhs = abs(float(g @ v))
        if lhs > TANGENT_TOL * float(np.linalg.norm(g) * np.linalg.norm(v)):
            raise NotTangent(f"area changes along v (rate {lhs:.3g})")

    @classmethod
    def project(cls, base: ModuliPoint, w) -> "TangentVector":
        """Orthogonal projection of ``w`` onto the tangent plane at ``base``."""
        g = area_gradient(base.edges)
        w = np.asarray(w, dtype=float)
        return cls(base, w - g * (g @ w) / (g @ g))


def weak_norm(v: TangentVector) -> float:
    """``max_i |v_i| / a_i``."""
    return float(np.max(np.abs(v.v) / np.asarray(v.base.edges)))


def log_edge_velocity(angles: np.ndarray, dangles: np.ndarray) -> np.ndarray:
    """``d log a_i / dt`` for rows of angles and angle velocities."""
    c = np.cos(angles) / np.sin(angles)
    w = c * dangles
    return w - 0.5 * w.sum(axis=-1, keepdims=True)


def edge_velocity(path: ModuliPath, t) -> np.ndarray:
    """Edge-coordinate velocity ``da/dt`` (chain rule through the angle model)."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    return path.edges(t) * log_edge_velocity(path.angles(t), path.angle_velocity(t))


def speed(path: ModuliPath, t) -> np.ndarray:
    """``F`` of the velocity at each parameter in ``t``."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    g = log_edge_velocity(path.angles(t), path.angle_velocity(t))
    return np.abs(g).max(axis=-1)


def _active(path: ModuliPath, t: np.ndarray) -> np.ndarray:
    """Index and sign of the coordinate realizing ``F``; changes mark kinks."""
    g = log_edge_velocity(path.angles(t), path.angle_velocity(t))
    i = np.abs(g).argmax(axis=-1)
    return 2 * i + (np.take_along_axis(g, i[:, None], axis=-1)[:, 0] < 0)


def _segment_nodes(path: ModuliPath, lo: float, hi: float, n: int) -> np.ndarray:
    t = np.linspace(lo, hi, n + 1)
    act = _active(path, t)
    m = np.flatnonzero(act[1:] != act[:-1])
    if len(m) == 0:
        return t
    # bisect every bracket at once
    a, b, ka = t[m], t[m + 1], act[m]
    floor = KINK_TOL * max(1.0, hi - lo)
    while (b - a).max() > floor:
        c = 0.5 * (a + b)
        same = _active(path, c) == ka
        a, b = np.where(same, c, a), np.where(same, b, c)
    return np.union1d(t, 0.5 * (a + b))


def quadrature_nodes(path: ModuliPath, n: int = 10_000) -> np.ndarray:
    """Nodes for the trapezoid rule: about ``n`` in total, spread over the smooth
    segments in proportion to their length, plus one node per detected kink."""
    k = np.asarray(path.knots)
    out = []
    for lo, hi in zip(k[:-1], k[1:]):
        m = max(2, int(math.ceil(n * (hi - lo))))
        out.append(_segment_nodes(path, lo, hi, m))
    return np.unique(np.concatenate(out))


def path_length(path: ModuliPath, n: int = 10_000) -> float:
    """``integral F(c'(t)) dt`` by the composite trapezoid rule.

    Each smooth segment between knots is integrated separately with
    one-sided velocities at its ends; nodes are added where the coordinate
    realizing the max switches.
    """
    k = np.asarray(path.knots)
    total = 0.0
    for lo, hi in zip(k[:-1], k[1:]):
        m = max(2, int(math.ceil(n * (hi - lo))))
        t = _segment_nodes(path, lo, hi, m)
        # evaluate just inside the segment so corners use this side's velocity
        d = 1e-12 * (hi - lo)
        f = speed(path, np.clip(t, lo + d, hi - d))
        total += float(np.trapezoid(f, t))
    return total


def speed_table(path: ModuliPath, n: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Parameters and ``F`` values at ``n + 1`` evenly spaced nodes."""
    t = np.linspace(0.0, 1.0, n + 1)
    return t, speed(path, t)


def geodesic_speed_identity(path: ModuliPath, n: int = 1000) -> bool:
    """Check that ``F`` equals ``|a_i'| / a_i`` for the endpoint pivot ``i``.

    A constant path passes vacuously. A closed loop that moves has no pivot.
    """
    p, q = path.point(0.0), path.point(1.0)
    t = quadrature_nodes(path, n)
    g = log_edge_velocity(path.angles(t), path.angle_velocity(t))
    f = np.abs(g).max(axis=-1)
    if p.edges == q.edges:
        if f.max() == 0.0:
            return True
        raise NoPivot("a closed loop has no pivot label")
    i, _ = pivot_index(p, q)
    return bool(np.all(np.abs(f - np.abs(g[:, i - 1])) <= SPEED_TOL * np.maximum(1.0, f)))
