"""Paths in the non-obtuse moduli space and tests for being a geodesic.

Paths live in the angle model: a map ``t -> (theta_1, theta_2, theta_3)``
on ``[0, 1]`` at a fixed area. A path is a geodesic exactly when each angle
is monotone and the path is nowhere locally constant; ``additivity_defect``
measures the same thing directly from the distance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import IdenticalEndpoints, NoPivot, Obtuse, OutOfRange
from .metric import check_equal_area, pairwise_m
from .triangle import (
    HALF_PI,
    RIGHT_TOL,
    ModuliPoint,
    angles_of,
    as_triangle,
    edges_from_angles,
    others,
)

# coordinate decreases this small count as ties, not violations
MONOTONE_TOL = 1e-12
ADDITIVITY_TOL = 1e-9
TELESCOPE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class ModuliPath:
    """A path ``[0, 1] -> angle triples`` at fixed area.

    ``angles_fn`` and ``velocity_fn`` take an array of parameters and return
    ``(n, 3)`` arrays. ``knots`` are the parameters where the velocity may
    jump; between two knots the path is smooth.
    """

    angles_fn: Callable[[np.ndarray], np.ndarray]
    area: float
    velocity_fn: Callable[[np.ndarray], np.ndarray] | None = None
    knots: tuple[float, ...] = (0.0, 1.0)

    def angles(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        out = np.asarray(self.angles_fn(np.atleast_1d(t)), dtype=float)
        return out[0] if t.ndim == 0 else out

    def edges(self, t) -> np.ndarray:
        return edges_from_angles(self.angles(t), self.area)

    def point(self, t: float) -> ModuliPoint:
        return ModuliPoint.from_angles(tuple(self.angles(float(t))), self.area)

    def angle_velocity(self, t) -> np.ndarray:
        """``d theta / dt``; analytic when available, else central differences.

        Each parameter is nudged off the knots into the segment it belongs
        to, so one-sided derivatives are used at corners.
        """
        t = np.atleast_1d(np.asarray(t, dtype=float))
        k = np.asarray(self.knots)
        seg = np.clip(np.searchsorted(k, t, side="right") - 1, 0, len(k) - 2)
        lo, hi = k[seg], k[seg + 1]
        d = 1e-12 * (hi - lo)
        s = np.clip(t, lo + d, hi - d)
        if self.velocity_fn is not None:
            return np.asarray(self.velocity_fn(s), dtype=float)
        h = np.minimum(1e-6, 0.5 * (hi - lo))
        a = np.clip(s - h, lo, hi)
        b = np.clip(s + h, lo, hi)
        return (self.angles_fn(b) - self.angles_fn(a)) / (b - a)[:, None]

    def sample_times(self, n: int) -> np.ndarray:
        """``n`` evenly spaced parameters merged with the knots."""
        return np.union1d(np.linspace(0.0, 1.0, n), np.asarray(self.knots))

    def reversed(self) -> "ModuliPath":
        vel = None if self.velocity_fn is None else (lambda t: -self.velocity_fn(1.0 - t))
        return ModuliPath(lambda t: self.angles_fn(1.0 - t), self.area, vel,
                          tuple(sorted(1.0 - k for k in self.knots)))

    def reparameterized(self, phi, dphi=None) -> "ModuliPath":
        """``t -> path(phi(t))`` for an increasing bijection ``phi`` of ``[0, 1]``."""
        vel = None
        if dphi is not None and self.velocity_fn is not None:
            vel = lambda t: self.velocity_fn(phi(t)) * np.asarray(dphi(t))[:, None]
        knots = tuple(_invert_increasing(phi, k) for k in self.knots)
        return ModuliPath(lambda t: self.angles_fn(phi(t)), self.area, vel, knots)


def _invert_increasing(phi, y: float) -> float:
    lo, hi = 0.0, 1.0
    if y <= 0.0 or y >= 1.0:
        return float(y)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if float(phi(np.array([mid]))[0]) < y:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# constructors


def _non_obtuse_angles(p) -> np.ndarray:
    a = angles_of(p)
    if not a.is_non_obtuse:
        raise Obtuse("paths are built between non-obtuse triangles only")
    return a.as_array()


def polyline_path(vertices: Sequence[Sequence[float]], area: float,
                  knots: Sequence[float] | None = None) -> ModuliPath:
    """Piecewise-linear path through angle triples.

    Without explicit ``knots`` the parameter is spent in proportion to the
    Euclidean length of each leg in angle coordinates.
    """
    v = np.asarray(vertices, dtype=float)
    if v.ndim != 2 or v.shape[1] != 3 or len(v) < 2:
        raise ValueError("need at least two angle triples")
    if (v.max(axis=1) > HALF_PI + RIGHT_TOL).any():
        raise Obtuse("polyline vertex is obtuse")
    if knots is None:
        step = np.linalg.norm(np.diff(v, axis=0), axis=1)
        total = step.sum()
        if total == 0.0:
            k = np.linspace(0.0, 1.0, len(v))
        else:
            k = np.concatenate(([0.0], np.cumsum(step) / total))
            k[-1] = 1.0
    else:
        k = np.asarray(knots, dtype=float)
        if len(k) != len(v) or k[0] != 0.0 or k[-1] != 1.0 or (np.diff(k) <= 0).any():
            raise ValueError("knots must increase from 0 to 1, one per vertex")
    rates = np.diff(v, axis=0) / np.diff(k)[:, None]

    def seg(t):
        return np.clip(np.searchsorted(k, t, side="right") - 1, 0, len(k) - 2)

    def angles(t):
        s = seg(t)
        # convex weights reproduce the vertices exactly at the knots
        w = ((t - k[s]) / (k[s + 1] - k[s]))[:, None]
        return (1.0 - w) * v[s] + w * v[s + 1]

    def velocity(t):
        return rates[seg(t)]

    return ModuliPath(angles, float(area), velocity, tuple(float(x) for x in k))


def angle_line_path(p, q) -> ModuliPath:
    """Straight line between two non-obtuse points in the angle model."""
    area = check_equal_area(p, q)
    a, b = _non_obtuse_angles(p), _non_obtuse_angles(q)
    if as_triangle(p).edges == as_triangle(q).edges:
        raise IdenticalEndpoints("endpoints coincide")
    return polyline_path([a, b], area)


def constant_path(p) -> ModuliPath:
    a = _non_obtuse_angles(p)
    area = p.area if isinstance(p, ModuliPoint) else as_triangle(p).area
    return ModuliPath(lambda t: np.tile(a, (len(t), 1)), area,
                      lambda t: np.zeros((len(t), 3)))


def level_set_path(i: int, theta: float, start: float, stop: float, area: float) -> ModuliPath:
    """Hold ``theta_i`` fixed and move ``theta_j`` linearly from ``start`` to ``stop``."""
    j, k = others(i)
    rows = []
    for x in (start, stop):
        row = np.empty(3)
        row[i - 1], row[j - 1], row[k - 1] = theta, x, math.pi - theta - x
        if row.min() <= 0.0:
            raise OutOfRange("level set leaves the space of triangles")
        rows.append(row)
    return polyline_path(rows, area)


def boundary_path(i: int, start: float, stop: float, area: float) -> ModuliPath:
    """A path inside the boundary component where ``theta_i`` is a right angle."""
    return level_set_path(i, HALF_PI, start, stop, area)


def _monotone_schedule(rng: np.random.Generator, knots: np.ndarray) -> np.ndarray:
    w = rng.uniform(0.2, 1.0, size=len(knots) - 1)
    return np.concatenate(([0.0], np.cumsum(w) / w.sum()))


def random_monotone_path(rng: np.random.Generator, p, q, legs: int = 3) -> ModuliPath:
    """A random geodesic from ``p`` to ``q``.

    The two angles that move in the same direction advance on independent
    strictly increasing piecewise-linear schedules; the third angle is
    whatever is left of ``pi``, so it is monotone too.
    """
    area = check_equal_area(p, q)
    a, b = _non_obtuse_angles(p), _non_obtuse_angles(q)
    d = b - a
    if not d.any():
        raise IdenticalEndpoints("endpoints coincide")
    # pivot: the label whose companions move the same way
    for i in (1, 2, 3):
        j, k = others(i)
        if d[j - 1] * d[k - 1] >= 0.0:
            break
    knots = np.linspace(0.0, 1.0, legs + 1)
    sj, sk = _monotone_schedule(rng, knots), _monotone_schedule(rng, knots)
    rows = np.empty((legs + 1, 3))
    rows[:, j - 1] = a[j - 1] + sj * d[j - 1]
    rows[:, k - 1] = a[k - 1] + sk * d[k - 1]
    rows[:, i - 1] = math.pi - rows[:, j - 1] - rows[:, k - 1]
    rows[0], rows[-1] = a, b
    return polyline_path(rows, area, knots)


def overshoot_path(p, q, label: int, overshoot: float) -> ModuliPath:
    """``p -> w -> q`` where ``theta_label`` overshoots both endpoints at ``w``.

    ``w`` sits at parameter 1/2; the other two angles give up the overshoot
    equally. The result is not monotone in ``theta_label``.
    """
    area = check_equal_area(p, q)
    a, b = _non_obtuse_angles(p), _non_obtuse_angles(q)
    j, k = others(label)
    w = 0.5 * (a + b)
    rise = max(a[label - 1], b[label - 1]) + overshoot - w[label - 1]
    w[label - 1] += rise
    w[j - 1] -= 0.5 * rise
    w[k - 1] -= 0.5 * rise
    if w.min() <= 0.0 or w.max() > HALF_PI:
        raise OutOfRange("overshoot leaves the non-obtuse region")
    return polyline_path([a, w, b], area, [0.0, 0.5, 1.0])


# ---------------------------------------------------------------------------
# geodesic tests


def is_monotone_geodesic(path: ModuliPath, n: int = 64) -> bool:
    """Every angle monotone and no two consecutive samples equal."""
    x = path.angles(path.sample_times(n))
    d = np.diff(x, axis=0)
    monotone = ((d >= -MONOTONE_TOL).all(axis=0) | (d <= MONOTONE_TOL).all(axis=0)).all()
    moving = (np.abs(d).max(axis=1) > MONOTONE_TOL).all()
    return bool(monotone and moving)


def additivity_defect(path: ModuliPath, n: int = 16) -> float:
    """``max |m(t1, t2) + m(t2, t3) - m(t1, t3)|`` over sampled ``t1 <= t2 <= t3``."""
    d = pairwise_m(path.edges(path.sample_times(n)))
    gap = np.abs(d[:, :, None] + d[None, :, :] - d[:, None, :])
    r = np.arange(len(d))
    ordered = (r[:, None, None] <= r[None, :, None]) & (r[None, :, None] <= r[None, None, :])
    return float(gap[ordered].max())


def three_point_defect(p1, p2, p3) -> float:
    """``m(p1, p2) + m(p2, p3) - m(p1, p3)``, nonnegative by the triangle inequality."""
    e = np.array([as_triangle(x).edges for x in (p1, p2, p3)])
    d = pairwise_m(e)
    return float(d[0, 1] + d[1, 2] - d[0, 2])


def pivot_ratio_telescope(path: ModuliPath, n: int = 32) -> bool:
    """Check ``exp(m(P_s, P_t)) = a_i(t)/a_i(s)`` (or its inverse) for one fixed ``i``.

    The label ``i`` must be a pivot for every sampled pair; otherwise
    :class:`NoPivot` is raised.
    """
    t = path.sample_times(n)
    x, e = path.angles(t), path.edges(t)
    s, u = np.triu_indices(len(t), k=1)
    dx = x[u] - x[s]
    usable = []
    for i in (1, 2, 3):
        j, k = others(i)
        le = (dx[:, j - 1] >= 0) & (dx[:, k - 1] >= 0)
        ge = (dx[:, j - 1] <= 0) & (dx[:, k - 1] <= 0)
        if (le | ge).all():
            usable.append((i, le, ge))
    if not usable:
        raise NoPivot("no single label is a pivot for every sampled pair")
    i, le, ge = usable[0]
    lg = np.log(e)
    m = np.max(np.abs(lg[u] - lg[s]), axis=1)
    step = lg[u, i - 1] - lg[s, i - 1]
    # nested pairs shrink e_i, reversed pairs stretch it
    want = np.where(le & ~ge, -step, np.where(ge & ~le, step, np.abs(step)))
    return bool(np.all(np.abs(np.expm1(m - want)) <= TELESCOPE_TOL))


def hausdorff_angles(p: ModuliPath, q: ModuliPath, n: int = 64) -> float:
    """Sampled Hausdorff distance between two traces in angle coordinates.

    Samples of each path are measured against the polyline through the
    samples of the other.
    """
    a = p.angles(p.sample_times(n))
    b = q.angles(q.sample_times(n))
    return max(_to_polyline(a, b), _to_polyline(b, a))


def _to_polyline(pts: np.ndarray, line: np.ndarray) -> float:
    s, e = line[:-1], line[1:]
    d = e - s
    dd = np.einsum("ij,ij->i", d, d)
    dd = np.where(dd == 0.0, 1.0, dd)
    w = pts[:, None, :] - s[None, :, :]
    lam = np.clip(np.einsum("pij,ij->pi", w, d) / dd, 0.0, 1.0)
    gap = w - lam[:, :, None] * d[None, :, :]
    return float(np.linalg.norm(gap, axis=2).min(axis=1).max())
