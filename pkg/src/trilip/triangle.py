"""Labeled Euclidean triangles, the edge and angle models, and the S3 action.

Labels follow the usual convention: edge ``e_i`` is opposite vertex ``v_i``
and the vertices ``v1, v2, v3`` run counter-clockwise. Indices in the public
API are 1-based so that they read like the labels.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import DegenerateTriangle, NonpositiveScale

# absolute tolerance for algebraic identities, e.g. the angle sum
ALGEBRAIC_TOL = 1e-12
# transcendental roundtrips (angles -> edges -> angles)
ROUNDTRIP_TOL = 1e-10
# |cos theta| at or below this counts as a right angle
RIGHT_TOL = 1e-10

HALF_PI = 0.5 * math.pi


class Shape(enum.Enum):
    ACUTE = "acute"
    RIGHT = "right"
    OBTUSE = "obtuse"


def others(i: int) -> tuple[int, int]:
    """The two labels following ``i`` in cyclic (counter-clockwise) order."""
    j = i % 3 + 1
    return j, j % 3 + 1


def heron(a1: float, a2: float, a3: float) -> float:
    """Area from edge lengths, using Kahan's cancellation-free arrangement."""
    a, b, c = sorted((a1, a2, a3), reverse=True)
    prod = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c))
    if prod <= 0.0:
        return 0.0
    return 0.25 * math.sqrt(prod)


def heron_batch(edges: np.ndarray) -> np.ndarray:
    e = -np.sort(-np.asarray(edges, dtype=float), axis=-1)
    a, b, c = e[..., 0], e[..., 1], e[..., 2]
    prod = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c))
    return 0.25 * np.sqrt(np.clip(prod, 0.0, None))


def cosine_numerators(a1: float, a2: float, a3: float) -> tuple[float, float, float]:
    """Law-of-cosines numerators ``a_j^2 + a_k^2 - a_i^2`` for i = 1, 2, 3."""
    s1, s2, s3 = a1 * a1, a2 * a2, a3 * a3
    return (s2 + s3 - s1, s3 + s1 - s2, s1 + s2 - s3)


@dataclass(frozen=True)
class AngleTriple:
    """A point of the angle model: three positive angles summing to pi."""

    t1: float
    t2: float
    t3: float

    def __post_init__(self):
        ts = (self.t1, self.t2, self.t3)
        if not all(math.isfinite(t) and t > 0.0 for t in ts):
            raise DegenerateTriangle(f"angles must be positive, got {ts}")
        if abs(math.fsum(ts) - math.pi) > ALGEBRAIC_TOL:
            raise DegenerateTriangle(f"angles must sum to pi, got sum {math.fsum(ts)!r}")

    def __iter__(self):
        return iter((self.t1, self.t2, self.t3))

    def __getitem__(self, i: int) -> float:
        """1-based access, ``angles[1]`` is the angle at ``v1``."""
        return (self.t1, self.t2, self.t3)[i - 1]

    def as_array(self) -> np.ndarray:
        return np.array([self.t1, self.t2, self.t3])

    @property
    def is_acute(self) -> bool:
        # same band as the cosine test used for edge triples
        return all(t < HALF_PI - RIGHT_TOL for t in self)

    @property
    def is_non_obtuse(self) -> bool:
        return all(t <= HALF_PI + RIGHT_TOL for t in self)


@dataclass(frozen=True)
class LabeledTriangle:
    """A labeled triangle given by its edge lengths ``(a1, a2, a3)``."""

    a1: float
    a2: float
    a3: float

    def __post_init__(self):
        es = (self.a1, self.a2, self.a3)
        if not all(math.isfinite(a) and a > 0.0 for a in es):
            raise DegenerateTriangle(f"edge lengths must be positive, got {es}")
        a1, a2, a3 = es
        if not (a1 + a2 > a3 and a2 + a3 > a1 and a3 + a1 > a2):
            raise DegenerateTriangle(f"triangle inequality fails for {es}")
        if heron(*es) <= 0.0:
            raise DegenerateTriangle(f"zero area for {es}")

    @property
    def edges(self) -> tuple[float, float, float]:
        return (self.a1, self.a2, self.a3)

    def edge(self, i: int) -> float:
        return self.edges[i - 1]

    @cached_property
    def area(self) -> float:
        return heron(*self.edges)

    @cached_property
    def altitudes(self) -> tuple[float, float, float]:
        k = 2.0 * self.area
        return (k / self.a1, k / self.a2, k / self.a3)

    @cached_property
    def cosines(self) -> tuple[float, float, float]:
        a = self.edges
        n = cosine_numerators(*a)
        return tuple(n[i] / (2.0 * a[(i + 1) % 3] * a[(i + 2) % 3]) for i in range(3))

    @cached_property
    def angles(self) -> AngleTriple:
        # atan2 of (sin, cos) numerators: law of cosines without the arccos
        # ill-conditioning near 0 and pi
        k = 4.0 * self.area
        n = cosine_numerators(*self.edges)
        return AngleTriple(*(math.atan2(k, x) for x in n))

    @cached_property
    def shape(self) -> Shape:
        cs = self.cosines
        if any(c < -RIGHT_TOL for c in cs):
            return Shape.OBTUSE
        if any(abs(c) <= RIGHT_TOL for c in cs):
            return Shape.RIGHT
        return Shape.ACUTE

    def right_vertex(self) -> int | None:
        """Label of the right angle, if any (within ``RIGHT_TOL`` on the cosine)."""
        for i, c in enumerate(self.cosines, start=1):
            if abs(c) <= RIGHT_TOL:
                return i
        return None

    @property
    def is_acute(self) -> bool:
        return self.shape is Shape.ACUTE

    @property
    def is_non_obtuse(self) -> bool:
        return self.shape is not Shape.OBTUSE


@dataclass(frozen=True)
class ModuliPoint:
    """A point of the moduli space of labeled triangles with fixed area."""

    triangle: LabeledTriangle
    area: float

    def __post_init__(self):
        if not (math.isfinite(self.area) and self.area > 0.0):
            raise DegenerateTriangle(f"area must be positive, got {self.area!r}")
        if abs(self.triangle.area - self.area) > ALGEBRAIC_TOL * self.area:
            raise DegenerateTriangle(
                f"Heron area {self.triangle.area!r} does not match {self.area!r}"
            )

    @classmethod
    def from_angles(cls, angles: AngleTriple | Sequence[float], area: float) -> "ModuliPoint":
        return cls(from_angles(angles, area), area)

    @classmethod
    def from_edges(cls, a1: float, a2: float, a3: float) -> "ModuliPoint":
        t = from_edges(a1, a2, a3)
        return cls(t, t.area)

    @property
    def edges(self) -> tuple[float, float, float]:
        return self.triangle.edges

    @property
    def angles(self) -> AngleTriple:
        return self.triangle.angles

    @property
    def altitudes(self) -> tuple[float, float, float]:
        return self.triangle.altitudes

    @property
    def shape(self) -> Shape:
        return self.triangle.shape


def as_triangle(x: LabeledTriangle | ModuliPoint) -> LabeledTriangle:
    return x.triangle if isinstance(x, ModuliPoint) else x


def from_edges(a1: float, a2: float, a3: float) -> LabeledTriangle:
    return LabeledTriangle(float(a1), float(a2), float(a3))


def from_angles(t: AngleTriple | Sequence[float], area: float) -> LabeledTriangle:
    """The triangle of area ``area`` with the given angles.

    ``a_i = sin(t_i) * sqrt(2 A / (sin t1 sin t2 sin t3))``.
    """
    if not isinstance(t, AngleTriple):
        t = AngleTriple(*map(float, t))
    if not (math.isfinite(area) and area > 0.0):
        raise DegenerateTriangle(f"area must be positive, got {area!r}")
    s = tuple(_sines(np.array([tuple(t)]))[0])
    k = math.sqrt(2.0 * area / (s[0] * s[1] * s[2]))
    return LabeledTriangle(k * s[0], k * s[1], k * s[2])


def _sines(angles: np.ndarray) -> np.ndarray:
    # the largest angle's sine is taken as sin(sum of the other two), so the
    # three sines describe one closed triangle even when the inputs sum to pi
    # only up to rounding; matters for flat triangles
    x = np.asarray(angles, dtype=float)
    s = np.sin(x)
    order = np.argsort(x, axis=-1)
    small = np.take_along_axis(x, order[..., :2], axis=-1)
    rest = small[..., :1] + small[..., 1:]
    np.put_along_axis(s, order[..., 2:], np.sin(rest), axis=-1)
    return s


def edges_from_angles(angles: np.ndarray, area: float | np.ndarray) -> np.ndarray:
    """Vectorised :func:`from_angles` on an ``(n, 3)`` array; no validation."""
    s = _sines(angles)
    k = np.sqrt(2.0 * np.asarray(area, dtype=float) / np.prod(s, axis=-1))
    return s * k[..., None]


def angles_from_edges(edges: np.ndarray) -> np.ndarray:
    """Vectorised :func:`angles_of` on an ``(n, 3)`` array; no validation."""
    e = np.asarray(edges, dtype=float)
    sq = e * e
    num = sq.sum(axis=-1, keepdims=True) - 2.0 * sq
    k = 4.0 * heron_batch(e)
    return np.arctan2(k[..., None], num)


def angles_of(t: LabeledTriangle | ModuliPoint) -> AngleTriple:
    return as_triangle(t).angles


def area(t: LabeledTriangle | ModuliPoint) -> float:
    return as_triangle(t).area


def altitudes(t: LabeledTriangle | ModuliPoint) -> tuple[float, float, float]:
    return as_triangle(t).altitudes


def classify(t: LabeledTriangle | ModuliPoint) -> Shape:
    return as_triangle(t).shape


def scale(t: LabeledTriangle, factor: float) -> LabeledTriangle:
    if not (math.isfinite(factor) and factor > 0.0):
        raise NonpositiveScale(f"scale factor must be positive, got {factor!r}")
    t = as_triangle(t)
    return LabeledTriangle(factor * t.a1, factor * t.a2, factor * t.a3)


def normalize_to_area(t: LabeledTriangle | ModuliPoint, target: float) -> ModuliPoint:
    t = as_triangle(t)
    if not (math.isfinite(target) and target > 0.0):
        raise DegenerateTriangle(f"area must be positive, got {target!r}")
    lam = math.sqrt(target / t.area)
    return ModuliPoint(scale(t, lam), target)


# ---------------------------------------------------------------------------
# S3 acting on labels

S3: tuple[tuple[int, int, int], ...] = tuple(itertools.permutations((1, 2, 3)))
IDENTITY = (1, 2, 3)


def compose_perm(s: Sequence[int], t: Sequence[int]) -> tuple[int, int, int]:
    """``s o t`` as maps on {1, 2, 3}: ``(s o t)(l) = s(t(l))``."""
    return tuple(s[t[l] - 1] for l in range(3))


def invert_perm(s: Sequence[int]) -> tuple[int, int, int]:
    inv = [0, 0, 0]
    for l, sl in enumerate(s, start=1):
        inv[sl - 1] = l
    return tuple(inv)


def _check_perm(s: Sequence[int]) -> tuple[int, int, int]:
    s = tuple(int(x) for x in s)
    if sorted(s) != [1, 2, 3]:
        raise ValueError(f"not a permutation of (1, 2, 3): {s}")
    return s


def permute(t, sigma: Sequence[int]):
    """Relabel: ``(a1, a2, a3) -> (a_sigma(1), a_sigma(2), a_sigma(3))``.

    This is a right action, ``permute(permute(T, s), t) == permute(T, s o t)``.
    Works on :class:`LabeledTriangle` and :class:`ModuliPoint`.
    """
    sigma = _check_perm(sigma)
    tri = as_triangle(t)
    e = tri.edges
    out = LabeledTriangle(e[sigma[0] - 1], e[sigma[1] - 1], e[sigma[2] - 1])
    if isinstance(t, ModuliPoint):
        return ModuliPoint(out, t.area)
    return out


# ---------------------------------------------------------------------------
# planar embeddings


@dataclass(frozen=True, eq=False)
class EmbeddedTriangle:
    """Three labeled points in the plane, counter-clockwise."""

    points: np.ndarray = field(repr=False)

    def __post_init__(self):
        p = np.array(self.points, dtype=float).reshape(3, 2)
        p.setflags(write=False)
        object.__setattr__(self, "points", p)
        if not np.all(np.isfinite(p)):
            raise DegenerateTriangle("non-finite vertex coordinates")
        if self.signed_area <= 0.0:
            raise DegenerateTriangle(
                f"vertices must be counter-clockwise with positive area, got {p.tolist()}"
            )

    @classmethod
    def of(cls, v1, v2, v3) -> "EmbeddedTriangle":
        return cls(np.array([v1, v2, v3], dtype=float))

    def __repr__(self):
        return f"EmbeddedTriangle({self.points.tolist()})"

    def vertex(self, i: int) -> np.ndarray:
        return self.points[i - 1]

    @property
    def v1(self) -> np.ndarray:
        return self.points[0]

    @property
    def v2(self) -> np.ndarray:
        return self.points[1]

    @property
    def v3(self) -> np.ndarray:
        return self.points[2]

    @property
    def signed_area(self) -> float:
        return signed_area(self.points)

    @cached_property
    def triangle(self) -> LabeledTriangle:
        p = self.points
        return LabeledTriangle(
            float(np.hypot(*(p[2] - p[1]))),
            float(np.hypot(*(p[0] - p[2]))),
            float(np.hypot(*(p[1] - p[0]))),
        )

    def foot(self, i: int) -> np.ndarray:
        """Orthogonal projection of ``v_i`` onto the line through ``e_i``."""
        j, k = others(i)
        return project_to_line(self.vertex(i), self.vertex(j), self.vertex(k))

    def foot_parameter(self, i: int) -> float:
        """Position of the foot ``p_i`` along ``v_j -> v_k`` (0 at ``v_j``)."""
        j, k = others(i)
        a, b = self.vertex(j), self.vertex(k)
        d = b - a
        return float(np.dot(self.vertex(i) - a, d) / np.dot(d, d))

    def foot_is_interior(self, i: int, tol: float = ALGEBRAIC_TOL) -> bool:
        s = self.foot_parameter(i)
        return tol < s < 1.0 - tol

    def transformed(self, linear: np.ndarray, offset: np.ndarray) -> "EmbeddedTriangle":
        return EmbeddedTriangle(self.points @ np.asarray(linear).T + np.asarray(offset))


def signed_area(points: np.ndarray) -> float:
    p = np.asarray(points, dtype=float)
    u = p[1] - p[0]
    v = p[2] - p[0]
    return 0.5 * float(u[0] * v[1] - u[1] * v[0])


def project_to_line(x: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    d = b - a
    return a + d * (np.dot(x - a, d) / np.dot(d, d))


def embed(t: LabeledTriangle | ModuliPoint) -> EmbeddedTriangle:
    """Canonical placement: ``v1`` at the origin, ``v2`` on the positive x-axis."""
    t = as_triangle(t)
    a1, a2, a3 = t.edges
    x = cosine_numerators(a1, a2, a3)[0] / (2.0 * a3)
    y = 2.0 * t.area / a3
    return EmbeddedTriangle(np.array([[0.0, 0.0], [a3, 0.0], [x, y]]))


# ---------------------------------------------------------------------------
# JSON shapes: {"edges": [a1, a2, a3]} or {"angles": [t1, t2, t3], "area": A}


def triangle_to_json(t: LabeledTriangle | ModuliPoint) -> dict:
    if isinstance(t, ModuliPoint):
        return {"edges": list(t.edges), "area": t.area}
    return {"edges": list(t.edges)}


def triangle_from_json(obj: dict, default_area: float | None = None) -> LabeledTriangle:
    if not isinstance(obj, dict):
        raise DegenerateTriangle(f"expected a JSON object, got {type(obj).__name__}")
    if "edges" in obj:
        e = obj["edges"]
        if len(e) != 3:
            raise DegenerateTriangle("'edges' needs three numbers")
        return from_edges(*map(float, e))
    if "angles" in obj:
        t = obj["angles"]
        if len(t) != 3:
            raise DegenerateTriangle("'angles' needs three numbers")
        a = obj.get("area", default_area)
        if a is None:
            raise DegenerateTriangle("'angles' input needs an 'area'")
        return from_angles(tuple(map(float, t)), float(a))
    raise DegenerateTriangle("triangle JSON needs 'edges' or 'angles'")
