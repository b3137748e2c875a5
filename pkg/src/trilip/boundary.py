"""The right-angled boundary of the non-obtuse moduli space.

``B_i`` is the set of triangles with a right angle at ``v_i``. An ``i``-pair
is a triangle on ``B_j`` and one on ``B_k`` sharing the angle at ``v_i``;
their distance is an injective function of the shared shape, which is what
pins every isometry down to a relabeling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import Obtuse, OutOfRange
from .metric import m_equal_area, m_equal_area_batch
from .sampling import acute_angles, right_angles
from .triangle import (
    HALF_PI,
    RIGHT_TOL,
    S3,
    ModuliPoint,
    angles_of,
    edges_from_angles,
    invert_perm,
    others,
)


def boundary_component(p) -> int | None:
    """Label ``i`` with ``theta_i = pi/2`` (within ``RIGHT_TOL``), or None."""
    a = angles_of(p)
    if not a.is_non_obtuse:
        raise Obtuse("boundary membership is defined for non-obtuse triangles")
    for i in (1, 2, 3):
        if abs(a[i] - HALF_PI) <= RIGHT_TOL:
            return i
    return None


def _check_a(a: float) -> float:
    a = float(a)
    if not (0.0 < a <= 1.0):
        raise OutOfRange(f"parameter a must lie in (0, 1], got {a!r}")
    return a


def i_pair(i: int, a: float, area: float = 0.5) -> tuple[ModuliPoint, ModuliPoint]:
    """The ``i``-pair with legs ``a`` and ``1/a`` at area 1/2, rescaled to ``area``.

    For ``i = 1``: ``T = (a, sqrt(a^2 + 1/a^2), 1/a)`` is right-angled at
    ``v2`` and ``T' = (a, 1/a, sqrt(a^2 + 1/a^2))`` at ``v3``. Other labels
    are the same pair with edges rotated cyclically.
    """
    a = _check_a(a)
    if not area > 0.0:
        raise OutOfRange(f"area must be positive, got {area!r}")
    if i not in (1, 2, 3):
        raise OutOfRange(f"label must be 1, 2 or 3, got {i!r}")
    s = math.sqrt(2.0 * area)
    hyp = math.hypot(a, 1.0 / a)
    j, k = others(i)
    e, f = [0.0] * 3, [0.0] * 3
    e[i - 1], e[j - 1], e[k - 1] = s * a, s * hyp, s / a
    f[i - 1], f[j - 1], f[k - 1] = s * a, s / a, s * hyp
    return ModuliPoint.from_edges(*e), ModuliPoint.from_edges(*f)


def i_pair_distance(a: float) -> float:
    """``m`` between the two members of an ``i``-pair: ``log(1 + a^4) / 2``."""
    a = _check_a(a)
    return 0.5 * math.log1p(a**4)


def puncture_pair(x: float, area: float = 0.5) -> tuple[ModuliPoint, ModuliPoint]:
    """``(x, pi/2, pi/2 - x)`` and ``(pi/2, x, pi/2 - x)``; both tend to the
    puncture ``(pi/2, pi/2, 0)`` as ``x -> pi/2``."""
    if not (0.0 < x < HALF_PI):
        raise OutOfRange("x must lie in (0, pi/2)")
    return (ModuliPoint.from_angles((x, HALF_PI, HALF_PI - x), area),
            ModuliPoint.from_angles((HALF_PI, x, HALF_PI - x), area))


def puncture_distances(xs, area: float = 0.5) -> np.ndarray:
    return np.array([m_equal_area(*puncture_pair(x, area)) for x in xs])


def isoceles_escape(beta: float, area: float = 0.5) -> float:
    """``m`` from the equilateral triangle to ``(pi - 2 beta, beta, beta)``.

    Grows without bound as ``beta -> pi/2``.
    """
    eq = ModuliPoint.from_angles((math.pi / 3,) * 3, area)
    return m_equal_area(eq, ModuliPoint.from_angles((math.pi - 2 * beta, beta, beta), area))


# ---------------------------------------------------------------------------
# isometry consistency report

A_GRID = tuple(round(0.1 * n, 1) for n in range(1, 11))


@dataclass(frozen=True)
class IsometryReport:
    """Consistency check of the relabeling group against the metric.

    This verifies ingredients, not the classification itself: relabelings
    preserve ``m``, the ``i``-pair distance separates shapes, and relabeling
    moves boundary components the way it moves labels.
    """

    samples: int
    seed: int
    max_deviation: float
    permutations_ok: bool
    ipair_min_gap: float
    injective: bool
    boundary_ok: bool
    a_grid: tuple[float, ...] = field(default=A_GRID)

    @property
    def ok(self) -> bool:
        return self.permutations_ok and self.injective and self.boundary_ok

    def to_json(self) -> dict:
        return {
            "samples": self.samples,
            "seed": self.seed,
            "max_deviation": self.max_deviation,
            "permutations_ok": self.permutations_ok,
            "ipair_min_gap": self.ipair_min_gap,
            "injective": self.injective,
            "boundary_ok": self.boundary_ok,
            "a_grid": list(self.a_grid),
            "ok": self.ok,
            "kind": "consistency check",
        }


def verify_isometry_group(samples: int = 10_000, seed: int = 0, area: float = 0.5,
                          a_grid=A_GRID) -> IsometryReport:
    rng = np.random.default_rng(seed)
    e = edges_from_angles(acute_angles(rng, samples), area)
    f = edges_from_angles(acute_angles(rng, samples), area)
    base = m_equal_area_batch(e, f)
    dev = 0.0
    for s in S3:
        idx = [x - 1 for x in s]
        dev = max(dev, float(np.abs(m_equal_area_batch(e[:, idx], f[:, idx]) - base).max()))

    d = np.sort([i_pair_distance(a) for a in a_grid])
    gap = float(np.diff(d).min()) if len(d) > 1 else math.inf

    # relabeling by s sends B_i to B_{s^-1(i)}
    boundary_ok = True
    per = max(1, min(samples, 50))
    for i in (1, 2, 3):
        pts = edges_from_angles(right_angles(rng, per, vertex=i, margin=1e-3), area)
        for s in S3:
            want = invert_perm(s)[i - 1]
            idx = [x - 1 for x in s]
            for row in pts[:, idx]:
                if boundary_component(ModuliPoint.from_edges(*row)) != want:
                    boundary_ok = False
    return IsometryReport(samples, seed, dev, dev == 0.0, gap, gap > 1e-12,
                          boundary_ok, tuple(a_grid))
