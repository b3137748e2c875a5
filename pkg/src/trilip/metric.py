"""The distance ``m``, its equal-area form, pivot analysis and lower bounds."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import AreaMismatch, NoInteriorFoot, NotAcute, NotRightAtV1
from .triangle import (
    ALGEBRAIC_TOL,
    EmbeddedTriangle,
    LabeledTriangle,
    ModuliPoint,
    as_triangle,
    others,
)

GAP_MARGIN = 1e-9


class PivotCase(enum.Enum):
    # theta_j <= theta'_j and theta_k <= theta'_k
    NESTED = "nested"
    # theta_j >= theta'_j and theta_k >= theta'_k
    REVERSED = "reversed"
    # both hold, i.e. all angles agree
    MIXED = "mixed"


def six_ratios(t: LabeledTriangle, u: LabeledTriangle) -> tuple[float, ...]:
    """Edge ratios ``a'_i / a_i`` followed by altitude ratios ``h'_i / h_i``."""
    t, u = as_triangle(t), as_triangle(u)
    e = tuple(b / a for a, b in zip(t.edges, u.edges))
    h = tuple(b / a for a, b in zip(t.altitudes, u.altitudes))
    return e + h


def m_ratio(t, u) -> float:
    """``exp(m(T, T'))``: the largest of the six edge and altitude ratios."""
    return max(six_ratios(t, u))


def m_distance(t, u) -> float:
    """``m(T, T') = log max{a'_i/a_i, h'_i/h_i}``.

    Defined for any two triangles. Only for equal areas is it a distance; with
    unequal areas it obeys the scaling law and may be negative (T' much
    smaller than T).
    """
    return math.log(m_ratio(t, u))


def _area(x) -> float:
    return x.area if isinstance(x, ModuliPoint) else as_triangle(x).area


def check_equal_area(p, q, tol: float = ALGEBRAIC_TOL) -> float:
    a, b = _area(p), _area(q)
    if abs(a - b) > tol * max(a, b):
        raise AreaMismatch(f"areas differ: {a!r} vs {b!r}")
    return a


def m_equal_area(p, q) -> float:
    """``max_i |log a'_i - log a_i|`` for two triangles of the same area."""
    check_equal_area(p, q)
    e, f = as_triangle(p).edges, as_triangle(q).edges
    return max(abs(math.log(f[i]) - math.log(e[i])) for i in range(3))


def m_equal_area_batch(e: np.ndarray, f: np.ndarray) -> np.ndarray:
    """Row-wise :func:`m_equal_area` on ``(..., 3)`` edge arrays, no area check."""
    return np.max(np.abs(np.log(f) - np.log(e)), axis=-1)


def pairwise_m(edges: np.ndarray) -> np.ndarray:
    """All-pairs ``m`` matrix for an ``(n, 3)`` array of equal-area edge triples."""
    lg = np.log(np.asarray(edges, dtype=float))
    return np.max(np.abs(lg[:, None, :] - lg[None, :, :]), axis=-1)


# ---------------------------------------------------------------------------
# pivot analysis


def pivot_candidates(p, q) -> list[tuple[int, PivotCase]]:
    """Every label ``i`` whose two companion angles compare the same way."""
    check_equal_area(p, q)
    t, u = as_triangle(p).angles, as_triangle(q).angles
    out = []
    for i in (1, 2, 3):
        j, k = others(i)
        le = t[j] <= u[j] and t[k] <= u[k]
        ge = t[j] >= u[j] and t[k] >= u[k]
        if le and ge:
            out.append((i, PivotCase.MIXED))
        elif le:
            out.append((i, PivotCase.NESTED))
        elif ge:
            out.append((i, PivotCase.REVERSED))
    return out


def pivot_index(p, q) -> tuple[int, PivotCase]:
    """The smallest pivot label and its case.

    One always exists: three signed angle differences summing to zero cannot
    have every pair of them disagree in sign.
    """
    cands = pivot_candidates(p, q)
    assert cands, "pivot must exist"
    return cands[0]


def pivot_ratio(p, q, i: int, case: PivotCase) -> float:
    """``exp(m)`` read off the pivot edge: ``a_i/a'_i`` (nested), ``a'_i/a_i`` (reversed)."""
    a, b = as_triangle(p).edge(i), as_triangle(q).edge(i)
    if case is PivotCase.NESTED:
        return a / b
    if case is PivotCase.REVERSED:
        return b / a
    return max(a / b, b / a)


# ---------------------------------------------------------------------------
# L on the acute / right / obtuse pieces


def lower_bound_six_ratios(t, u) -> float:
    """Certified lower bound on ``exp(L(T, T'))`` for an acute source ``T``."""
    if not as_triangle(t).is_acute:
        raise NotAcute("the altitude bound needs an acute source triangle")
    return m_ratio(t, u)


def l_distance_acute(p, q, *, strict: bool = False) -> float:
    """``L(P, P') = m(P, P')`` for non-obtuse points of the same area.

    Right triangles are accepted unless ``strict``; use :func:`touches_boundary`
    to flag them.
    """
    for x in (p, q):
        tri = as_triangle(x)
        if not tri.is_non_obtuse or (strict and not tri.is_acute):
            raise NotAcute(f"{'acute' if strict else 'non-obtuse'} triangles required")
    return m_equal_area(p, q)


def touches_boundary(p, q) -> bool:
    return not (as_triangle(p).is_acute and as_triangle(q).is_acute)


def right_triangle_distance(t, u) -> float:
    """``log max(a'_3/a_3, a'_2/a_2)`` for two triangles right-angled at ``v1``."""
    t, u = as_triangle(t), as_triangle(u)
    if t.right_vertex() != 1 or u.right_vertex() != 1:
        raise NotRightAtV1("both triangles need their right angle at v1")
    return math.log(max(u.a3 / t.a3, u.a2 / t.a2))


# ---------------------------------------------------------------------------
# obtuse gap


def point_segment_distance(x: np.ndarray, a: np.ndarray, b: np.ndarray) -> float:
    d = b - a
    s = float(np.clip(np.dot(x - a, d) / np.dot(d, d), 0.0, 1.0))
    return float(np.hypot(*(x - (a + s * d))))


@dataclass(frozen=True)
class GapCertificate:
    lower: float  # certified lower bound on exp(L(T, T'))
    m: float  # m(T, T')
    gap_proven: bool
    indices: tuple[int, ...]  # labels whose foot is interior to its edge

    @property
    def exp_m(self) -> float:
        return math.exp(self.m)


def obtuse_gap_certificate(t: EmbeddedTriangle, u: EmbeddedTriangle) -> GapCertificate:
    """Lower bound on ``exp(L)`` that also works for obtuse pairs.

    For each label ``i`` whose altitude foot ``p_i`` lies inside ``e_i``, any
    label-preserving map sends ``p_i`` into ``e'_i``, so
    ``L >= dist(v'_i, segment e'_i) / h_i``. The edge ratios hold for every
    pair and are folded in. The gap is proven when the bound clears
    ``exp(m)`` by more than ``GAP_MARGIN``.
    """
    tri, tri2 = t.triangle, u.triangle
    qualifying = tuple(i for i in (1, 2, 3) if t.foot_is_interior(i))
    if not qualifying:
        raise NoInteriorFoot("no altitude foot lies inside its edge")
    h = tri.altitudes
    bounds = [b / a for a, b in zip(tri.edges, tri2.edges)]
    for i in qualifying:
        j, k = others(i)
        d = point_segment_distance(u.vertex(i), u.vertex(j), u.vertex(k))
        bounds.append(d / h[i - 1])
    lower = max(bounds)
    em = m_ratio(tri, tri2)
    return GapCertificate(lower, math.log(em), lower > em + GAP_MARGIN, qualifying)


def obtuse_gap_example(equal_area: bool = False) -> tuple[EmbeddedTriangle, EmbeddedTriangle]:
    """A pair with ``exp(m) = 3`` whose certified lower bound is ``2 sqrt 3``.

    Both share ``v2 = (0, 0)`` and ``v3 = (7, 0)``. ``T`` has ``v1 = (sqrt 11, 1)``,
    so ``h1 = 1`` and ``|v1 v2| = 2 sqrt 3``; ``T'`` has ``v1' = (-2, 3)``, so
    ``h1' = 3`` and every point of ``[v2', v3']`` is at least ``sqrt 13`` from
    ``v1'``. With ``equal_area`` the target is shrunk by ``1/sqrt 3`` to match
    areas, giving ``exp(m) = sqrt 3`` against a bound of ``sqrt(13/3)``.
    """
    t = EmbeddedTriangle(np.array([[math.sqrt(11.0), 1.0], [0.0, 0.0], [7.0, 0.0]]))
    u = EmbeddedTriangle(np.array([[-2.0, 3.0], [0.0, 0.0], [7.0, 0.0]]))
    if equal_area:
        u = u.transformed(np.eye(2) / math.sqrt(3.0), np.zeros(2))
    return t, u
