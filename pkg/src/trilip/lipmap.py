"""Piecewise-affine label-preserving homeomorphisms between triangles.

Every map here is stored flat: a list of triangular source cells, each with
its own affine transform. Constructions are written as simplicial maps
(source cell -> target cell by vertex correspondence), so a piece's linear
part is whatever the correspondence forces and the Lipschitz constant of the
whole map is the largest top singular value over the pieces (the source is
convex and the map continuous).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import metric
from .metric import PivotCase
from .errors import (
    AltitudeMismatch,
    AngleConditionViolated,
    ConstructionError,
    NotNested,
    NotRight,
    Obtuse,
    OutsideDomain,
)
from .triangle import (
    ALGEBRAIC_TOL,
    HALF_PI,
    EmbeddedTriangle,
    as_triangle,
    embed,
    others,
    project_to_line,
    signed_area,
)

# barycentric slack for point location
LOCATE_TOL = 1e-10
# cells smaller than this fraction of the source area are dropped as slivers
SLIVER = 1e-12


def sigma_max(m: np.ndarray) -> float:
    """Largest singular value of a 2x2 matrix, closed form."""
    # half-sum of the conformal and anti-conformal parts; stays accurate when
    # the two singular values nearly coincide
    a, b, c, d = (float(x) for x in np.asarray(m).ravel())
    return 0.5 * (math.hypot(a + d, c - b) + math.hypot(a - d, c + b))


def affine_from_points(src: np.ndarray, dst: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """The affine map sending the three points ``src`` onto ``dst``."""
    src = np.asarray(src, dtype=float)
    dst = np.asarray(dst, dtype=float)
    s = np.column_stack((src[1] - src[0], src[2] - src[0]))
    d = np.column_stack((dst[1] - dst[0], dst[2] - dst[0]))
    linear = np.linalg.solve(s.T, d.T).T
    return linear, dst[0] - linear @ src[0]


def barycentric(points: np.ndarray, tri: np.ndarray) -> np.ndarray:
    """Barycentric coordinates of ``points`` (n, 2) in ``tri`` (3, 2)."""
    p = np.atleast_2d(points)
    a, b, c = tri
    det = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    l1 = ((b[0] - p[:, 0]) * (c[1] - p[:, 1]) - (b[1] - p[:, 1]) * (c[0] - p[:, 0])) / det
    l2 = ((c[0] - p[:, 0]) * (a[1] - p[:, 1]) - (c[1] - p[:, 1]) * (a[0] - p[:, 0])) / det
    return np.column_stack((l1, l2, 1.0 - l1 - l2))


@dataclass(frozen=True, eq=False)
class AffinePiece:
    cell: EmbeddedTriangle
    linear: np.ndarray = field(repr=False)
    offset: np.ndarray = field(repr=False)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x, dtype=float) @ self.linear.T + self.offset

    @property
    def image(self) -> np.ndarray:
        return self(self.cell.points)

    @property
    def lipschitz(self) -> float:
        return sigma_max(self.linear)

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.linear))

    def to_json(self) -> dict:
        return {
            "cell": self.cell.points.tolist(),
            "linear": self.linear.tolist(),
            "offset": self.offset.tolist(),
        }


@dataclass(frozen=True, eq=False)
class PiecewiseAffineMap:
    pieces: tuple[AffinePiece, ...]
    source: EmbeddedTriangle
    target: EmbeddedTriangle

    def __call__(self, x: np.ndarray) -> np.ndarray:
        return apply_map(self, x)

    @property
    def constant(self) -> float:
        return lipschitz_constant(self)

    def distinct_linear_parts(self, tol: float = 1e-12) -> int:
        seen: list[np.ndarray] = []
        for p in self.pieces:
            if not any(np.allclose(p.linear, s, rtol=0, atol=tol) for s in seen):
                seen.append(p.linear)
        return len(seen)

    def to_json(self) -> dict:
        return {
            "source": self.source.points.tolist(),
            "target": self.target.points.tolist(),
            "pieces": [p.to_json() for p in self.pieces],
            "constant": lipschitz_constant(self),
        }


def lipschitz_constant(f: PiecewiseAffineMap) -> float:
    return max(p.lipschitz for p in f.pieces)


def apply_map(f: PiecewiseAffineMap, x: np.ndarray) -> np.ndarray:
    """Evaluate ``f``; on shared boundaries the lowest-index piece wins."""
    pts = np.asarray(x, dtype=float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    out = np.full_like(pts, np.nan)
    todo = np.ones(len(pts), dtype=bool)
    for piece in f.pieces:
        if not todo.any():
            break
        lam = barycentric(pts[todo], piece.cell.points)
        hit = lam.min(axis=1) >= -LOCATE_TOL
        idx = np.flatnonzero(todo)[hit]
        out[idx] = piece(pts[idx])
        todo[idx] = False
    if todo.any():
        raise OutsideDomain(f"{int(todo.sum())} point(s) outside the source triangle")
    return out[0] if single else out


# ---------------------------------------------------------------------------
# building blocks


def _ccw(src: np.ndarray, dst: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    if signed_area(src) < 0.0:
        return src[::-1], dst[::-1]
    return src, dst


def _piece(src: np.ndarray, dst: np.ndarray) -> AffinePiece:
    linear, offset = affine_from_points(src, dst)
    return AffinePiece(EmbeddedTriangle(np.asarray(src, dtype=float)), linear, offset)


def simplicial_map(
    source: EmbeddedTriangle,
    target: EmbeddedTriangle,
    cells: Iterable[tuple[Sequence, Sequence]],
) -> PiecewiseAffineMap:
    """Build a map from ``(source cell, target cell)`` vertex correspondences.

    Zero-area source cells are dropped. A non-degenerate source cell whose
    image is flat or flipped means the correspondence is not a homeomorphism.
    """
    floor = SLIVER * source.signed_area
    tfloor = SLIVER * target.signed_area
    pieces = []
    for src, dst in cells:
        src, dst = _ccw(np.asarray(src, dtype=float), np.asarray(dst, dtype=float))
        if signed_area(src) <= floor:
            continue
        if signed_area(dst) <= tfloor:
            raise ConstructionError("a cell collapses or flips under the correspondence")
        pieces.append(_piece(src, dst))
    return PiecewiseAffineMap(tuple(pieces), source, target)


def _clip(poly: list[np.ndarray], tri: np.ndarray, eps: float) -> list[np.ndarray]:
    """Sutherland-Hodgman clip of a convex CCW polygon by a CCW triangle."""
    out = poly
    for e in range(3):
        a, b = tri[e], tri[(e + 1) % 3]
        d = b - a
        n = math.hypot(*d)

        def side(p, a=a, d=d, n=n):
            return (d[0] * (p[1] - a[1]) - d[1] * (p[0] - a[0])) / n

        src, out = out, []
        if not src:
            break
        for idx, cur in enumerate(src):
            prev = src[idx - 1]
            sc, sp = side(cur), side(prev)
            if sc >= -eps:
                if sp < -eps:
                    out.append(prev + (cur - prev) * (sp / (sp - sc)))
                out.append(cur)
            elif sp >= -eps:
                out.append(prev + (cur - prev) * (sp / (sp - sc)))
    # drop repeated vertices
    clean: list[np.ndarray] = []
    for p in out:
        if not clean or math.hypot(*(p - clean[-1])) > eps:
            clean.append(p)
    if len(clean) > 1 and math.hypot(*(clean[0] - clean[-1])) <= eps:
        clean.pop()
    return clean


def compose(f: PiecewiseAffineMap, g: PiecewiseAffineMap) -> PiecewiseAffineMap:
    """``g o f`` flattened onto the common refinement of the two cell complexes."""
    scale = float(np.ptp(f.target.points, axis=0).max())
    eps = 1e-13 * scale
    floor = SLIVER * f.source.signed_area
    pieces = []
    for fp in f.pieces:
        inv = np.linalg.inv(fp.linear)
        img = [row for row in fp.image]
        for gp in g.pieces:
            poly = _clip(img, gp.cell.points, eps)
            if len(poly) < 3:
                continue
            back = [inv @ (y - fp.offset) for y in poly]
            linear = gp.linear @ fp.linear
            offset = gp.linear @ fp.offset + gp.offset
            for t in range(1, len(back) - 1):
                cell = np.array([back[0], back[t], back[t + 1]])
                if signed_area(cell) <= floor:
                    continue
                pieces.append(AffinePiece(EmbeddedTriangle(cell), linear, offset))
    return PiecewiseAffineMap(tuple(pieces), f.source, g.target)


def precompose_affine(
    f: PiecewiseAffineMap, linear: np.ndarray, offset: np.ndarray, source: EmbeddedTriangle
) -> PiecewiseAffineMap:
    """``f o A`` where ``A x = linear x + offset`` carries ``source`` onto ``f.source``."""
    inv = np.linalg.inv(linear)
    pieces = tuple(
        AffinePiece(
            EmbeddedTriangle((p.cell.points - offset) @ inv.T),
            p.linear @ linear,
            p.linear @ offset + p.offset,
        )
        for p in f.pieces
    )
    return PiecewiseAffineMap(pieces, source, f.target)


def postcompose_affine(
    f: PiecewiseAffineMap, linear: np.ndarray, offset: np.ndarray, target: EmbeddedTriangle
) -> PiecewiseAffineMap:
    """``B o f`` where ``B x = linear x + offset`` carries ``f.target`` onto ``target``."""
    pieces = tuple(
        AffinePiece(p.cell, linear @ p.linear, linear @ p.offset + offset) for p in f.pieces
    )
    return PiecewiseAffineMap(pieces, f.source, target)


def frame(t: EmbeddedTriangle, j: int, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Rigid motion putting ``v_j`` at the origin and ``v_k`` on the positive x-axis."""
    d = t.vertex(k) - t.vertex(j)
    c, s = d / math.hypot(*d)
    rot = np.array([[c, s], [-s, c]])
    return rot, -rot @ t.vertex(j)


# ---------------------------------------------------------------------------
# the constructions


def _angles(t: EmbeddedTriangle):
    return t.triangle.angles


def right_stretch_map(t: EmbeddedTriangle, u: EmbeddedTriangle, right_vertex: int = 1) -> PiecewiseAffineMap:
    """The single affine stretch between two triangles right-angled at the same label.

    With the right angle at the origin and the legs on the axes it is
    ``(x, y) -> (r x, s y)``, so its constant is the larger leg ratio.
    """
    if t.triangle.right_vertex() != right_vertex or u.triangle.right_vertex() != right_vertex:
        raise NotRight(f"both triangles need a right angle at v{right_vertex}")
    return simplicial_map(t, u, [(t.points, u.points)])


def nested_altitude_map(t: EmbeddedTriangle, u: EmbeddedTriangle, pivot: int = 1) -> PiecewiseAffineMap:
    """Split both triangles along the altitude from ``v_pivot`` and stretch each half.

    Needs ``theta_j <= theta'_j``, ``theta_k <= theta'_k`` and equal altitudes
    from the pivot; then every piece is 1-Lipschitz. The embeddings may sit
    anywhere, the vertex correspondence takes care of positioning.
    """
    i = pivot
    j, k = others(i)
    ta, ua = _angles(t), _angles(u)
    if ta[j] > ua[j] + ALGEBRAIC_TOL or ta[k] > ua[k] + ALGEBRAIC_TOL:
        raise AngleConditionViolated(
            f"need theta_{j} <= theta'_{j} and theta_{k} <= theta'_{k}"
        )
    h, h2 = t.triangle.altitudes[i - 1], u.triangle.altitudes[i - 1]
    if abs(h - h2) > ALGEBRAIC_TOL * max(h, h2):
        raise AltitudeMismatch(f"altitudes from v{i} differ: {h!r} vs {h2!r}")
    p, p2 = t.foot(i), u.foot(i)
    vi, vj, vk = t.vertex(i), t.vertex(j), t.vertex(k)
    wi, wj, wk = u.vertex(i), u.vertex(j), u.vertex(k)
    return simplicial_map(t, u, [([vi, vj, p], [wi, wj, p2]), ([vi, p, vk], [wi, p2, wk])])


def _line_intersection(a, b, c, d) -> np.ndarray:
    """Intersection of line(a, b) with line(c, d)."""
    m = np.column_stack((b - a, c - d))
    s = np.linalg.solve(m, c - a)[0]
    return a + s * (b - a)


def shared_edge_order(t: EmbeddedTriangle, u: EmbeddedTriangle, pivot: int) -> tuple[int, int]:
    """Pick which non-pivot edge the first step slides along.

    Sliding ``v_i`` along ``[v_i, v_a]`` towards the line ``v_b v'_i`` stays
    1-Lipschitz iff the landing point does not pass the foot from ``v_b``,
    i.e. ``theta_a + theta'_b >= pi/2``. For non-obtuse pairs at least one of
    the two orders qualifies, since the four angles involved sum to at least pi.
    """
    j, k = others(pivot)
    ta, ua = _angles(t), _angles(u)
    return (j, k) if ta[j] + ua[k] >= HALF_PI else (k, j)


def two_step_shared_edge_map(
    t: EmbeddedTriangle,
    u: EmbeddedTriangle,
    pivot: int = 1,
    order: tuple[int, int] | None = None,
) -> PiecewiseAffineMap:
    """``h o g`` for ``T' inside T`` sharing the pivot edge ``e_i``.

    ``g`` fixes the half of ``T`` cut off by the altitude from ``v_b`` onto
    ``[v_i, v_a]`` and squeezes the other half so ``v_i`` lands on ``q``, the
    point where line ``v_b v'_i`` meets ``[v_i, v_a]``. ``h`` then fixes the
    part of ``q v_a v_b`` beyond the altitude from ``v_a`` onto line
    ``v_b q`` and pulls ``q`` back to ``v'_i``. Both are right-triangle
    stretches, so the composite is 1-Lipschitz.
    """
    i = pivot
    j, k = others(i)
    scale = float(np.ptp(t.points, axis=0).max())
    tol = ALGEBRAIC_TOL * scale
    if (np.hypot(*(t.vertex(j) - u.vertex(j))) > tol
            or np.hypot(*(t.vertex(k) - u.vertex(k))) > tol):
        raise NotNested(f"the triangles must share v{j} and v{k}")
    ta, ua = _angles(t), _angles(u)
    if ta[j] < ua[j] - ALGEBRAIC_TOL or ta[k] < ua[k] - ALGEBRAIC_TOL:
        raise AngleConditionViolated(
            f"need theta_{j} >= theta'_{j} and theta_{k} >= theta'_{k}"
        )
    if barycentric(u.vertex(i), t.points).min() < -LOCATE_TOL:
        raise NotNested("T' is not contained in T")

    a, b = order if order is not None else shared_edge_order(t, u, i)
    if {a, b} != {j, k}:
        raise ValueError(f"order must be a permutation of ({j}, {k})")
    vi, va, vb = t.vertex(i), t.vertex(a), t.vertex(b)
    wi = u.vertex(i)

    p = project_to_line(vb, vi, va)
    if np.hypot(*(wi - vi)) <= tol:
        q = vi.copy()
    else:
        q = _line_intersection(vb, wi, vi, va)
    span = p - vi
    if np.dot(span, span) <= tol * tol:
        if np.hypot(*(q - vi)) > tol:
            raise ConstructionError("right angle at the pivot leaves no room to slide")
    else:
        s = float(np.dot(q - vi, span) / np.dot(span, span))
        if not (-ALGEBRAIC_TOL <= s <= 1.0 + ALGEBRAIC_TOL):
            raise ConstructionError(
                f"q lies outside [v{i}, foot] (parameter {s:.6g}); try the other order"
            )

    mid_pts = t.points.copy()
    mid_pts[i - 1] = q
    mid = EmbeddedTriangle(mid_pts)
    g = simplicial_map(t, mid, [([p, va, vb], [p, va, vb]), ([vi, p, vb], [q, p, vb])])

    p2 = project_to_line(va, vb, q)
    h = simplicial_map(mid, u, [([p2, va, vb], [p2, va, vb]), ([q, va, p2], [wi, va, p2])])
    return compose(g, h)


def best_lipschitz_map(p, q) -> tuple[PiecewiseAffineMap, float]:
    """A best Lipschitz map between the canonical embeddings of two points.

    Both points must be non-obtuse with the same area. Returns the map and its
    certified constant, which equals ``exp(m(P, P'))``.
    """
    metric.check_equal_area(p, q)
    tp, tq = as_triangle(p), as_triangle(q)
    if not (tp.is_non_obtuse and tq.is_non_obtuse):
        raise Obtuse("best Lipschitz maps are constructed for non-obtuse pairs only")
    s, s2 = embed(tp), embed(tq)

    rv = tp.right_vertex()
    if rv is not None and rv == tq.right_vertex():
        f = right_stretch_map(s, s2, rv)
        return f, lipschitz_constant(f)

    i, case = metric.pivot_index(p, q)
    j, k = others(i)
    if case is PivotCase.REVERSED:
        lam = tq.edge(i) / tp.edge(i)
        rot, off = frame(s, j, k)
        work = s.transformed(lam * rot, lam * off)
        rot2, off2 = frame(s2, j, k)
        work2 = s2.transformed(rot2, off2)
        g = two_step_shared_edge_map(work, work2, i)
        f = precompose_affine(g, lam * rot, lam * off, s)
        f = postcompose_affine(f, rot2.T, -rot2.T @ off2, s2)
    else:
        # nested, or all angles equal (then either branch is an isometry)
        lam = tq.altitudes[i - 1] / tp.altitudes[i - 1]
        work = s.transformed(lam * np.eye(2), np.zeros(2))
        g = nested_altitude_map(work, s2, i)
        f = precompose_affine(g, lam * np.eye(2), np.zeros(2), s)
    return f, lipschitz_constant(f)


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class MapReport:
    orientation: bool
    source_tiling: bool
    image_tiling: bool
    labels: bool
    continuity: bool
    max_continuity_error: float

    @property
    def ok(self) -> bool:
        return (self.orientation and self.source_tiling and self.image_tiling
                and self.labels and self.continuity)


def _tiles(cells: list[np.ndarray], whole: np.ndarray, rtol: float) -> bool:
    total = sum(signed_area(c) for c in cells)
    if abs(total - signed_area(whole)) > rtol * signed_area(whole):
        return False
    for c in cells:
        if barycentric(c, whole).min() < -LOCATE_TOL:
            return False
    # each cell centroid lies strictly inside exactly one cell
    for c in cells:
        g = c.mean(axis=0)
        hits = sum(barycentric(g, d).min() > LOCATE_TOL for d in cells)
        if hits != 1:
            return False
    return True


def check_map(f: PiecewiseAffineMap, tol: float = 1e-10) -> MapReport:
    """Check orientation, both tilings, vertex labels and continuity across cells.

    Continuity is sampled at the quarter points of every cell edge against
    every other cell containing the sample.
    """
    scale = float(np.ptp(f.target.points, axis=0).max())
    orientation = all(p.det > 0.0 for p in f.pieces)
    src_ok = _tiles([p.cell.points for p in f.pieces], f.source.points, 1e-9)
    img_ok = _tiles([p.image for p in f.pieces], f.target.points, 1e-9)
    labels = bool(np.allclose(apply_map(f, f.source.points), f.target.points,
                              rtol=0, atol=tol * max(scale, 1.0)))
    worst = 0.0
    for n, p in enumerate(f.pieces):
        pts = p.cell.points
        for e in range(3):
            a, b = pts[e], pts[(e + 1) % 3]
            samples = np.array([a + s * (b - a) for s in (0.25, 0.5, 0.75)])
            own = p(samples)
            for m, other in enumerate(f.pieces):
                if m == n:
                    continue
                inside = barycentric(samples, other.cell.points).min(axis=1) >= -LOCATE_TOL
                if inside.any():
                    diff = np.hypot(*(other(samples[inside]) - own[inside]).T)
                    worst = max(worst, float(diff.max()))
    return MapReport(orientation, src_ok, img_ok, labels,
                     worst <= tol * max(scale, 1.0), worst)
