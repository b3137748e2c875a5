import math

import numpy as np
import pytest

from trilip import lipmap as lm
from trilip import metric as mt
from trilip import triangle as tr
from trilip.errors import (
    AltitudeMismatch,
    AngleConditionViolated,
    AreaMismatch,
    NotNested,
    NotRight,
    Obtuse,
    OutsideDomain,
)
from trilip.oracle import sampled_lipschitz
from trilip.sampling import acute_angles, right_angles

R = math.radians
E = tr.EmbeddedTriangle.of


def point(deg, area=0.5):
    return tr.ModuliPoint.from_angles((R(deg[0]), R(deg[1]), math.pi - R(deg[0]) - R(deg[1])), area)


def on_base(deg, base=1.0):
    # v2 at the origin, v3 on the x-axis, v1 above
    t = tr.from_angles((R(deg[0]), R(deg[1]), math.pi - R(deg[0]) - R(deg[1])), 1.0)
    lam = base / t.edges[0]
    a3 = t.edges[2] * lam
    th2 = R(deg[1])
    return E((a3 * math.cos(th2), a3 * math.sin(th2)), (0.0, 0.0), (base, 0.0))


def single(linear):
    t = E((0, 0), (1, 0), (0, 1))
    u = t.transformed(np.asarray(linear, float), np.zeros(2))
    return lm.simplicial_map(t, u, [(t.points, u.points)])


def test_sigma_max_examples():
    assert lm.sigma_max(np.diag([2.0, 0.5])) == 2.0
    c, s = math.cos(R(30)), math.sin(R(30))
    assert lm.sigma_max(np.array([[c, -s], [s, c]])) == pytest.approx(1.0, abs=1e-15)
    want = math.sqrt((3 + math.sqrt(5)) / 2)
    assert lm.sigma_max(np.array([[1.0, 1.0], [0.0, 1.0]])) == pytest.approx(want, rel=1e-15)


def test_sigma_max_matches_svd():
    rng = np.random.default_rng(0)
    for m in rng.normal(size=(500, 2, 2)):
        assert lm.sigma_max(m) == pytest.approx(np.linalg.svd(m, compute_uv=False)[0], rel=1e-13)


def test_lipschitz_constant_single_pieces():
    assert lm.lipschitz_constant(single(np.diag([2.0, 0.5]))) == 2.0
    c, s = math.cos(R(30)), math.sin(R(30))
    assert lm.lipschitz_constant(single([[c, -s], [s, c]])) == pytest.approx(1.0, abs=1e-15)


def test_right_stretch_legs():
    t, u = E((0, 0), (3, 0), (0, 4)), E((0, 0), (6, 0), (0, 2))
    f = lm.right_stretch_map(t, u, 1)
    assert len(f.pieces) == 1
    assert np.allclose(f.pieces[0].linear, np.diag([2.0, 0.5]), atol=1e-15)
    assert f.constant == 2.0
    assert lm.check_map(f).ok


def test_right_stretch_identity_and_rotated():
    t = E((0, 0), (1, 0), (0, 1))
    assert lm.right_stretch_map(t, t, 1).constant == pytest.approx(1.0, abs=1e-15)
    c, s = math.cos(0.7), math.sin(0.7)
    u = t.transformed(np.array([[c, -s], [s, c]]), np.array([3.0, -1.0]))
    assert lm.right_stretch_map(t, u, 1).constant == pytest.approx(1.0, abs=1e-14)


def test_right_stretch_needs_right_angles():
    with pytest.raises(NotRight):
        lm.right_stretch_map(E((0, 0), (1, 0), (0.2, 1)), E((0, 0), (1, 0), (0, 1)), 1)


def test_nested_altitude_identity():
    t = tr.embed(point((80, 60)))
    f = lm.nested_altitude_map(t, t, 1)
    assert len(f.pieces) == 2
    assert f.constant == pytest.approx(1.0, abs=1e-14)


def test_nested_altitude_compresses_equilateral():
    s3 = math.sqrt(3.0)
    t = E((0.0, s3 / 2), (-0.5, 0.0), (0.5, 0.0))
    u = E((0.0, s3 / 2), (-0.3, 0.0), (0.35, 0.0))
    f = lm.nested_altitude_map(t, u, 1)
    assert f.constant <= 1.0 + 1e-12
    for p in f.pieces:
        # fixes the altitude direction, squeezes horizontally
        assert p.linear[1, 1] == pytest.approx(1.0, abs=1e-14)
        assert p.linear[1, 0] == pytest.approx(0.0, abs=1e-14)
    # continuity along the shared altitude
    alt = [t.v1 + s * (t.foot(1) - t.v1) for s in (0.25, 0.5, 0.75)]
    for x in alt:
        assert np.allclose(f.pieces[0](x), f.pieces[1](x), atol=1e-12)
        assert np.allclose(f(x), x, atol=1e-12)
    assert lm.check_map(f).ok


def test_nested_altitude_foot_maps_into_target_edge():
    p, q = point((80, 60)), point((70, 65))
    t = tr.embed(p)
    t = t.transformed(np.eye(2) * (q.altitudes[0] / p.altitudes[0]), np.zeros(2))
    u = tr.embed(q)
    f = lm.nested_altitude_map(t, u, 1)
    y = f(t.foot(1))
    # image of the foot lies on e'_1 between v'_2 and v'_3
    d = u.v3 - u.v2
    s = float(np.dot(y - u.v2, d) / np.dot(d, d))
    assert 0.0 < s < 1.0
    assert abs(d[0] * (y - u.v2)[1] - d[1] * (y - u.v2)[0]) <= 1e-12


def test_nested_altitude_errors():
    p, q = point((80, 60)), point((70, 65))
    with pytest.raises(AltitudeMismatch):
        lm.nested_altitude_map(tr.embed(p), tr.embed(q), 1)
    t = tr.embed(q).transformed(np.eye(2) * (p.altitudes[0] / q.altitudes[0]), np.zeros(2))
    with pytest.raises(AngleConditionViolated):
        lm.nested_altitude_map(t, tr.embed(p), 1)


def test_two_step_identity():
    t = on_base((70, 60))
    f = lm.two_step_shared_edge_map(t, t, 1)
    assert f.constant == pytest.approx(1.0, abs=1e-12)
    assert lm.check_map(f).ok


def test_two_step_example_pair():
    t, u = on_base((70, 60)), on_base((80, 55))
    f = lm.two_step_shared_edge_map(t, u, 1)
    # at most four convex cells; a quadrilateral cell is stored as two triangles
    assert f.distinct_linear_parts() <= 4
    for p in f.pieces:
        assert p.lipschitz <= 1.0 + 1e-12
    assert abs(f.constant - 1.0) <= 1e-12
    assert lm.check_map(f).ok
    assert sampled_lipschitz(f, 4000, seed=1) <= 1.0 + 1e-9


def test_two_step_construction_point_on_edge():
    # the landing point lies on [v1, v_a], strictly before the foot from v_b
    t, u = on_base((70, 60)), on_base((80, 55))
    a, b = lm.shared_edge_order(t, u, 1)
    q = lm._line_intersection(t.vertex(b), u.v1, t.v1, t.vertex(a))
    p = tr.project_to_line(t.vertex(b), t.v1, t.vertex(a))
    s = float(np.dot(q - t.v1, p - t.v1) / np.dot(p - t.v1, p - t.v1))
    assert 0.0 <= s <= 1.0
    span = p - t.v1
    assert abs(span[0] * (q - t.v1)[1] - span[1] * (q - t.v1)[0]) <= 1e-12


def test_two_step_errors():
    t, u = on_base((70, 60)), on_base((80, 55))
    with pytest.raises(AngleConditionViolated):
        lm.two_step_shared_edge_map(u, t, 1)
    with pytest.raises(NotNested):
        lm.two_step_shared_edge_map(t, on_base((80, 55), base=1.1), 1)


def test_best_map_identity():
    p = point((80, 60))
    f, c = lm.best_lipschitz_map(p, p)
    assert c == pytest.approx(1.0, abs=1e-12)
    assert lm.check_map(f).ok


def test_best_map_example():
    p, q = point((80, 60)), point((70, 65))
    f, c = lm.best_lipschitz_map(p, q)
    assert c == pytest.approx(math.exp(mt.m_equal_area(p, q)), rel=1e-9)
    assert lm.check_map(f).ok
    assert np.allclose(f(tr.embed(p).points), tr.embed(q).points, atol=1e-12)
    centroid = f(tr.embed(p).points.mean(axis=0))
    assert lm.barycentric(centroid, tr.embed(q).points).min() > 0


def test_best_map_right_pair_is_the_stretch():
    b = lambda x, y: tr.normalize_to_area(tr.from_edges(math.hypot(x, y), x, y), 0.5)
    p, q = b(1.0, 2.0), b(3.0, 1.0)
    f, c = lm.best_lipschitz_map(p, q)
    assert len(f.pieces) == 1
    assert c == pytest.approx(math.exp(mt.right_triangle_distance(p, q)), rel=1e-12)


def test_best_map_errors():
    with pytest.raises(Obtuse):
        lm.best_lipschitz_map(point((100, 40)), point((60, 60)))
    with pytest.raises(AreaMismatch):
        lm.best_lipschitz_map(point((60, 60)), point((60, 60), area=1.0))


def test_apply_map_outside():
    f = single(np.eye(2))
    with pytest.raises(OutsideDomain):
        f(np.array([1.0, 1.0]))
    assert np.allclose(f(np.array([1.0 + 1e-12, 0.0])), (1.0, 0.0))


def test_certification_on_random_acute_pairs():
    rng = np.random.default_rng(5)
    e = tr.edges_from_angles(acute_angles(rng, 200, margin=1e-3), 0.5)
    for x, y in zip(e[::2], e[1::2]):
        p, q = tr.ModuliPoint.from_edges(*x), tr.ModuliPoint.from_edges(*y)
        f, c = lm.best_lipschitz_map(p, q)
        em = math.exp(mt.m_equal_area(p, q))
        assert abs(c - em) <= 1e-9 * em
        assert mt.lower_bound_six_ratios(p, q) <= c * (1 + 1e-12)
        assert all(pc.det > 0 for pc in f.pieces)
        assert lm.check_map(f).ok


def test_sampled_consistency():
    rng = np.random.default_rng(6)
    e = tr.edges_from_angles(acute_angles(rng, 20, margin=0.05), 0.5)
    for n, (x, y) in enumerate(zip(e[::2], e[1::2])):
        f, c = lm.best_lipschitz_map(tr.ModuliPoint.from_edges(*x), tr.ModuliPoint.from_edges(*y))
        assert sampled_lipschitz(f, 1000, seed=n) <= c + 1e-9


def test_right_boundary_pairs():
    rng = np.random.default_rng(7)
    e = tr.edges_from_angles(right_angles(rng, 40, vertex=2, margin=0.01), 0.5)
    for x, y in zip(e[::2], e[1::2]):
        p, q = tr.ModuliPoint.from_edges(*x), tr.ModuliPoint.from_edges(*y)
        f, c = lm.best_lipschitz_map(p, q)
        assert c == pytest.approx(math.exp(mt.m_equal_area(p, q)), rel=1e-9)


def test_composition_bound():
    p, q, r = point((80, 60)), point((70, 65)), point((55, 75))
    f, cf = lm.best_lipschitz_map(p, q)
    g, cg = lm.best_lipschitz_map(q, r)
    h = lm.compose(f, g)
    assert h.constant <= cf * cg + 1e-12
    assert lm.check_map(h).ok
    assert h.constant >= math.exp(mt.m_equal_area(p, r)) - 1e-9


def test_map_json_shape():
    f, c = lm.best_lipschitz_map(point((80, 60)), point((70, 65)))
    d = f.to_json()
    assert d["constant"] == c
    assert {"cell", "linear", "offset"} == set(d["pieces"][0])
    assert len(d["pieces"][0]["linear"]) == 2
