"""Numerical cross-checks for the certified Lipschitz constants.

``sampled_lipschitz`` estimates ``L(f)`` from below by measuring random point
pairs. ``pa_family_search`` bounds the best constant from above by searching
a small family of maps: one interior point in each triangle, coned to the
vertices, affine on the three resulting cells.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import minimize

from .lipmap import PiecewiseAffineMap, apply_map, simplicial_map
from .triangle import EmbeddedTriangle

GENERATOR = "numpy.random.PCG64"
# pairs closer than this fraction of the diameter are discarded (cancellation)
MIN_SEPARATION = 1e-3


def _uniform_in(tri: np.ndarray, n: int, rng: np.random.Generator) -> np.ndarray:
    r1 = np.sqrt(rng.random(n))
    r2 = rng.random(n)
    w = np.column_stack((1.0 - r1, r1 * (1.0 - r2), r1 * r2))
    return w @ tri


def sampled_lipschitz(f: PiecewiseAffineMap, pairs: int = 10_000, seed: int = 0) -> float:
    """Largest ``|f(x) - f(y)| / |x - y|`` over random pairs.

    Half the pairs are uniform in the source triangle; the other half are
    split evenly over the pieces with both points in the same cell, so the
    steepest piece is always probed. Deterministic for a given seed.
    """
    rng = np.random.default_rng(seed)
    src = f.source.points
    diam = max(np.hypot(*(src[a] - src[b])) for a, b in ((0, 1), (1, 2), (2, 0)))
    half = pairs // 2
    xs = [_uniform_in(src, half, rng)]
    ys = [_uniform_in(src, half, rng)]
    per = max(1, (pairs - half) // len(f.pieces))
    for p in f.pieces:
        xs.append(_uniform_in(p.cell.points, per, rng))
        ys.append(_uniform_in(p.cell.points, per, rng))
    x, y = np.vstack(xs), np.vstack(ys)
    d = np.hypot(*(x - y).T)
    keep = d > MIN_SEPARATION * diam
    x, y, d = x[keep], y[keep], d[keep]
    if len(d) == 0:
        return 0.0
    return float((np.hypot(*(apply_map(f, x) - apply_map(f, y)).T) / d).max())


# ---------------------------------------------------------------------------
# one-Steiner-point search

_CELLS = ((0, 1), (1, 2), (2, 0))


def _sigma_batch(m: np.ndarray) -> np.ndarray:
    a, b, c, d = m[..., 0, 0], m[..., 0, 1], m[..., 1, 0], m[..., 1, 1]
    return 0.5 * (np.hypot(a + d, c - b) + np.hypot(a - d, c + b))


def fan_constant(t: np.ndarray, u: np.ndarray, s: np.ndarray, s2: np.ndarray) -> np.ndarray:
    """Lipschitz constant of the fan map for each row of Steiner points ``s -> s2``."""
    s, s2 = np.atleast_2d(s), np.atleast_2d(s2)
    out = np.zeros(len(s))
    for a, b in _CELLS:
        src = np.stack((t[a] - s, t[b] - s), axis=-1)
        dst = np.stack((u[a] - s2, u[b] - s2), axis=-1)
        lin = dst @ np.linalg.inv(src)
        out = np.maximum(out, _sigma_batch(lin))
    return out


def fan_map(t: EmbeddedTriangle, u: EmbeddedTriangle, s, s2) -> PiecewiseAffineMap:
    """The map coning ``s`` to the vertices of ``t`` onto ``s2`` coned in ``u``."""
    s, s2 = np.asarray(s, float), np.asarray(s2, float)
    cells = [([s, t.points[a], t.points[b]], [s2, u.points[a], u.points[b]]) for a, b in _CELLS]
    return simplicial_map(t, u, cells)


def lattice(d: int) -> np.ndarray:
    """Interior barycentric points ``(i, j, k) / d`` with ``i, j, k >= 1``."""
    pts = [(i, j, d - i - j) for i in range(1, d - 1) for j in range(1, d - i)]
    return np.array(pts, dtype=float) / d


def _to_weights(z: np.ndarray) -> np.ndarray:
    # softmax with the first logit pinned at zero
    e = np.exp(np.concatenate(([0.0], z)) - max(0.0, z.max()))
    return e / e.sum()


def _to_logits(w: np.ndarray) -> np.ndarray:
    return np.log(w[1:] / w[0])


def pa_family_search(t: EmbeddedTriangle, u: EmbeddedTriangle, grid: int = 8) -> float:
    """Upper bound on the best Lipschitz constant from the one-Steiner-point family.

    For each lattice resolution ``d = 3..grid`` the best pair of lattice
    points seeds a Nelder-Mead descent; the result is the best value over
    all resolutions, so it cannot increase as ``grid`` grows.
    """
    tp, up = t.points, u.points
    best = np.inf
    for d in range(3, max(grid, 3) + 1):
        w = lattice(d)
        pts, pts2 = w @ tp, w @ up
        n = len(w)
        ii, jj = np.divmod(np.arange(n * n), n)
        vals = fan_constant(tp, up, pts[ii], pts2[jj])
        # argmin picks the first minimum, i.e. the lexicographically smallest pair
        k = int(np.argmin(vals))
        z0 = np.concatenate((_to_logits(w[ii[k]]), _to_logits(w[jj[k]])))

        def objective(z):
            s = _to_weights(z[:2]) @ tp
            s2 = _to_weights(z[2:]) @ up
            return float(fan_constant(tp, up, s, s2)[0])

        res = minimize(objective, z0, method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 4000})
        best = min(best, float(vals[k]), float(res.fun))
    return best
