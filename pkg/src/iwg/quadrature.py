"""Quadrature on triangles, simple polygons, and straight edges.

Triangle rules are symmetric Gauss rules with all-positive weights, stored
as barycentric coordinates and weights summing to 1 (fractions of the
triangle area). Polygon rules fan-triangulate from the centroid and fall
back to ear clipping when the fan degenerates (non-star-shaped polygon).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class QuadratureError(ValueError):
    pass


def _sym3(a: float) -> list[tuple[float, float, float]]:
    b = 1.0 - 2.0 * a
    return [(b, a, a), (a, b, a), (a, a, b)]


def _sym6(a: float, b: float) -> list[tuple[float, float, float]]:
    c = 1.0 - a - b
    return [(a, b, c), (a, c, b), (b, a, c), (b, c, a), (c, a, b), (c, b, a)]


# degree -> (barycentric points, weights); weights sum to 1
_TRIANGLE_RULES: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _build_triangle_rules() -> None:
    rules: dict[int, tuple[list, list]] = {}

    # degree 2: 3 points
    pts = _sym3(1.0 / 6.0)
    rules[2] = (pts, [1.0 / 3.0] * 3)

    # degree 4: 6 points (used for degree-3 requests too; the classical
    # degree-3 rule has a negative weight)
    pts = _sym3(0.445948490915965) + _sym3(0.091576213509771)
    w = [0.223381589678011] * 3 + [0.109951743655322] * 3
    rules[4] = (pts, w)

    # degree 5: 7 points
    pts = (
        [(1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)]
        + _sym3(0.470142064105115)
        + _sym3(0.101286507323456)
    )
    w = [0.225] + [0.132394152788506] * 3 + [0.125939180544827] * 3
    rules[5] = (pts, w)

    # degree 6: 12 points
    pts = (
        _sym3(0.249286745170910)
        + _sym3(0.063089014491502)
        + _sym6(0.310352451033785, 0.636502499121399)
    )
    w = (
        [0.116786275726379] * 3
        + [0.050844906370207] * 3
        + [0.082851075618374] * 6
    )
    rules[6] = (pts, w)

    for deg, (p, w) in rules.items():
        wa = np.array(w)
        wa = wa / wa.sum()  # remove table round-off in the weight sum
        _TRIANGLE_RULES[deg] = (np.array(p), wa)


_build_triangle_rules()


def triangle_rule(degree: int) -> tuple[np.ndarray, np.ndarray]:
    """Barycentric points and weights, exact to the requested degree."""
    if degree <= 2:
        return _TRIANGLE_RULES[2]
    if degree <= 4:
        return _TRIANGLE_RULES[4]
    if degree == 5:
        return _TRIANGLE_RULES[5]
    if degree == 6:
        return _TRIANGLE_RULES[6]
    raise QuadratureError(f"no triangle rule of degree {degree} (supported: 2..6)")


@dataclass
class QuadratureRule:
    """Points (m, 2) and positive weights (m,) summing to the region area."""

    points: np.ndarray
    weights: np.ndarray

    @property
    def area(self) -> float:
        return float(self.weights.sum())

    def integrate(self, f) -> float:
        vals = f(self.points[:, 0], self.points[:, 1])
        return float(np.dot(self.weights, vals))


def _signed_area(tri: np.ndarray) -> float:
    return 0.5 * (
        (tri[1, 0] - tri[0, 0]) * (tri[2, 1] - tri[0, 1])
        - (tri[2, 0] - tri[0, 0]) * (tri[1, 1] - tri[0, 1])
    )


def _ear_clip(poly: np.ndarray) -> list[np.ndarray]:
    """Triangulate a simple CCW polygon into ears; O(k^2), k is tiny here."""
    idx = list(range(len(poly)))
    tris = []
    guard = 0
    while len(idx) > 3:
        guard += 1
        if guard > 10000:
            raise QuadratureError("ear clipping failed; polygon may self-intersect")
        found = False
        for k in range(len(idx)):
            i0, i1, i2 = idx[k - 1], idx[k], idx[(k + 1) % len(idx)]
            tri = poly[[i0, i1, i2]]
            if _signed_area(tri) <= 0.0:
                continue
            # no other active vertex inside the candidate ear
            ok = True
            for j in idx:
                if j in (i0, i1, i2):
                    continue
                p = poly[j]
                s0 = _signed_area(np.array([tri[0], tri[1], p]))
                s1 = _signed_area(np.array([tri[1], tri[2], p]))
                s2 = _signed_area(np.array([tri[2], tri[0], p]))
                if s0 >= 0 and s1 >= 0 and s2 >= 0:
                    ok = False
                    break
            if ok:
                tris.append(tri)
                idx.pop(k)
                found = True
                break
        if not found:
            raise QuadratureError("ear clipping failed; polygon may self-intersect")
    tris.append(poly[idx])
    return tris


def _triangulate(poly: np.ndarray) -> list[np.ndarray]:
    centroid = poly.mean(axis=0)
    tris = []
    k = len(poly)
    for i in range(k):
        tri = np.array([centroid, poly[i], poly[(i + 1) % k]])
        tris.append(tri)
    areas = np.array([_signed_area(t) for t in tris])
    total = areas.sum()
    if total <= 0.0:
        raise QuadratureError("polygon is not CCW or is degenerate")
    # fan from the vertex-average centroid needs every triangle positive;
    # otherwise the polygon is not star-shaped around it and we ear-clip
    if areas.min() <= 1e-14 * total:
        return _ear_clip(poly)
    return tris


def polygon_quadrature(polygon: np.ndarray, degree: int) -> QuadratureRule:
    """Quadrature over a simple CCW polygon, exact to `degree`.

    Weights are positive and sum to the polygon area.
    """
    poly = np.asarray(polygon, dtype=float)
    if len(poly) < 3:
        raise QuadratureError("polygon needs at least 3 vertices")
    bary, w = triangle_rule(degree)
    pts_list = []
    wts_list = []
    for tri in _triangulate(poly):
        a = _signed_area(tri)
        if a < 1e-300:
            raise QuadratureError("degenerate polygon")
        pts_list.append(bary @ tri)
        wts_list.append(w * a)
    return QuadratureRule(np.vstack(pts_list), np.concatenate(wts_list))


def segment_rule(p0, p1, degree: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre points (m, 2) and weights summing to the segment length."""
    p0 = np.asarray(p0, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    npts = max(1, (degree + 2) // 2)
    t, w = np.polynomial.legendre.leggauss(npts)
    t = 0.5 * (t + 1.0)  # map [-1,1] -> [0,1]
    pts = p0[None, :] + t[:, None] * (p1 - p0)[None, :]
    length = float(np.linalg.norm(p1 - p0))
    return pts, 0.5 * w * length
