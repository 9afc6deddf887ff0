"""Level-set interface geometry: element classification and chord cuts.

Convention: the plus region is {L > 0}, the minus region {L < 0}. Inside an
interface element the interface is replaced by the chord joining its two
edge crossings; the chord normal points from the plus sub-polygon into the
minus one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .mesh import PolygonMesh, _polygon_area, _polygon_centroid

SNAP_REL = 1e-12        # vertex snap threshold, relative to h_T
SMALL_CUT_REL = 1e-10   # sub-polygon area guard, relative to |T|
BISECT_MAX_ITER = 100


class CutTopologyError(RuntimeError):
    """Interface crosses a cell boundary more than twice (mesh too coarse)."""


class LevelSet:
    """Signed scalar field L(x, y); accepts arrays and broadcasts."""

    def __init__(self, func: Callable, name: str = "levelset"):
        self._func = func
        self.name = name

    def __call__(self, x, y):
        return self._func(np.asarray(x, dtype=float), np.asarray(y, dtype=float))

    def at(self, p) -> float:
        p = np.asarray(p, dtype=float)
        return float(self._func(p[0], p[1]))


def edge_intersection(p_a, p_b, levelset: LevelSet, tol: float) -> Optional[np.ndarray]:
    """Bisection root of L along the segment p_a..p_b, or None.

    Returns None when L has the same (strict) sign at both endpoints. The
    tolerance is on the segment parameter. Derivative-free on purpose: L is
    only assumed continuous along edges.
    """
    if tol <= 0.0:
        raise ValueError("tol must be positive")
    p_a = np.asarray(p_a, dtype=float)
    p_b = np.asarray(p_b, dtype=float)
    fa = levelset.at(p_a)
    fb = levelset.at(p_b)
    if fa == 0.0:
        return p_a.copy()
    if fb == 0.0:
        return p_b.copy()
    if (fa > 0.0) == (fb > 0.0):
        return None
    lo, hi = 0.0, 1.0
    flo = fa
    for _ in range(BISECT_MAX_ITER):
        mid = 0.5 * (lo + hi)
        fm = levelset.at(p_a + mid * (p_b - p_a))
        if fm == 0.0:
            return p_a + mid * (p_b - p_a)
        if (fm > 0.0) == (flo > 0.0):
            lo = mid
            flo = fm
        else:
            hi = mid
        if hi - lo <= tol:
            t = 0.5 * (lo + hi)
            return p_a + t * (p_b - p_a)
    raise RuntimeError(
        "edge bisection did not converge; level set may be discontinuous"
    )


@dataclass
class NonInterfaceCut:
    """A cell entirely on one side of the interface."""

    side: int          # +1 or -1
    beta_bar: float    # beta of that side at the cell centroid

    @property
    def is_interface(self) -> bool:
        return False


@dataclass
class InterfaceCut:
    """A cell split by the interface chord into plus and minus sub-polygons."""

    p0: np.ndarray           # chord endpoints, loop-encounter order
    p1: np.ndarray
    x0: np.ndarray           # chord midpoint
    normal: np.ndarray       # unit, points from the plus into the minus side
    tangent: np.ndarray      # unit, (-normal_y, normal_x)
    poly_plus: np.ndarray    # CCW sub-polygon on {L > 0}
    poly_minus: np.ndarray
    area_plus: float
    area_minus: float
    beta_plus_bar: float     # beta^+ at the plus sub-polygon barycenter
    beta_minus_bar: float

    @property
    def is_interface(self) -> bool:
        return True


ElementCut = NonInterfaceCut | InterfaceCut


def barycenter_beta(subpolygon: np.ndarray, beta_side: Callable) -> float:
    """beta of one side frozen at the sub-polygon's area centroid."""
    c = _polygon_centroid(np.asarray(subpolygon, dtype=float))
    return float(beta_side(c[0], c[1]))


def _dedup_loop(points: list[np.ndarray], tol: float) -> np.ndarray:
    out: list[np.ndarray] = []
    for p in points:
        if not out or np.linalg.norm(p - out[-1]) > tol:
            out.append(p)
    if len(out) > 1 and np.linalg.norm(out[0] - out[-1]) <= tol:
        out.pop()
    return np.array(out)


def classify_element(
    mesh: PolygonMesh,
    ci: int,
    levelset: LevelSet,
    beta_plus: Callable,
    beta_minus: Callable,
    tol: float | None = None,
) -> ElementCut:
    """Classify one cell against the level set.

    Vertex values with |L| below 1e-12 h_T are snapped to the sign of L at
    the cell centroid, so an interface grazing a vertex or running along an
    edge never produces sliver sub-polygons. Cells whose snapped signs agree
    are NonInterfaceCut; exactly two sign changes produce an InterfaceCut;
    more raise CutTopologyError.
    """
    coords = mesh.cell_coords(ci)
    h = mesh.diameters[ci]
    area = mesh.areas[ci]
    centroid = mesh.centroids[ci]
    k = len(coords)

    lv = np.asarray(levelset(coords[:, 0], coords[:, 1]), dtype=float)
    lc = levelset.at(centroid)
    snap_tol = SNAP_REL * h
    centroid_sign = 1 if lc >= 0.0 else -1
    signs = np.where(np.abs(lv) < snap_tol, centroid_sign, np.where(lv > 0.0, 1, -1))

    def non_interface(side: int) -> NonInterfaceCut:
        beta = beta_plus if side > 0 else beta_minus
        return NonInterfaceCut(side, float(beta(centroid[0], centroid[1])))

    flips = [i for i in range(k) if signs[i] != signs[(i + 1) % k]]
    if not flips:
        return non_interface(int(signs[0]))
    if len(flips) != 2:
        raise CutTopologyError(
            f"cell {ci}: interface crosses the boundary {len(flips)} times; "
            "refine the mesh"
        )

    if tol is None:
        tol = 1e-13
    crossings = {}
    for i in flips:
        a = coords[i]
        b = coords[(i + 1) % k]
        # snapped endpoints sit on the interface themselves
        if abs(lv[i]) < snap_tol:
            crossings[i] = a.copy()
        elif abs(lv[(i + 1) % k]) < snap_tol:
            crossings[i] = b.copy()
        else:
            p = edge_intersection(a, b, levelset, tol)
            if p is None:
                # raw signs agreed but snapped signs differ: take the
                # endpoint nearest the zero set
                p = a.copy() if abs(lv[i]) < abs(lv[(i + 1) % k]) else b.copy()
            crossings[i] = p

    plus_pts: list[np.ndarray] = []
    minus_pts: list[np.ndarray] = []
    chord_pts: list[np.ndarray] = []
    for i in range(k):
        (plus_pts if signs[i] > 0 else minus_pts).append(coords[i])
        if i in crossings:
            p = crossings[i]
            plus_pts.append(p)
            minus_pts.append(p)
            chord_pts.append(p)

    dedup_tol = 1e-14 * h
    poly_plus = _dedup_loop(plus_pts, dedup_tol)
    poly_minus = _dedup_loop(minus_pts, dedup_tol)
    if len(poly_plus) < 3 or len(poly_minus) < 3:
        return non_interface(1 if len(poly_minus) < 3 else -1)
    area_plus = _polygon_area(poly_plus)
    area_minus = _polygon_area(poly_minus)
    if min(area_plus, area_minus) < SMALL_CUT_REL * area:
        return non_interface(1 if area_plus >= area_minus else -1)

    p0, p1 = chord_pts
    x0 = 0.5 * (p0 + p1)
    d = p1 - p0
    d = d / np.linalg.norm(d)
    normal = np.array([d[1], -d[0]])
    # orient so the normal points from the plus side into the minus side
    if np.dot(normal, _polygon_centroid(poly_minus) - x0) < 0.0:
        normal = -normal
    tangent = np.array([-normal[1], normal[0]])

    return InterfaceCut(
        p0=p0,
        p1=p1,
        x0=x0,
        normal=normal,
        tangent=tangent,
        poly_plus=poly_plus,
        poly_minus=poly_minus,
        area_plus=float(area_plus),
        area_minus=float(area_minus),
        beta_plus_bar=barycenter_beta(poly_plus, beta_plus),
        beta_minus_bar=barycenter_beta(poly_minus, beta_minus),
    )


def classify_all(
    mesh: PolygonMesh,
    levelset: LevelSet,
    beta_plus: Callable,
    beta_minus: Callable,
) -> list[ElementCut]:
    return [
        classify_element(mesh, ci, levelset, beta_plus, beta_minus)
        for ci in range(mesh.n_cells)
    ]
