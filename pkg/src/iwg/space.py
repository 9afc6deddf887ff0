"""Degrees of freedom, edge averages, and local L2 projections.

A weak Galerkin function is a pair {v0, vpartial}: three interior
coefficients per cell in the element basis plus one constant per edge.
Numbering is deterministic: all interior unknowns first (cell-major), then
one unknown per edge in edge-index order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .basis import ElementBasis, sub_regions
from .geometry import LevelSet, edge_intersection
from .mesh import PolygonMesh
from .quadrature import polygon_quadrature, segment_rule


class DofMap:
    """Global indices: interior DOFs [0, 3 nc), edge DOFs [3 nc, 3 nc + ne)."""

    def __init__(self, mesh: PolygonMesh):
        self.n_cells = mesh.n_cells
        self.n_edges = mesh.n_edges
        self.n_interior = 3 * mesh.n_cells
        self.n_dofs = self.n_interior + mesh.n_edges
        self.boundary_edge = mesh.boundary_edge.copy()
        self._cell_edges = mesh.cell_edges

    def interior_dofs(self, ci: int) -> np.ndarray:
        return np.arange(3 * ci, 3 * ci + 3)

    def edge_dof(self, ei: int) -> int:
        return self.n_interior + ei

    def cell_dofs(self, ci: int) -> np.ndarray:
        """Local-to-global map: 3 interior DOFs then edges in loop order."""
        return np.concatenate(
            [self.interior_dofs(ci), self.n_interior + self._cell_edges[ci]]
        )

    @property
    def boundary_dofs(self) -> np.ndarray:
        return self.n_interior + np.flatnonzero(self.boundary_edge)

    @property
    def free_dofs(self) -> np.ndarray:
        mask = np.ones(self.n_dofs, dtype=bool)
        mask[self.boundary_dofs] = False
        return np.flatnonzero(mask)


@dataclass
class WgFunction:
    """Coefficients of a weak Galerkin function."""

    v0: np.ndarray        # (n_cells, 3) interior coefficients, element basis
    vpartial: np.ndarray  # (n_edges,) edge constants

    def __sub__(self, other: "WgFunction") -> "WgFunction":
        return WgFunction(self.v0 - other.v0, self.vpartial - other.vpartial)

    @classmethod
    def from_vector(cls, x: np.ndarray, dofs: DofMap) -> "WgFunction":
        v0 = x[: dofs.n_interior].reshape(dofs.n_cells, 3)
        return cls(v0.copy(), x[dofs.n_interior :].copy())

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.v0.ravel(), self.vpartial])


def build_dof_map(mesh: PolygonMesh) -> DofMap:
    return DofMap(mesh)


def edge_chord_pieces(basis: ElementBasis, a: np.ndarray, b: np.ndarray):
    """Parameter sub-intervals of [0,1] on which the basis is affine."""
    if not basis.is_interface:
        return [(0.0, 1.0)]
    cut = basis.cut
    g0 = float(np.dot(cut.normal, a - cut.x0))
    g1 = float(np.dot(cut.normal, b - cut.x0))
    if g0 * g1 < 0.0:
        s = g0 / (g0 - g1)
        return [(0.0, s), (s, 1.0)]
    return [(0.0, 1.0)]


def edge_average_basis(basis: ElementBasis, a, b) -> np.ndarray:
    """Exact averages of the 3 basis functions along the segment a..b.

    The basis is affine on each side of the chord, so each piece integrates
    exactly as its midpoint value times its length.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    avg = np.zeros(3)
    for t0, t1 in edge_chord_pieces(basis, a, b):
        tm = 0.5 * (t0 + t1)
        pm = a + tm * (b - a)
        avg += (t1 - t0) * basis.eval(pm[0], pm[1])
    return avg


def edge_average_function(
    u: Callable,
    a,
    b,
    levelset: Optional[LevelSet] = None,
    degree: int = 6,
) -> float:
    """Average of u along the segment a..b.

    When a level set is given and changes sign along the edge, the integral
    is split at the crossing so each Gauss rule sees a smooth branch.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    breakpoints = [a, b]
    if levelset is not None:
        p = None
        la, lb = levelset.at(a), levelset.at(b)
        if la * lb < 0.0:
            p = edge_intersection(a, b, levelset, 1e-13)
        if p is not None:
            breakpoints = [a, p, b]
    total = 0.0
    length = 0.0
    for q0, q1 in zip(breakpoints[:-1], breakpoints[1:]):
        pts, w = segment_rule(q0, q1, degree)
        total += float(np.dot(w, u(pts[:, 0], pts[:, 1])))
        length += float(w.sum())
    return total / length


def element_mass_matrix(basis: ElementBasis, cell_coords: np.ndarray) -> np.ndarray:
    """Exact 3x3 mass matrix of the element basis (split over sub-polygons)."""
    m = np.zeros((3, 3))
    for poly, _side in sub_regions(basis, cell_coords):
        rule = polygon_quadrature(poly, 2)  # integrands are quadratic: exact
        vals = basis.eval(rule.points[:, 0], rule.points[:, 1])  # (m, 3)
        m += (vals * rule.weights[:, None]).T @ vals
    return m


def project_Q0(
    basis: ElementBasis,
    cell_coords: np.ndarray,
    u: Callable,
    degree: int = 4,
) -> np.ndarray:
    """L2 projection of u onto the 3-dimensional element space.

    Solves M c = b with M the element mass matrix and b_i = int_T u b_i,
    both integrated separately over the sub-polygons of a cut cell.
    """
    m = np.zeros((3, 3))
    rhs = np.zeros(3)
    for poly, _side in sub_regions(basis, cell_coords):
        rule = polygon_quadrature(poly, max(degree, 2))
        vals = basis.eval(rule.points[:, 0], rule.points[:, 1])
        wv = vals * rule.weights[:, None]
        m += wv.T @ vals
        rhs += wv.T @ np.asarray(u(rule.points[:, 0], rule.points[:, 1]))
    try:
        return np.linalg.solve(m, rhs)
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(
            "singular element mass matrix: degenerate cut escaped the guard"
        ) from exc


def project_Qh(
    mesh: PolygonMesh,
    bases: list[ElementBasis],
    u: Callable,
    levelset: Optional[LevelSet] = None,
    degree: int = 4,
) -> WgFunction:
    """Interpolate u into the weak Galerkin space: {Q0 u per cell, edge averages}."""
    nc = mesh.n_cells
    v0 = np.empty((nc, 3))
    for ci in range(nc):
        v0[ci] = project_Q0(bases[ci], mesh.cell_coords(ci), u, degree)
    vpartial = np.empty(mesh.n_edges)
    for ei, (ia, ib) in enumerate(mesh.edges):
        vpartial[ei] = edge_average_function(
            u, mesh.vertices[ia], mesh.vertices[ib], levelset, degree
        )
    return WgFunction(v0, vpartial)
