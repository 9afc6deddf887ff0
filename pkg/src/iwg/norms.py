"""Error measures: discrete H1 seminorm, elementwise L2 norms, energy norm,
and convergence-order bookkeeping.

All gradient and stabilizer integrals are exact (piecewise-constant
integrands); only norms against a general function u use quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .basis import ElementBasis, sub_regions
from .geometry import ElementCut
from .mesh import PolygonMesh
from .operator import local_stiffness, local_weak_gradient
from .quadrature import polygon_quadrature
from .space import WgFunction, edge_average_basis, element_mass_matrix


@dataclass
class ErrorRow:
    inv_h: int
    h1_error: float
    h1_order: Optional[float]
    l2_error: float
    l2_order: Optional[float]


def _local_coefficients(vh: WgFunction, mesh: PolygonMesh, ci: int) -> np.ndarray:
    return np.concatenate([vh.v0[ci], vh.vpartial[mesh.cell_edges[ci]]])


def discrete_h1_seminorm(
    vh: WgFunction,
    mesh: PolygonMesh,
    cuts: list[ElementCut],
    bases: list[ElementBasis],
    lam: float,
) -> float:
    """(sum_T ||grad v0||^2 + lambda/h_T ||avg v0 - vpartial||^2_{dT})^(1/2)."""
    total = 0.0
    for ci in range(mesh.n_cells):
        basis = bases[ci]
        coords = mesh.cell_coords(ci)
        c = vh.v0[ci]
        for poly, side in sub_regions(basis, coords):
            grad = basis.grads(side).T @ c  # constant per side
            if basis.is_interface:
                cut = basis.cut
                area = cut.area_plus if side > 0 else cut.area_minus
            else:
                area = mesh.areas[ci]
            total += area * float(grad @ grad)
        h = mesh.diameters[ci]
        k = len(coords)
        for i in range(k):
            a = coords[i]
            b = coords[(i + 1) % k]
            ei = mesh.cell_edges[ci][i]
            mismatch = float(edge_average_basis(basis, a, b) @ c) - vh.vpartial[ei]
            total += (lam / h) * np.linalg.norm(b - a) * mismatch**2
    return math.sqrt(total)


def l2_error_v0(
    v0_a: np.ndarray,
    v0_b: np.ndarray,
    mesh: PolygonMesh,
    bases: list[ElementBasis],
) -> float:
    """L2 norm of the interior-part difference, via exact element mass matrices."""
    total = 0.0
    for ci in range(mesh.n_cells):
        d = v0_a[ci] - v0_b[ci]
        m = element_mass_matrix(bases[ci], mesh.cell_coords(ci))
        total += float(d @ m @ d)
    # exact-arithmetic total is nonnegative; clip quadrature round-off
    return math.sqrt(max(total, 0.0))


def energy_norm(
    vh: WgFunction,
    mesh: PolygonMesh,
    cuts: list[ElementCut],
    bases: list[ElementBasis],
    lam: float,
) -> float:
    """sqrt of the stabilized bilinear form applied to (vh, vh)."""
    total = 0.0
    for ci in range(mesh.n_cells):
        lwg = local_weak_gradient(mesh, ci, cuts[ci], bases[ci])
        a_loc = local_stiffness(mesh, ci, lwg, lam)
        loc = _local_coefficients(vh, mesh, ci)
        total += float(loc @ a_loc @ loc)
    return math.sqrt(max(total, 0.0))


def l2_error_function(
    u: Callable,
    v0: np.ndarray,
    mesh: PolygonMesh,
    bases: list[ElementBasis],
    degree: int = 6,
) -> float:
    """||u - v0||_0 with v0 the broken interior part, quadrature per side."""
    total = 0.0
    for ci in range(mesh.n_cells):
        basis = bases[ci]
        for poly, _side in sub_regions(basis, mesh.cell_coords(ci)):
            rule = polygon_quadrature(poly, degree)
            x, y = rule.points[:, 0], rule.points[:, 1]
            diff = np.asarray(u(x, y)) - basis.eval(x, y) @ v0[ci]
            total += float(rule.weights @ diff**2)
    return math.sqrt(total)


def h1_error_function(
    grad_u: Callable,
    v0: np.ndarray,
    mesh: PolygonMesh,
    bases: list[ElementBasis],
    degree: int = 6,
) -> float:
    """|u - v0|_1 elementwise; grad_u(x, y) returns shape (n, 2)."""
    total = 0.0
    for ci in range(mesh.n_cells):
        basis = bases[ci]
        for poly, side in sub_regions(basis, mesh.cell_coords(ci)):
            rule = polygon_quadrature(poly, degree)
            x, y = rule.points[:, 0], rule.points[:, 1]
            gv = basis.grads(side).T @ v0[ci]  # constant on this side
            diff = np.asarray(grad_u(x, y)) - gv[None, :]
            total += float(rule.weights @ (diff**2).sum(axis=1))
    return math.sqrt(total)


def convergence_orders(errors: list[float]) -> list[Optional[float]]:
    """Stepwise orders log2(e_prev / e_curr); None for the first entry.

    A vanishing error yields math.inf (printed as 'exact' downstream).
    """
    orders: list[Optional[float]] = [None]
    for prev, curr in zip(errors[:-1], errors[1:]):
        if curr == 0.0:
            orders.append(math.inf)
        elif prev == 0.0:
            orders.append(-math.inf)
        else:
            orders.append(math.log2(prev / curr))
    return orders


def lsq_slope(hs: list[float], errors: list[float]) -> float:
    """Least-squares slope of log(error) against log(h)."""
    if any(e <= 0.0 for e in errors):
        return math.inf
    if len(hs) < 2:
        return math.nan  # a single level carries no rate information
    return float(np.polyfit(np.log(hs), np.log(errors), 1)[0])
