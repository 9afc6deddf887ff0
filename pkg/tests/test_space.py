"""Degrees of freedom, edge averages, element mass matrices, projections."""

from __future__ import annotations

import numpy as np

from conftest import (
    UNIT_SQUARE,
    horizontal_cut_square,
    one_cell_mesh,
    random_cut_cell,
)
from iwg.basis import build_basis
from iwg.geometry import LevelSet, classify_element
from iwg.mesh import generate_uniform_square_mesh
from iwg.problems import constant
from iwg.space import (
    WgFunction,
    build_dof_map,
    edge_average_basis,
    edge_average_function,
    element_mass_matrix,
    project_Q0,
    project_Qh,
)


def gauss_edge_average(basis, a, b, npts=24):
    """Independent average of each basis function over segment [a, b].

    Splits at the chord-line crossing (found by solving the linear
    equation directly) and uses dense Gauss points on each piece.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    pieces = [(a, b)]
    cut = basis.cut
    if cut.is_interface:
        ga = (a - cut.x0) @ cut.normal
        gb = (b - cut.x0) @ cut.normal
        if ga * gb < 0.0:
            s = ga / (ga - gb)
            mid = a + s * (b - a)
            pieces = [(a, mid), (mid, b)]
    t, w = np.polynomial.legendre.leggauss(npts)
    total = np.zeros(3)
    for p0, p1 in pieces:
        mids = p0[None, :] + (0.5 * (t + 1.0))[:, None] * (p1 - p0)[None, :]
        vals = basis.eval(mids[:, 0], mids[:, 1])
        total += 0.5 * np.linalg.norm(p1 - p0) * (w @ vals)
    return total / np.linalg.norm(b - a)


# ---------------------------------------------------------------------------
# DOF map
# ---------------------------------------------------------------------------


def test_dof_map_layout():
    mesh = generate_uniform_square_mesh(2)
    dofs = build_dof_map(mesh)
    assert dofs.n_dofs == 3 * 4 + 12
    assert np.array_equal(dofs.interior_dofs(1), [3, 4, 5])
    # cell dofs are the 3 interior ones plus one per edge of the cell
    cd = dofs.cell_dofs(0)
    assert len(cd) == 7
    assert np.array_equal(cd[:3], [0, 1, 2])
    assert (cd[3:] >= 12).all()
    # boundary edge dofs: 8 boundary edges on the 2x2 mesh
    assert len(dofs.boundary_dofs) == 8
    assert len(dofs.free_dofs) == dofs.n_dofs - 8


def test_wg_function_vector_round_trip():
    mesh = generate_uniform_square_mesh(3)
    dofs = build_dof_map(mesh)
    rng = np.random.default_rng(8)
    x = rng.standard_normal(dofs.n_dofs)
    f = WgFunction.from_vector(x, dofs)
    assert np.array_equal(f.to_vector(), x)
    g = f - WgFunction.from_vector(np.zeros_like(x), dofs)
    assert np.array_equal(g.to_vector(), x)


# ---------------------------------------------------------------------------
# Edge averages
# ---------------------------------------------------------------------------


def test_edge_average_left_edge_frozen_value():
    # horizontal cut, beta = (1, 2): the scaled-normal function averages
    # to 0.125/2 - 0.125 = -0.0625 over the left edge
    mesh, _ls, _cut, basis = horizontal_cut_square(beta_plus=1.0, beta_minus=2.0)
    avg = edge_average_basis(basis, np.array([0.0, 1.0]), np.array([0.0, 0.0]))
    assert abs(avg[0] - 1.0) <= 1e-15
    assert abs(avg[1] - (-0.5)) <= 1e-14
    assert abs(avg[2] - (-0.0625)) <= 1e-14


def test_edge_average_basis_matches_gauss_oracle():
    rng = np.random.default_rng(31)
    for _ in range(25):
        mesh, _ls, _cut, basis = random_cut_cell(rng)
        coords = mesh.cell_coords(0)
        for i in range(len(coords)):
            a, b = coords[i], coords[(i + 1) % len(coords)]
            closed = edge_average_basis(basis, a, b)
            dense = gauss_edge_average(basis, a, b)
            assert np.abs(closed - dense).max() <= 1e-12 * max(
                1.0, np.abs(dense).max()
            )


def test_edge_average_function_cubic():
    mesh, ls, _cut, _basis = horizontal_cut_square()
    u = lambda x, y: np.asarray(y) ** 3
    # right edge of the unit square runs from (1,0) to (1,1)
    avg = edge_average_function(u, np.array([1.0, 0.0]), np.array([1.0, 1.0]), ls, 4)
    assert abs(avg - 0.25) <= 1e-13


def test_edge_average_function_piecewise_integrand():
    ls = LevelSet(lambda x, y: np.asarray(y) - 0.5)
    u = lambda x, y: np.where(np.asarray(y) > 0.5, 1.0, 3.0)
    avg = edge_average_function(u, np.array([0.0, 0.0]), np.array([0.0, 1.0]), ls, 4)
    assert abs(avg - 2.0) <= 1e-13


# ---------------------------------------------------------------------------
# Mass matrices and projections
# ---------------------------------------------------------------------------


def test_mass_matrix_unit_square_closed_form():
    mesh = one_cell_mesh(UNIT_SQUARE)
    ls = LevelSet(lambda x, y: np.ones_like(np.asarray(x)))
    cut = classify_element(mesh, 0, ls, constant(1.0), constant(1.0))
    basis = build_basis(cut, mesh.centroids[0])
    m = element_mass_matrix(basis, mesh.cell_coords(0))
    expected = np.diag([1.0, 1.0 / 12.0, 1.0 / 12.0])
    assert np.abs(m - expected).max() <= 1e-14


def test_project_q0_reproduces_members_of_the_space():
    rng = np.random.default_rng(123)
    for _ in range(20):
        mesh, _ls, _cut, basis = random_cut_cell(rng)
        coords = mesh.cell_coords(0)
        c = rng.standard_normal(3)
        member = lambda x, y: basis.eval(x, y) @ c
        proj = project_Q0(basis, coords, member)
        assert np.abs(proj - c).max() <= 1e-11 * max(1.0, np.abs(c).max())


def test_project_q0_idempotent():
    rng = np.random.default_rng(321)
    mesh, _ls, _cut, basis = random_cut_cell(rng)
    coords = mesh.cell_coords(0)
    u = lambda x, y: np.exp(np.asarray(x)) * np.cos(np.asarray(y))
    once = project_Q0(basis, coords, u, degree=6)
    again = project_Q0(basis, coords, lambda x, y: basis.eval(x, y) @ once, degree=6)
    assert np.abs(once - again).max() <= 1e-12 * max(1.0, np.abs(once).max())


def test_project_q0_quadratic_frozen_coefficients():
    # L2 projection of x^2 on the unit square onto {1, x-1/2, y-1/2}
    # is 1/3 + (x - 1/2): moments 1/3 and 1/12 against the centered basis
    mesh = one_cell_mesh(UNIT_SQUARE)
    ls = LevelSet(lambda x, y: np.ones_like(np.asarray(x)))
    cut = classify_element(mesh, 0, ls, constant(1.0), constant(1.0))
    basis = build_basis(cut, mesh.centroids[0])
    proj = project_Q0(basis, mesh.cell_coords(0), lambda x, y: np.asarray(x) ** 2)
    assert np.abs(proj - [1.0 / 3.0, 1.0, 0.0]).max() <= 1e-13


def test_project_qh_shapes_and_edge_values():
    mesh = generate_uniform_square_mesh(4)
    ls = LevelSet(lambda x, y: np.ones_like(np.asarray(x)))
    cuts = [
        classify_element(mesh, ci, ls, constant(1.0), constant(1.0))
        for ci in range(mesh.n_cells)
    ]
    bases = [build_basis(cuts[ci], mesh.centroids[ci]) for ci in range(mesh.n_cells)]
    u = lambda x, y: np.asarray(x) + 2.0 * np.asarray(y)
    f = project_Qh(mesh, bases, u, ls, 4)
    assert f.v0.shape == (16, 3)
    assert f.vpartial.shape == (40,)
    # a linear function is reproduced: every edge value is u at the midpoint
    for ei, (ia, ib) in enumerate(mesh.edges):
        mid = 0.5 * (mesh.vertices[ia] + mesh.vertices[ib])
        assert abs(f.vpartial[ei] - u(mid[0], mid[1])) <= 1e-12
