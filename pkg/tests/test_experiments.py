"""Refinement studies, CSV output, and the text table."""

from __future__ import annotations

import io
import math

import numpy as np
import pytest

from iwg.experiments import (
    ConvergenceResult,
    run_convergence,
    solve_on_mesh,
    write_csv,
)
from iwg.mesh import generate_uniform_square_mesh
from iwg.norms import ErrorRow
from iwg.problems import problem_circle

from conftest import DATA_DIR


def test_run_convergence_row_structure():
    prob = problem_circle(1.0, 10.0)
    result = run_convergence(prob, levels=[4, 8])
    assert [r.inv_h for r in result.rows] == [4, 8]
    assert result.rows[0].h1_order is None
    assert result.rows[0].l2_order is None
    assert result.rows[1].h1_order is not None
    assert result.rows[1].l2_order is not None
    for lvl in result.levels:
        n = lvl.inv_h
        assert lvl.n_dofs == 3 * n * n + 2 * n * (n + 1)
        assert lvl.n_interface_cells > 0
        assert lvl.seconds > 0.0
    # one halving of h: both errors must drop
    assert result.rows[1].h1_error < result.rows[0].h1_error
    assert result.rows[1].l2_error < result.rows[0].l2_error
    assert result.h1_slope > 0.0
    assert result.l2_slope > result.h1_slope


def test_run_convergence_requires_levels_or_files():
    with pytest.raises(ValueError):
        run_convergence(problem_circle(), levels=None, mesh_files=None)


def test_run_convergence_from_mesh_files(tmp_path):
    prob = problem_circle(1.0, 10.0)
    result = run_convergence(prob, mesh_files=[str(DATA_DIR / "quad4.txt")])
    mesh = generate_uniform_square_mesh(2)  # only for comparison of dof formula
    assert len(result.rows) == 1
    from iwg.mesh import load_polygon_mesh

    with open(DATA_DIR / "quad4.txt", "r", encoding="utf-8") as fh:
        quad = load_polygon_mesh(fh)
    assert result.rows[0].inv_h == round(1.0 / quad.diameters.max())
    assert result.levels[0].n_dofs == 3 * quad.n_cells + quad.n_edges
    assert mesh.n_cells == quad.n_cells
    assert math.isnan(result.h1_slope)  # one level, no rate


def test_csv_format_exact():
    rows = [
        ErrorRow(4, 0.125, None, 0.03125, None),
        ErrorRow(8, 0.0625, 1.0, 0.0078125, 2.0),
    ]
    buf = io.StringIO()
    write_csv(rows, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "inv_h,h1_error,h1_order,l2_error,l2_order"
    assert lines[1] == "4,1.250000e-01,,3.125000e-02,"
    assert lines[2] == "8,6.250000e-02,1.0000,7.812500e-03,2.0000"


def test_csv_zero_error_prints_exact():
    rows = [
        ErrorRow(4, 1e-3, None, 1e-4, None),
        ErrorRow(8, 0.0, math.inf, 0.0, math.inf),
    ]
    buf = io.StringIO()
    write_csv(rows, buf)
    assert buf.getvalue().splitlines()[2] == "8,0.000000e+00,exact,0.000000e+00,exact"


def test_out_csv_and_table(tmp_path):
    prob = problem_circle(1.0, 10.0)
    out = tmp_path / "conv.csv"
    table = io.StringIO()
    result = run_convergence(
        prob, levels=[4, 8], out_csv=str(out), table_stream=table
    )
    assert isinstance(result, ConvergenceResult)
    text = out.read_text(encoding="utf-8")
    assert text.startswith("inv_h,h1_error,h1_order,l2_error,l2_order\n")
    assert len(text.splitlines()) == 3
    rendered = table.getvalue()
    assert rendered.startswith(f"# {prob.name}")
    assert "least-squares slopes" in rendered


def test_solve_on_mesh_interpolant_tracks_exact_solution():
    prob = problem_circle(1.0, 10.0)
    mesh = generate_uniform_square_mesh(8)
    uh, qhu, cuts, bases = solve_on_mesh(prob, mesh)
    assert uh.v0.shape == (mesh.n_cells, 3)
    assert qhu.v0.shape == (mesh.n_cells, 3)
    assert uh.vpartial.shape == (mesh.n_edges,)
    # the discrete solution stays near the interpolant of u
    gap = np.abs(uh.v0[:, 0] - qhu.v0[:, 0]).max()
    assert gap < 0.05 * max(1.0, np.abs(qhu.v0[:, 0]).max())


def test_pcg_path_through_solve_on_mesh():
    prob = problem_circle(1.0, 10.0)
    mesh = generate_uniform_square_mesh(4)
    uh_c, _, _, _ = solve_on_mesh(prob, mesh, solver="cholesky")
    uh_i, _, _, _ = solve_on_mesh(prob, mesh, solver="cg", tol=1e-13)
    assert np.abs(uh_c.to_vector() - uh_i.to_vector()).max() <= 1e-10
