"""Convergence studies: classify, assemble, solve, measure, tabulate."""

from __future__ import annotations

import math
import sys
import time
from dataclasses import dataclass
from typing import Optional, Sequence, TextIO

from .mesh import PolygonMesh, generate_uniform_square_mesh, load_polygon_mesh
from .norms import (
    ErrorRow,
    convergence_orders,
    discrete_h1_seminorm,
    l2_error_v0,
    lsq_slope,
)
from .operator import DEFAULT_LAMBDA, assemble, build_all
from .problems import Problem
from .solver import solve
from .space import WgFunction, project_Qh

ERROR_QUAD_DEGREE = 6  # keeps measurement error below discretization error


@dataclass
class LevelResult:
    inv_h: int
    h1_error: float
    l2_error: float
    n_dofs: int
    n_interface_cells: int
    seconds: float


@dataclass
class ConvergenceResult:
    rows: list[ErrorRow]
    h1_slope: float
    l2_slope: float
    levels: list[LevelResult]


def solve_on_mesh(
    problem: Problem,
    mesh: PolygonMesh,
    lam: float = DEFAULT_LAMBDA,
    quad_degree: int = 4,
    solver: str = "cholesky",
    tol: float = 1e-12,
) -> tuple[WgFunction, WgFunction, list, list]:
    """Solve one mesh; returns (u_h, interpolant of u, cuts, bases)."""
    cuts, bases = build_all(
        mesh, problem.levelset, problem.beta_plus, problem.beta_minus
    )
    system = assemble(
        mesh,
        cuts,
        bases,
        lam,
        problem.f,
        problem.g,
        problem.levelset,
        quad_degree,
    )
    x_free = solve(system.matrix, system.rhs, method=solver, tol=tol)
    uh = WgFunction.from_vector(system.expand(x_free), system.dofs)
    qhu = project_Qh(mesh, bases, problem.u, problem.levelset, ERROR_QUAD_DEGREE)
    return uh, qhu, cuts, bases


def run_level(
    problem: Problem,
    mesh: PolygonMesh,
    inv_h: int,
    lam: float,
    quad_degree: int,
    solver: str,
    tol: float,
) -> LevelResult:
    t0 = time.perf_counter()
    uh, qhu, cuts, bases = solve_on_mesh(problem, mesh, lam, quad_degree, solver, tol)
    diff = uh - qhu
    h1 = discrete_h1_seminorm(diff, mesh, cuts, bases, lam)
    l2 = l2_error_v0(uh.v0, qhu.v0, mesh, bases)
    n_interface = sum(1 for c in cuts if c.is_interface)
    return LevelResult(
        inv_h=inv_h,
        h1_error=h1,
        l2_error=l2,
        n_dofs=3 * mesh.n_cells + mesh.n_edges,
        n_interface_cells=n_interface,
        seconds=time.perf_counter() - t0,
    )


def run_convergence(
    problem: Problem,
    levels: Optional[Sequence[int]] = None,
    mesh_files: Optional[Sequence[str]] = None,
    lam: float = DEFAULT_LAMBDA,
    quad_degree: int = 4,
    solver: str = "cholesky",
    tol: float = 1e-12,
    out_csv: Optional[str] = None,
    table_stream: Optional[TextIO] = None,
) -> ConvergenceResult:
    """Run a refinement study on uniform levels (1/h values) or mesh files.

    Validates the problem's jump conditions and source before any solve.
    """
    problem.validate()
    results: list[LevelResult] = []
    if mesh_files:
        for path in mesh_files:
            with open(path, "r", encoding="utf-8") as fh:
                mesh = load_polygon_mesh(fh)
            inv_h = round(1.0 / mesh.diameters.max())
            results.append(
                run_level(problem, mesh, inv_h, lam, quad_degree, solver, tol)
            )
    else:
        if not levels:
            raise ValueError("either levels or mesh_files is required")
        for n in levels:
            mesh = generate_uniform_square_mesh(int(n))
            results.append(
                run_level(problem, mesh, int(n), lam, quad_degree, solver, tol)
            )

    h1_orders = convergence_orders([r.h1_error for r in results])
    l2_orders = convergence_orders([r.l2_error for r in results])
    rows = [
        ErrorRow(r.inv_h, r.h1_error, oh, r.l2_error, ol)
        for r, oh, ol in zip(results, h1_orders, l2_orders)
    ]
    hs = [1.0 / r.inv_h for r in results]
    out = ConvergenceResult(
        rows=rows,
        h1_slope=lsq_slope(hs, [r.h1_error for r in results]),
        l2_slope=lsq_slope(hs, [r.l2_error for r in results]),
        levels=results,
    )
    if out_csv:
        with open(out_csv, "w", encoding="utf-8", newline="") as fh:
            write_csv(rows, fh)
    if table_stream is not None:
        print_table(problem.name, out, table_stream)
    return out


def _fmt_order(order: Optional[float]) -> str:
    if order is None:
        return ""
    if not math.isfinite(order):
        return "exact"
    return f"{order:.4f}"


def write_csv(rows: list[ErrorRow], stream: TextIO) -> None:
    stream.write("inv_h,h1_error,h1_order,l2_error,l2_order\n")
    for r in rows:
        stream.write(
            f"{r.inv_h},{r.h1_error:.6e},{_fmt_order(r.h1_order)},"
            f"{r.l2_error:.6e},{_fmt_order(r.l2_order)}\n"
        )


def print_table(
    title: str, result: ConvergenceResult, stream: TextIO = sys.stdout
) -> None:
    stream.write(f"# {title}\n")
    stream.write(
        f"{'1/h':>6} {'H1 error':>13} {'order':>7} "
        f"{'L2 error':>13} {'order':>7} {'dofs':>8} {'cut':>5} {'sec':>7}\n"
    )
    for row, lvl in zip(result.rows, result.levels):
        stream.write(
            f"{row.inv_h:>6} {row.h1_error:>13.6e} {_fmt_order(row.h1_order):>7} "
            f"{row.l2_error:>13.6e} {_fmt_order(row.l2_order):>7} "
            f"{lvl.n_dofs:>8} {lvl.n_interface_cells:>5} {lvl.seconds:>7.2f}\n"
        )
    stream.write(
        f"least-squares slopes: H1 {result.h1_slope:.4f}, L2 {result.l2_slope:.4f}\n"
    )
