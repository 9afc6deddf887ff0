"""Command-line interface.

Subcommands:
    iwg convergence   refinement study on a built-in problem, CSV output
    iwg solve         single solve with error report
    iwg validate-mesh shape-quality report for a mesh file

Exit codes: 0 success, 2 argument/format error, 3 numerical failure,
4 interface-topology failure (mesh too coarse for the interface).
"""

from __future__ import annotations

import argparse
import sys

from .experiments import print_table, run_convergence
from .geometry import CutTopologyError
from .mesh import MeshFormatError, MeshTopologyError, load_polygon_mesh, validate_mesh
from .operator import DEFAULT_LAMBDA
from .problems import BUILTIN_PROBLEMS, ProblemValidationError
from .solver import MaxIterationsError, NotPositiveDefiniteError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_CUT_TOPOLOGY = 4

DEFAULT_LEVELS = [8, 16, 32, 64, 128, 256]


def _add_problem_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument(
        "--example",
        choices=sorted(BUILTIN_PROBLEMS),
        default="circle",
        help="built-in benchmark problem",
    )
    p.add_argument("--beta-plus", type=float, default=1.0)
    p.add_argument("--beta-minus", type=float, default=10.0)
    p.add_argument(
        "--lambda",
        dest="lam",
        type=float,
        default=DEFAULT_LAMBDA,
        help="stabilization weight (positive)",
    )
    p.add_argument("--quad-degree", type=int, default=4, choices=range(2, 7))
    p.add_argument("--solver", choices=["cholesky", "cg"], default="cholesky")
    p.add_argument("--tol", type=float, default=1e-12)


def _make_problem(args: argparse.Namespace):
    if args.example == "circle":
        return BUILTIN_PROBLEMS["circle"](args.beta_plus, args.beta_minus)
    return BUILTIN_PROBLEMS[args.example]()


def _parse_levels(text: str) -> list[int]:
    try:
        levels = [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad level list '{text}'") from exc
    if not levels or any(n < 1 for n in levels):
        raise argparse.ArgumentTypeError(f"bad level list '{text}'")
    return levels


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="iwg",
        description="Immersed weak Galerkin solver for elliptic interface problems",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    conv = sub.add_parser("convergence", help="refinement study with CSV output")
    _add_problem_flags(conv)
    conv.add_argument(
        "--levels",
        type=_parse_levels,
        default=None,
        help="comma-separated 1/h values (default 8..256 capped by --max-level)",
    )
    conv.add_argument(
        "--max-level",
        type=int,
        default=64,
        help="drop levels above this 1/h (default 64)",
    )
    conv.add_argument(
        "--mesh",
        choices=["m1"],
        default="m1",
        help="uniform square family (imported meshes: --mesh-file)",
    )
    conv.add_argument(
        "--mesh-file",
        action="append",
        default=None,
        help="polygon mesh file; repeat for a refinement sequence",
    )
    conv.add_argument("--out", default=None, help="CSV output path")

    single = sub.add_parser("solve", help="one solve with an error report")
    _add_problem_flags(single)
    single.add_argument("--n", type=int, default=16, help="mesh resolution 1/h")

    vmesh = sub.add_parser("validate-mesh", help="mesh shape-quality report")
    vmesh.add_argument("--mesh-file", required=True)
    vmesh.add_argument("--rho", type=float, default=0.1)

    return parser


def _cmd_convergence(args: argparse.Namespace) -> int:
    problem = _make_problem(args)
    levels = args.levels if args.levels is not None else DEFAULT_LEVELS
    levels = [n for n in levels if n <= args.max_level]
    if not levels and not args.mesh_file:
        print("no levels left after --max-level cap", file=sys.stderr)
        return EXIT_CONFIG
    run_convergence(
        problem,
        levels=levels,
        mesh_files=args.mesh_file,
        lam=args.lam,
        quad_degree=args.quad_degree,
        solver=args.solver,
        tol=args.tol,
        out_csv=args.out,
        table_stream=sys.stdout,
    )
    return EXIT_OK


def _cmd_solve(args: argparse.Namespace) -> int:
    from .experiments import run_level
    from .mesh import generate_uniform_square_mesh

    problem = _make_problem(args)
    problem.validate()
    mesh = generate_uniform_square_mesh(args.n)
    result = run_level(
        problem, mesh, args.n, args.lam, args.quad_degree, args.solver, args.tol
    )
    print(f"problem:          {problem.name}")
    print(f"mesh:             {args.n} x {args.n} squares, {result.n_dofs} dofs")
    print(f"interface cells:  {result.n_interface_cells}")
    print(f"H1 seminorm error: {result.h1_error:.6e}")
    print(f"L2 error:          {result.l2_error:.6e}")
    print(f"elapsed:           {result.seconds:.2f} s")
    return EXIT_OK


def _cmd_validate_mesh(args: argparse.Namespace) -> int:
    with open(args.mesh_file, "r", encoding="utf-8") as fh:
        mesh = load_polygon_mesh(fh)
    report = validate_mesh(mesh, args.rho)
    print(f"cells:                {mesh.n_cells}")
    print(f"edges:                {mesh.n_edges}")
    print(f"min edge ratio:       {report.min_edge_ratio:.4f}")
    print(f"min inscribed ratio:  {report.min_inscribed_ratio:.4f}")
    if report.violations:
        print(f"cells below rho={args.rho:g}: {report.violations}")
    else:
        print(f"no cells below rho={args.rho:g}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse already printed the message; normalize its code
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        if args.command == "convergence":
            return _cmd_convergence(args)
        if args.command == "solve":
            return _cmd_solve(args)
        if args.command == "validate-mesh":
            return _cmd_validate_mesh(args)
        return EXIT_CONFIG
    except (MeshFormatError, MeshTopologyError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NotPositiveDefiniteError, MaxIterationsError, ProblemValidationError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except CutTopologyError as exc:
        print(f"interface topology failure: {exc}", file=sys.stderr)
        return EXIT_CUT_TOPOLOGY


if __name__ == "__main__":
    sys.exit(main())
