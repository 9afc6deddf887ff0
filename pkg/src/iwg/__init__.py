"""Immersed weak Galerkin solver for elliptic interface problems.

Solves -div(beta grad u) = f on polygonal meshes that are not fitted to the
coefficient interface: cut cells carry a broken-linear basis matched across
the interface chord, and a stabilized weak-gradient discretization yields a
symmetric positive definite system with first-order energy convergence.
"""

from .basis import ElementBasis, build_basis
from .geometry import (
    CutTopologyError,
    ElementCut,
    InterfaceCut,
    LevelSet,
    NonInterfaceCut,
    classify_all,
    classify_element,
    edge_intersection,
)
from .mesh import (
    MeshFormatError,
    MeshTopologyError,
    PolygonMesh,
    cell_geometry,
    generate_uniform_square_mesh,
    load_polygon_mesh,
    save_polygon_mesh,
    validate_mesh,
)
from .norms import (
    ErrorRow,
    convergence_orders,
    discrete_h1_seminorm,
    energy_norm,
    l2_error_v0,
    lsq_slope,
)
from .operator import (
    DEFAULT_LAMBDA,
    GlobalSystem,
    LocalWeakGradient,
    assemble,
    build_all,
    local_stiffness,
    local_weak_gradient,
)
from .problems import (
    BUILTIN_PROBLEMS,
    Problem,
    problem_circle,
    problem_sharp_edge,
    problem_variable_coefficient,
)
from .solver import (
    MaxIterationsError,
    NotPositiveDefiniteError,
    solve,
    solve_cholesky,
    solve_pcg,
)
from .space import (
    DofMap,
    WgFunction,
    build_dof_map,
    edge_average_basis,
    edge_average_function,
    project_Q0,
    project_Qh,
)
from .quadrature import QuadratureRule, polygon_quadrature, segment_rule, triangle_rule
from .experiments import ConvergenceResult, run_convergence, solve_on_mesh

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
