"""Direct and iterative solvers for the assembled SPD systems."""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla


class NotPositiveDefiniteError(RuntimeError):
    """The matrix is not SPD; usually an assembly bug or a degenerate cut."""


class MaxIterationsError(RuntimeError):
    pass


RESIDUAL_TOL = 1e-10  # postcondition ||Ax - b|| <= RESIDUAL_TOL ||b||


def _check_residual(a: sp.spmatrix, b: np.ndarray, x: np.ndarray) -> np.ndarray:
    r = b - a @ x
    bnorm = np.linalg.norm(b)
    if np.linalg.norm(r) > RESIDUAL_TOL * max(bnorm, 1e-300):
        raise NotPositiveDefiniteError(
            "direct solve residual exceeds tolerance; matrix likely not SPD"
        )
    return x


def solve_cholesky(a: sp.spmatrix, b: np.ndarray) -> np.ndarray:
    """Sparse symmetric factorization solve with an SPD certificate.

    Uses a symmetric-mode LU with diagonal pivoting disabled, which on an
    SPD matrix is a Cholesky-like LDL^T factorization; any non-positive
    pivot proves the matrix is not SPD and raises.
    """
    a = sp.csc_matrix(a)
    b = np.asarray(b, dtype=float)
    try:
        lu = spla.splu(
            a,
            diag_pivot_thresh=0.0,
            permc_spec="MMD_AT_PLUS_A",
            options=dict(SymmetricMode=True),
        )
    except RuntimeError as exc:
        raise NotPositiveDefiniteError(f"factorization failed: {exc}") from exc
    if np.any(lu.U.diagonal() <= 0.0):
        raise NotPositiveDefiniteError("non-positive pivot in factorization")
    x = lu.solve(b)
    # one refinement step buys back the pivot-ordering round-off cheaply
    x += lu.solve(b - a @ x)
    return _check_residual(a, b, x)


def solve_pcg(
    a: sp.spmatrix,
    b: np.ndarray,
    tol: float = 1e-12,
    maxit: int = 10000,
) -> tuple[np.ndarray, int]:
    """Jacobi-preconditioned conjugate gradients; returns (x, iterations)."""
    a = sp.csr_matrix(a)
    b = np.asarray(b, dtype=float)
    diag = a.diagonal()
    if np.any(diag <= 0.0):
        raise NotPositiveDefiniteError("non-positive diagonal entry")
    inv_diag = 1.0 / diag

    x = np.zeros_like(b)
    r = b.copy()
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return x, 0
    z = inv_diag * r
    p = z.copy()
    rz = float(r @ z)
    for it in range(1, maxit + 1):
        ap = a @ p
        pap = float(p @ ap)
        if pap <= 0.0:
            raise NotPositiveDefiniteError("CG found a non-positive curvature")
        alpha = rz / pap
        x += alpha * p
        r -= alpha * ap
        if np.linalg.norm(r) <= tol * bnorm:
            return x, it
        z = inv_diag * r
        rz_new = float(r @ z)
        p = z + (rz_new / rz) * p
        rz = rz_new
    raise MaxIterationsError(f"PCG did not converge in {maxit} iterations")


def solve(a: sp.spmatrix, b: np.ndarray, method: str = "cholesky", tol: float = 1e-12):
    """Dispatch: 'cholesky' (direct, default) or 'cg'."""
    if method == "cholesky":
        return solve_cholesky(a, b)
    if method == "cg":
        x, _its = solve_pcg(a, b, tol=tol)
        return x
    raise ValueError(f"unknown solver '{method}'")
