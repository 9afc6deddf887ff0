"""Shared fixtures and helpers for the test suite."""

from __future__ import annotations

import pathlib

import numpy as np

from iwg.basis import build_basis
from iwg.geometry import LevelSet, classify_element
from iwg.mesh import PolygonMesh
from iwg.problems import constant

DATA_DIR = pathlib.Path(__file__).parent / "data"

UNIT_SQUARE = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])


def one_cell_mesh(coords) -> PolygonMesh:
    coords = np.asarray(coords, dtype=float)
    return PolygonMesh(coords, [list(range(len(coords)))])


def horizontal_cut_square(beta_plus: float = 1.0, beta_minus: float = 2.0):
    """Unit square cut by y = 0.5; the plus side is the top half.

    Returns (mesh, levelset, cut, basis) for the single cell.
    """
    mesh = one_cell_mesh(UNIT_SQUARE)
    ls = LevelSet(lambda x, y: np.asarray(y) - 0.5)
    cut = classify_element(mesh, 0, ls, constant(beta_plus), constant(beta_minus))
    return mesh, ls, cut, build_basis(cut, mesh.centroids[0])


def random_cut_cell(rng: np.random.Generator, beta_range=(1e-2, 1e2)):
    """A randomly placed, rotated, scaled square cut by a random line.

    The line passes near the cell center, so the cut is guaranteed and well
    separated from the vertices. Returns (mesh, levelset, cut, basis).
    """
    while True:
        center = rng.uniform(-2.0, 2.0, size=2)
        scale = rng.uniform(0.3, 2.0)
        theta = rng.uniform(0.0, 2.0 * np.pi)
        rot = np.array(
            [[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]]
        )
        coords = center + (UNIT_SQUARE - 0.5) @ rot.T * scale
        mesh = one_cell_mesh(coords)

        phi = rng.uniform(0.0, 2.0 * np.pi)
        normal = np.array([np.cos(phi), np.sin(phi)])
        point = center + rng.uniform(-0.2, 0.2, size=2) * scale

        def lf(x, y, n=normal, q=point):
            return n[0] * (np.asarray(x) - q[0]) + n[1] * (np.asarray(y) - q[1])

        ls = LevelSet(lf)
        bp = float(np.exp(rng.uniform(np.log(beta_range[0]), np.log(beta_range[1]))))
        bm = float(np.exp(rng.uniform(np.log(beta_range[0]), np.log(beta_range[1]))))
        cut = classify_element(mesh, 0, ls, constant(bp), constant(bm))
        if cut.is_interface:
            return mesh, ls, cut, build_basis(cut, mesh.centroids[0])


def chord_points(cut, m: int = 20) -> np.ndarray:
    """m points strictly inside the chord segment of an interface cut."""
    s = np.linspace(0.025, 0.975, m)[:, None]
    return cut.p0[None, :] * (1.0 - s) + cut.p1[None, :] * s
