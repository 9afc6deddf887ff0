"""Polygonal meshes: generation, text-file import/export, topology, quality.

A mesh is a flat list of vertices plus counter-clockwise vertex-index loops,
one per cell. Edge topology (which cells share which edge, boundary flags)
is derived once at construction and the mesh is immutable afterwards.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from typing import Iterable, List, Sequence, TextIO

import numpy as np


class MeshFormatError(ValueError):
    """Raised on malformed mesh files or invalid construction input."""


class MeshTopologyError(ValueError):
    """Raised when the cell set does not form a manifold polygon complex."""


def _polygon_area(coords: np.ndarray) -> float:
    # shoelace; positive for CCW loops
    x = coords[:, 0]
    y = coords[:, 1]
    return 0.5 * (np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def _polygon_centroid(coords: np.ndarray) -> np.ndarray:
    """Area-weighted centroid of a simple polygon."""
    x = coords[:, 0]
    y = coords[:, 1]
    xn = np.roll(x, -1)
    yn = np.roll(y, -1)
    cross = x * yn - xn * y
    a = 0.5 * cross.sum()
    if abs(a) < 1e-300:
        raise MeshFormatError("degenerate polygon (zero area)")
    cx = ((x + xn) * cross).sum() / (6.0 * a)
    cy = ((y + yn) * cross).sum() / (6.0 * a)
    return np.array([cx, cy])


def _polygon_diameter(coords: np.ndarray) -> float:
    # max pairwise vertex distance; cells are small polygons so O(k^2) is fine
    d = coords[:, None, :] - coords[None, :, :]
    return float(np.sqrt((d * d).sum(axis=2)).max())


class PolygonMesh:
    """Immutable polygonal mesh of a 2D domain.

    Parameters
    ----------
    vertices : (nv, 2) float array
        Vertex coordinates.
    cells : sequence of int sequences
        Per-cell vertex loops, counter-clockwise, zero-based.

    Attributes
    ----------
    edges : (ne, 2) int array
        Vertex index pairs, first-encounter order over the cell loops.
    edge_cells : (ne, 2) int array
        Adjacent cell indices per edge, -1 when absent.
    boundary_edge : (ne,) bool array
        True for edges adjacent to exactly one cell.
    cell_edges : list of int arrays
        Per-cell edge indices, ordered along the loop; ``cell_edges[c][k]``
        is the edge from loop vertex k to loop vertex k+1.
    areas, diameters : (nc,) float arrays
    centroids : (nc, 2) float array
    """

    def __init__(self, vertices: np.ndarray, cells: Sequence[Sequence[int]]):
        self.vertices = np.asarray(vertices, dtype=float)
        if self.vertices.ndim != 2 or self.vertices.shape[1] != 2:
            raise MeshFormatError("vertices must be an (nv, 2) array")
        self.cells: List[np.ndarray] = [np.asarray(c, dtype=int) for c in cells]
        nv = len(self.vertices)
        for ci, loop in enumerate(self.cells):
            if len(loop) < 3:
                raise MeshFormatError(f"cell {ci} has fewer than 3 vertices")
            if loop.min() < 0 or loop.max() >= nv:
                raise MeshFormatError(f"cell {ci} references a missing vertex")
            if len(np.unique(loop)) != len(loop):
                raise MeshFormatError(f"cell {ci} repeats a vertex")

        self._build_geometry()
        self._build_edges()

    def _build_geometry(self) -> None:
        nc = len(self.cells)
        self.areas = np.empty(nc)
        self.diameters = np.empty(nc)
        self.centroids = np.empty((nc, 2))
        for ci, loop in enumerate(self.cells):
            coords = self.vertices[loop]
            a = _polygon_area(coords)
            if a <= 0.0:
                raise MeshFormatError(
                    f"cell {ci} has non-positive area {a:.3e}; loops must be CCW"
                )
            self.areas[ci] = a
            self.diameters[ci] = _polygon_diameter(coords)
            self.centroids[ci] = _polygon_centroid(coords)

    def _build_edges(self) -> None:
        edge_index: dict[tuple[int, int], int] = {}
        edges: List[tuple[int, int]] = []
        edge_cells: List[list[int]] = []
        self.cell_edges: List[np.ndarray] = []
        for ci, loop in enumerate(self.cells):
            ids = np.empty(len(loop), dtype=int)
            for k in range(len(loop)):
                a = int(loop[k])
                b = int(loop[(k + 1) % len(loop)])
                key = (a, b) if a < b else (b, a)
                ei = edge_index.get(key)
                if ei is None:
                    ei = len(edges)
                    edge_index[key] = ei
                    edges.append(key)
                    edge_cells.append([ci])
                else:
                    if len(edge_cells[ei]) >= 2:
                        raise MeshTopologyError(
                            f"edge {key} shared by more than 2 cells"
                        )
                    edge_cells[ei].append(ci)
                ids[k] = ei
            self.cell_edges.append(ids)
        self.edges = np.array(edges, dtype=int)
        self.edge_cells = np.full((len(edges), 2), -1, dtype=int)
        for ei, cs in enumerate(edge_cells):
            self.edge_cells[ei, : len(cs)] = cs
        self.boundary_edge = self.edge_cells[:, 1] < 0

    @property
    def n_cells(self) -> int:
        return len(self.cells)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    def cell_coords(self, ci: int) -> np.ndarray:
        """Vertex coordinate loop of cell ci, shape (k, 2), CCW."""
        return self.vertices[self.cells[ci]]

    def edge_length(self, ei: int) -> float:
        a, b = self.edges[ei]
        return float(np.linalg.norm(self.vertices[b] - self.vertices[a]))


def cell_geometry(mesh: PolygonMesh, ci: int):
    """Return (area, diameter, centroid, vertex loop) of one cell."""
    return (
        float(mesh.areas[ci]),
        float(mesh.diameters[ci]),
        mesh.centroids[ci].copy(),
        mesh.cell_coords(ci),
    )


def generate_uniform_square_mesh(n: int) -> PolygonMesh:
    """Uniform n x n mesh of axis-aligned squares tiling [0,1]^2, h = 1/n."""
    if n < 1:
        raise MeshFormatError("n must be a positive integer")
    xs = np.linspace(0.0, 1.0, n + 1)
    xx, yy = np.meshgrid(xs, xs, indexing="xy")
    vertices = np.column_stack([xx.ravel(), yy.ravel()])

    def vid(i: int, j: int) -> int:
        # column i, row j in the (n+1) x (n+1) grid
        return j * (n + 1) + i

    cells = []
    for j in range(n):
        for i in range(n):
            cells.append([vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)])
    return PolygonMesh(vertices, cells)


def load_polygon_mesh(stream: TextIO | str) -> PolygonMesh:
    """Read a mesh from the whitespace-separated text format.

    Format: a header line ``nv nc``, then nv lines ``x y``, then nc lines
    ``k i1 ... ik`` with zero-based CCW vertex indices. Lines starting with
    ``#`` are ignored. Reversed (clockwise) cells are an error, not fixed.
    """
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    tokens: List[str] = []
    for line in stream:
        s = line.strip()
        if not s or s.startswith("#"):
            continue
        tokens.extend(s.split())
    pos = 0

    def take(n: int) -> List[str]:
        nonlocal pos
        if pos + n > len(tokens):
            raise MeshFormatError("unexpected end of mesh file")
        out = tokens[pos : pos + n]
        pos += n
        return out

    try:
        nv, nc = (int(t) for t in take(2))
    except ValueError as exc:
        raise MeshFormatError(f"bad header: {exc}") from exc
    if nv < 3 or nc < 1:
        raise MeshFormatError(f"implausible header nv={nv} nc={nc}")
    try:
        vertices = np.array([float(t) for t in take(2 * nv)]).reshape(nv, 2)
    except ValueError as exc:
        raise MeshFormatError(f"bad vertex line: {exc}") from exc
    cells = []
    for _ in range(nc):
        try:
            k = int(take(1)[0])
            if k < 3:
                raise MeshFormatError(f"cell with k={k} < 3 vertices")
            cells.append([int(t) for t in take(k)])
        except ValueError as exc:
            raise MeshFormatError(f"bad cell line: {exc}") from exc
    if pos != len(tokens):
        raise MeshFormatError("trailing tokens after last cell")
    return PolygonMesh(vertices, cells)


def save_polygon_mesh(mesh: PolygonMesh, stream: TextIO) -> None:
    """Write a mesh in the text format accepted by load_polygon_mesh."""
    stream.write(f"{len(mesh.vertices)} {mesh.n_cells}\n")
    for x, y in mesh.vertices:
        stream.write(f"{float(x)!r} {float(y)!r}\n")
    for loop in mesh.cells:
        stream.write(" ".join([str(len(loop))] + [str(int(v)) for v in loop]) + "\n")


@dataclass
class MeshQualityReport:
    """Per-cell shape diagnostics and the cells violating a threshold."""

    edge_ratio: np.ndarray        # min edge length / h_T, per cell
    inscribed_ratio: np.ndarray   # estimated inscribed-ball radius / h_T
    vertex_count: np.ndarray
    rho: float
    violations: List[int] = field(default_factory=list)

    @property
    def min_edge_ratio(self) -> float:
        return float(self.edge_ratio.min())

    @property
    def min_inscribed_ratio(self) -> float:
        return float(self.inscribed_ratio.min())


def _inscribed_radius_estimate(coords: np.ndarray, centroid: np.ndarray) -> float:
    """Largest circle around interior sample points that fits in the polygon.

    Estimate only (diagnostic): samples the centroid plus points pulled
    toward it from each vertex, takes the best min-distance-to-boundary.
    Exact kernel computation is deliberately out of scope.
    """
    k = len(coords)
    samples = [centroid]
    for t in (0.25, 0.5):
        samples.extend(centroid + t * (coords - centroid))
    best = 0.0
    nxt = np.roll(coords, -1, axis=0)
    edge = nxt - coords
    lengths = np.linalg.norm(edge, axis=1)
    for p in np.atleast_2d(np.vstack(samples)):
        # distance from p to each edge segment
        rel = p - coords
        t = np.clip((rel * edge).sum(axis=1) / (lengths**2), 0.0, 1.0)
        foot = coords + t[:, None] * edge
        dist = np.linalg.norm(p - foot, axis=1).min()
        # p must be inside: all cross products non-negative for CCW loop
        crosses = edge[:, 0] * rel[:, 1] - edge[:, 1] * rel[:, 0]
        if crosses.min() >= 0.0 and dist > best:
            best = float(dist)
    return best


def validate_mesh(mesh: PolygonMesh, rho: float) -> MeshQualityReport:
    """Shape-regularity diagnostics: never fatal, just a report.

    Flags cells whose min edge-length ratio falls below rho. The
    inscribed-ball estimate is reported but not thresholded (a perfect
    square only reaches ~0.35).
    """
    if not 0.0 < rho < 1.0:
        raise ValueError("rho must lie in (0, 1)")
    nc = mesh.n_cells
    edge_ratio = np.empty(nc)
    ball_ratio = np.empty(nc)
    counts = np.empty(nc, dtype=int)
    for ci in range(nc):
        coords = mesh.cell_coords(ci)
        h = mesh.diameters[ci]
        lengths = [mesh.edge_length(ei) for ei in mesh.cell_edges[ci]]
        edge_ratio[ci] = min(lengths) / h
        ball_ratio[ci] = _inscribed_radius_estimate(coords, mesh.centroids[ci]) / h
        counts[ci] = len(coords)
    report = MeshQualityReport(edge_ratio, ball_ratio, counts, rho)
    for ci in range(nc):
        if edge_ratio[ci] < rho:
            report.violations.append(ci)
    return report
