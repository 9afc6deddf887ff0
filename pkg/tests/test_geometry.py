"""Element classification against a level set: snapping, cuts, orientation."""

from __future__ import annotations

import math

import numpy as np
import pytest

from conftest import UNIT_SQUARE, one_cell_mesh, horizontal_cut_square, random_cut_cell
from iwg.geometry import (
    CutTopologyError,
    LevelSet,
    classify_all,
    classify_element,
    edge_intersection,
)
from iwg.mesh import generate_uniform_square_mesh
from iwg.problems import constant


def circle_levelset(cx=0.5, cy=0.5, r=0.4) -> LevelSet:
    return LevelSet(
        lambda x, y: (np.asarray(x) - cx) ** 2 + (np.asarray(y) - cy) ** 2 - r**2
    )


def polygon_area(poly: np.ndarray) -> float:
    x, y = poly[:, 0], poly[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


# ---------------------------------------------------------------------------
# Edge intersection
# ---------------------------------------------------------------------------


def test_edge_intersection_matches_quadratic_root():
    """Bisection against the closed-form root of the circle along a segment."""
    ls = circle_levelset()
    rng = np.random.default_rng(11)
    for _ in range(50):
        # random segment from inside the circle to outside
        ang = rng.uniform(0.0, 2 * np.pi)
        p_in = np.array([0.5, 0.5]) + rng.uniform(0.0, 0.3) * np.array(
            [math.cos(ang), math.sin(ang)]
        )
        ang2 = rng.uniform(0.0, 2 * np.pi)
        p_out = np.array([0.5, 0.5]) + rng.uniform(0.45, 1.2) * np.array(
            [math.cos(ang2), math.sin(ang2)]
        )
        found = edge_intersection(p_in, p_out, ls, tol=1e-13)
        assert found is not None
        # |p_in + t d - c|^2 = r^2 as a quadratic in t
        d = p_out - p_in
        rel = p_in - np.array([0.5, 0.5])
        a = d @ d
        b = 2.0 * rel @ d
        c = rel @ rel - 0.16
        t = (-b + math.sqrt(b * b - 4 * a * c)) / (2 * a)
        exact = p_in + t * d
        assert np.linalg.norm(found - exact) <= 1e-11


def test_edge_intersection_none_without_sign_change():
    ls = circle_levelset()
    assert edge_intersection([0.5, 0.4], [0.5, 0.6], ls, tol=1e-13) is None


def test_edge_intersection_endpoint_zero():
    ls = LevelSet(lambda x, y: np.asarray(y) - 0.5)
    p = edge_intersection([0.3, 0.5], [0.3, 1.0], ls, tol=1e-13)
    assert p is not None and np.allclose(p, [0.3, 0.5], atol=1e-15)


# ---------------------------------------------------------------------------
# Classification of a known cut
# ---------------------------------------------------------------------------


def test_horizontal_cut_square_geometry():
    _mesh, _ls, cut, _basis = horizontal_cut_square(beta_plus=1.0, beta_minus=2.0)
    assert cut.is_interface
    assert np.allclose(cut.normal, [0.0, -1.0], atol=1e-14)
    assert np.allclose(cut.tangent, [1.0, 0.0], atol=1e-14)
    assert np.allclose(cut.x0, [0.5, 0.5], atol=1e-14)
    assert abs(cut.area_plus - 0.5) <= 1e-14
    assert abs(cut.area_minus - 0.5) <= 1e-14
    assert cut.beta_plus_bar == 1.0
    assert cut.beta_minus_bar == 2.0


def test_variable_beta_sampled_at_sub_barycenters():
    mesh = one_cell_mesh(UNIT_SQUARE)
    ls = LevelSet(lambda x, y: np.asarray(y) - 0.5)
    beta = lambda x, y: 1.0 + np.asarray(x) + 2.0 * np.asarray(y)
    cut = classify_element(mesh, 0, ls, beta, beta)
    # plus piece is the top half, barycenter (0.5, 0.75); minus (0.5, 0.25)
    assert abs(cut.beta_plus_bar - (1.0 + 0.5 + 1.5)) <= 1e-12
    assert abs(cut.beta_minus_bar - (1.0 + 0.5 + 0.5)) <= 1e-12


def test_cut_invariants_on_random_cells():
    rng = np.random.default_rng(404)
    for _ in range(100):
        mesh, ls, cut, _basis = random_cut_cell(rng)
        area = mesh.areas[0]
        h = mesh.diameters[0]
        # CCW pieces whose areas add up to the cell
        ap = polygon_area(cut.poly_plus)
        am = polygon_area(cut.poly_minus)
        assert ap > 0.0 and am > 0.0
        assert abs(ap + am - area) <= 1e-12 * area
        assert abs(ap - cut.area_plus) <= 1e-12 * area
        assert abs(am - cut.area_minus) <= 1e-12 * area
        # normal points from the plus side into the minus side
        eps = 1e-6 * h
        assert ls.at(cut.x0 - eps * cut.normal) > 0.0
        assert ls.at(cut.x0 + eps * cut.normal) < 0.0
        # tangent is the 90-degree rotation of the normal
        assert np.allclose(
            cut.tangent, [-cut.normal[1], cut.normal[0]], atol=1e-15
        )
        assert abs(np.linalg.norm(cut.normal) - 1.0) <= 1e-14
        # chord midpoint
        assert np.allclose(cut.x0, 0.5 * (cut.p0 + cut.p1), atol=1e-14)


def test_sub_polygon_vertices_lie_on_cell_boundary_or_chord():
    rng = np.random.default_rng(77)
    for _ in range(20):
        mesh, _ls, cut, _basis = random_cut_cell(rng)
        coords = mesh.cell_coords(0)
        h = mesh.diameters[0]
        nxt = np.roll(coords, -1, axis=0)
        for piece in (cut.poly_plus, cut.poly_minus):
            for p in piece:
                on_chord = (
                    np.linalg.norm(p - cut.p0) <= 1e-10 * h
                    or np.linalg.norm(p - cut.p1) <= 1e-10 * h
                )
                d_edges = []
                for a, b in zip(coords, nxt):
                    e = b - a
                    t = np.clip((p - a) @ e / (e @ e), 0.0, 1.0)
                    d_edges.append(np.linalg.norm(p - (a + t * e)))
                assert on_chord or min(d_edges) <= 1e-10 * h


def test_classification_deterministic():
    rng1 = np.random.default_rng(5)
    rng2 = np.random.default_rng(5)
    _m1, _l1, cut1, _b1 = random_cut_cell(rng1)
    _m2, _l2, cut2, _b2 = random_cut_cell(rng2)
    assert np.array_equal(cut1.poly_plus, cut2.poly_plus)
    assert np.array_equal(cut1.poly_minus, cut2.poly_minus)
    assert np.array_equal(cut1.normal, cut2.normal)


# ---------------------------------------------------------------------------
# Snapping and degenerate cuts
# ---------------------------------------------------------------------------


def test_vertex_grazing_interface_is_not_a_cut():
    # level set passes exactly through two opposite corners of the top edge
    mesh = one_cell_mesh(UNIT_SQUARE)
    ls = LevelSet(lambda x, y: np.asarray(y) - 1.0)
    cut = classify_element(mesh, 0, ls, constant(1.0), constant(2.0))
    assert not cut.is_interface
    assert cut.side == -1  # centroid is below the line


def test_interface_along_an_edge_is_not_a_cut():
    mesh = one_cell_mesh(UNIT_SQUARE)
    ls = LevelSet(lambda x, y: np.asarray(x) - 1e-15)
    cut = classify_element(mesh, 0, ls, constant(1.0), constant(2.0))
    assert not cut.is_interface


def test_sliver_cut_reclassified_to_majority_side():
    # chord shaves a corner with area far below the 1e-10 |T| guard
    mesh = one_cell_mesh(UNIT_SQUARE)
    delta = 1e-7
    ls = LevelSet(lambda x, y: (np.asarray(x) + np.asarray(y)) - delta)
    cut = classify_element(mesh, 0, ls, constant(1.0), constant(2.0))
    assert not cut.is_interface
    assert cut.side == 1  # nearly all of the cell is on the plus side


def test_uncut_cell_sides():
    mesh = one_cell_mesh(UNIT_SQUARE)
    plus = classify_element(
        mesh, 0, LevelSet(lambda x, y: np.ones_like(np.asarray(x))),
        constant(3.0), constant(4.0),
    )
    assert not plus.is_interface and plus.side == 1 and plus.beta_bar == 3.0
    minus = classify_element(
        mesh, 0, LevelSet(lambda x, y: -np.ones_like(np.asarray(x))),
        constant(3.0), constant(4.0),
    )
    assert not minus.is_interface and minus.side == -1 and minus.beta_bar == 4.0


def test_saddle_levelset_raises_topology_error():
    mesh = one_cell_mesh(UNIT_SQUARE)
    ls = LevelSet(lambda x, y: (np.asarray(x) - 0.5) * (np.asarray(y) - 0.5))
    with pytest.raises(CutTopologyError):
        classify_element(mesh, 0, ls, constant(1.0), constant(2.0))


def test_classify_all_circle_cut_counts():
    mesh = generate_uniform_square_mesh(8)
    cuts = classify_all(mesh, circle_levelset(), constant(1.0), constant(10.0))
    n_cut = sum(1 for c in cuts if c.is_interface)
    assert len(cuts) == 64
    assert n_cut == 28  # ring of cut cells for r = 0.4 at h = 1/8
    # cells inside the circle are minus side, outside plus
    for ci, cut in enumerate(cuts):
        if cut.is_interface:
            continue
        c = mesh.centroids[ci]
        inside = (c[0] - 0.5) ** 2 + (c[1] - 0.5) ** 2 < 0.16
        assert cut.side == (-1 if inside else 1)
