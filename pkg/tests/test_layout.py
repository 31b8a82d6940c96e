import math

import numpy as np
import pytest

from decorated_conformal.errors import GeometryError
from decorated_conformal.instances import grid_torus, lattice_torus, right_triangle_disk
from decorated_conformal.layout import interpolation_maps, layout_edge_lengths, layout_faces
from decorated_conformal.power import apply_projective, triangle_power
from decorated_conformal.solver import solve_boundary
from decorated_conformal.surface_file import SurfaceFile


def corner_angle(pos, f, k):
    a, b, c = pos[f, k], pos[f, (k + 1) % 3], pos[f, (k + 2) % 3]
    u, v = b - a, c - a
    return math.atan2(u[0] * v[1] - u[1] * v[0], u @ v)


def test_single_triangle_layout():
    side = np.array([[4.0, 5.0, 3.0]])  # side k opposite corner k
    pos = layout_faces([(0, 1, 2)], [], side)
    assert layout_edge_lengths(pos) == pytest.approx(side, abs=1e-12)
    assert pos[0, 0] == pytest.approx([0, 0]) and pos[0, 1] == pytest.approx([3, 0])
    # counterclockwise orientation
    assert corner_angle(pos, 0, 0) > 0


def test_unit_square_torus():
    tri, m = lattice_torus()
    sf = SurfaceFile.from_closed(tri, m)
    # cut the two axis loops (sides 0 and 2 of face 0); the diagonal stays glued
    pos = layout_faces(sf.faces, sf.gluings, sf.side_lengths(), cut=[(0, 0), (0, 2)])
    corners = {tuple(np.round(p, 12) + 0.0) for p in pos.reshape(-1, 2)}
    assert corners == {(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)}


def test_closed_surface_without_cut_fails():
    tri, m = lattice_torus()
    sf = SurfaceFile.from_closed(tri, m)
    with pytest.raises(GeometryError):
        layout_faces(sf.faces, sf.gluings, sf.side_lengths())


def test_grid_torus_cut_along_seams():
    p, q = 3, 2
    tri, side = grid_torus(p, q)
    gluings = [tuple(sorted((divmod(a, 3), divmod(b, 3)))) for a, b in tri.edges.values()]
    # lower triangle of square (x, y) is face 2(x + p y); its side 0 crosses x = p, side 2 crosses y = 0
    cut = [(2 * (p - 1 + p * y), 0) for y in range(q)] + [(2 * x, 2) for x in range(p)]
    pos = layout_faces(tri.faces, gluings, side, cut=cut)
    assert layout_edge_lengths(pos) == pytest.approx(side, abs=1e-12)
    pts = pos.reshape(-1, 2)
    assert pts.min(axis=0) == pytest.approx([0, 0], abs=1e-12)
    assert pts.max(axis=0) == pytest.approx([p, q], abs=1e-12)
    assert np.abs(pts - np.round(pts)).max() < 1e-12


def test_solved_disk_layout():
    pos0 = np.array([[0.0, 0.0], [1.3, 0.1], [0.2, 0.9], [0.7, -0.05], [0.8, 0.6], [0.05, 0.5]])
    disk = right_triangle_disk(pos0, radii=[0.05, 0.1, 0.0, 0.08, 0.0, 0.06])
    targets = np.array([math.pi / 2, math.pi / 4, math.pi / 4, math.pi, math.pi, math.pi])
    res = solve_boundary(disk, targets)
    d = res.disk
    pos = layout_faces(d.faces, d.interior_gluings, d.side_lengths)
    assert layout_edge_lengths(pos) == pytest.approx(d.side_lengths, abs=1e-9)
    sums = np.zeros(d.n_vertices)
    for f in range(len(d.faces)):
        for k in range(3):
            sums[d.faces[f, k]] += corner_angle(pos, f, k)
    assert sums == pytest.approx(targets, abs=1e-8)


def test_nonflat_disk_rejected():
    # four triangles around an interior vertex with angle sum != 2 pi
    faces = np.array([(0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 1)])
    side = np.ones((4, 3))
    gl = [((0, 1), (1, 2)), ((1, 1), (2, 2)), ((2, 1), (3, 2)), ((3, 1), (0, 2))]
    with pytest.raises(GeometryError, match="not flat"):
        layout_faces(faces, gl, side)


def test_interpolation_maps_send_vertices():
    rng = np.random.default_rng(0)
    disk = right_triangle_disk(radii=[0.05, 0.1, 0.0, 0.08, 0.0, 0.06])
    u = rng.uniform(-0.2, 0.2, disk.n_vertices)
    maps = interpolation_maps(disk.faces, disk.side_lengths, disk.radii, u)
    assert maps.shape == (4, 3, 3)
    for f, (i, j, k) in enumerate(disk.faces):
        L = disk.side_lengths[f]
        src = triangle_power((L[2], L[0], L[1]), disk.radii[[i, j, k]])
        img = apply_projective(maps[f], src.layout)
        new = layout_edge_lengths(img[None])[0]
        r = disk.radii[[i, j, k]]
        uu = u[[i, j, k]]
        for s in range(3):
            a, b = (s + 1) % 3, (s + 2) % 3
            expect = math.sqrt(
                math.exp(uu[a] + uu[b]) * (L[s] ** 2 - r[a] ** 2 - r[b] ** 2)
                + math.exp(2 * uu[a]) * r[a] ** 2
                + math.exp(2 * uu[b]) * r[b] ** 2
            )
            assert new[s] == pytest.approx(expect, rel=1e-10)


def test_interpolation_identity():
    disk = right_triangle_disk()
    maps = interpolation_maps(disk.faces, disk.side_lengths, disk.radii, np.zeros(6))
    for M in maps:
        assert M == pytest.approx(np.eye(3), abs=1e-13)
