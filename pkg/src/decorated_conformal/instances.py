"""Small decorated surfaces used by the tests, the examples and the CLI."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GeometryError, SurfaceError
from .mesh import Triangulation, build_surface
from .metric import DecoratedMetric, face_corner_angles, is_hyperideal

__all__ = [
    "Disk",
    "lattice_torus",
    "grid_torus",
    "random_torus",
    "doubled_triangle",
    "hull_sphere",
    "random_sphere",
    "surface_from_faces",
    "metric_from_side_lengths",
    "disk_from_faces",
    "right_triangle_disk",
    "random_radii",
]


def _pair_sides(faces):
    """Match sides of a simplicial face list by their endpoint pairs."""
    faces = np.asarray(faces, dtype=np.int64)
    by_dir = {}
    for f, tri in enumerate(faces):
        for s in range(3):
            a, b = int(tri[(s + 1) % 3]), int(tri[(s + 2) % 3])
            if (a, b) in by_dir:
                raise SurfaceError(f"directed edge {a}->{b} used twice")
            by_dir[(a, b)] = (f, s)
    gluings, boundary = [], []
    for (a, b), fs in sorted(by_dir.items(), key=lambda kv: kv[1]):
        other = by_dir.get((b, a))
        if other is None:
            boundary.append(fs)
        elif fs < other:
            gluings.append((fs, other))
    return gluings, boundary


def surface_from_faces(faces) -> Triangulation:
    """Closed surface from faces that are determined by vertex pairs."""
    gluings, boundary = _pair_sides(faces)
    if boundary:
        raise SurfaceError(f"unpaired side {boundary[0]} (surface not closed)")
    return build_surface(faces, gluings)


def metric_from_side_lengths(tri: Triangulation, side_lengths, radii, atol=1e-9) -> DecoratedMetric:
    """Metric from an (F, 3) array of side lengths; glued sides must agree."""
    side = np.asarray(side_lengths, dtype=float).reshape(-1)
    lengths = {}
    for e, (h0, h1) in tri.edges.items():
        if abs(side[h0] - side[h1]) > atol * max(1.0, side[h0]):
            raise GeometryError(
                f"sides {divmod(h0, 3)} and {divmod(h1, 3)} carry different lengths"
            )
        lengths[e] = float(side[h0])
    return DecoratedMetric(lengths, np.asarray(radii, dtype=float))


def random_radii(tri: Triangulation, lengths: dict, rng, scale=0.3, p_zero=0.25) -> np.ndarray:
    """Radii bounded by ``scale`` times the shortest incident edge; some are zero."""
    shortest = np.full(tri.n_vertices, np.inf)
    for e in tri.edge_ids():
        i, j = tri.endpoints(e)
        shortest[i] = min(shortest[i], lengths[e])
        shortest[j] = min(shortest[j], lengths[e])
    r = scale * shortest * rng.uniform(0.2, 1.0, tri.n_vertices)
    r[rng.random(tri.n_vertices) < p_zero] = 0.0
    return r


def lattice_torus(a=(1.0, 0.0), b=(0.0, 1.0), radius: float = 0.0):
    """One-vertex torus from the lattice spanned by ``a`` and ``b``.

    Faces are the triangles (0, a, a+b) and (0, a+b, b); edge 0 is ``b``,
    edge 1 the diagonal ``a+b`` and edge 2 is ``a``.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a[0] * b[1] - a[1] * b[0] <= 0:
        raise ValueError("lattice basis must be positively oriented")
    faces = [(0, 0, 0), (0, 0, 0)]
    gluings = [((0, 2), (1, 0)), ((0, 0), (1, 1)), ((0, 1), (1, 2))]
    tri = build_surface(faces, gluings)
    lengths = {0: float(np.hypot(*b)), 1: float(np.hypot(*(a + b))), 2: float(np.hypot(*a))}
    return tri, DecoratedMetric(lengths, np.array([float(radius)]))


def grid_torus(p: int, q: int, positions=None, spacing=(1.0, 1.0)):
    """Periodic ``p x q`` grid torus, every square split along its rising diagonal.

    ``positions`` is an optional (q, p, 2) array of vertex offsets from the
    lattice points.  Returns the triangulation and an (F, 3) side-length array.
    """
    sx, sy = spacing
    off = np.zeros((q, p, 2)) if positions is None else np.asarray(positions, dtype=float)

    def vid(x, y):
        return (x % p) + p * (y % q)

    def pos(x, y):
        return np.array([x * sx, y * sy]) + off[y % q, x % p]

    faces, side_len = [], []
    for y in range(q):
        for x in range(p):
            v00, v10, v11, v01 = vid(x, y), vid(x + 1, y), vid(x + 1, y + 1), vid(x, y + 1)
            P00, P10, P11, P01 = pos(x, y), pos(x + 1, y), pos(x + 1, y + 1), pos(x, y + 1)
            faces.append((v00, v10, v11))
            side_len.append(
                (np.linalg.norm(P11 - P10), np.linalg.norm(P11 - P00), np.linalg.norm(P10 - P00))
            )
            faces.append((v00, v11, v01))
            side_len.append(
                (np.linalg.norm(P01 - P11), np.linalg.norm(P01 - P00), np.linalg.norm(P11 - P00))
            )

    def sq(x, y):
        return (x % p) + p * (y % q)

    gluings = []
    for y in range(q):
        for x in range(p):
            s = sq(x, y)
            low, up = 2 * s, 2 * s + 1
            gluings.append(((low, 1), (up, 2)))
            gluings.append(((low, 0), (2 * sq(x + 1, y) + 1, 1)))
            gluings.append(((low, 2), (2 * sq(x, y - 1) + 1, 0)))
    tri = build_surface(faces, gluings)
    return tri, np.array(side_len)


def random_torus(rng, p=2, q=2, jitter=0.15, noise=0.05, radius_scale=0.3, p_zero=0.25):
    """Random decorated torus: jittered grid with multiplicative length noise.

    The decoration is hyperideal on the returned triangulation; retry with
    another seed on ``GeometryError``.
    """
    for _ in range(100):
        off = rng.uniform(-jitter, jitter, (q, p, 2))
        tri, side = grid_torus(p, q, off)
        m = metric_from_side_lengths(tri, side, np.zeros(tri.n_vertices))
        m.lengths = {e: v * math.exp(rng.uniform(-noise, noise)) for e, v in m.lengths.items()}
        try:
            face_corner_angles(m.face_lengths(tri))
        except GeometryError:
            continue
        m.radii = random_radii(tri, m.lengths, rng, radius_scale, p_zero)
        if not is_hyperideal(tri, m):
            return tri, m
    raise GeometryError("could not generate a valid random torus")


def doubled_triangle(l_ij=1.0, l_jk=1.0, l_ki=1.0, radii=(0.0, 0.0, 0.0)):
    """Sphere from two copies of triangle (0, 1, 2) glued along their boundary."""
    faces = [(0, 1, 2), (0, 2, 1)]
    tri = surface_from_faces(faces)
    side = np.array([[l_jk, l_ki, l_ij], [l_jk, l_ij, l_ki]])
    return tri, metric_from_side_lengths(tri, side, radii)


def hull_sphere(points, radii=None):
    """Sphere triangulated by the convex hull of 3D ``points`` (chord lengths)."""
    from scipy.spatial import ConvexHull

    pts = np.asarray(points, dtype=float)
    hull = ConvexHull(pts)
    if len(hull.vertices) != len(pts):
        raise GeometryError("not all points are hull vertices")
    centroid = pts.mean(axis=0)
    faces = []
    for simplex in hull.simplices:
        a, b, c = (int(x) for x in simplex)
        normal = np.cross(pts[b] - pts[a], pts[c] - pts[a])
        if np.dot(normal, pts[a] - centroid) < 0:
            b, c = c, b
        faces.append((a, b, c))
    tri = surface_from_faces(faces)
    F = np.asarray(faces)
    side = np.linalg.norm(pts[F[:, [2, 0, 1]]] - pts[F[:, [1, 2, 0]]], axis=-1)
    r = np.zeros(len(pts)) if radii is None else np.asarray(radii, dtype=float)
    return tri, metric_from_side_lengths(tri, side, r)


def random_sphere(rng, n: int, radius_scale=0.3, p_zero=0.25, noise=0.03):
    """Random decorated sphere with ``n >= 3`` vertices."""
    for _ in range(100):
        if n == 3:
            lens = rng.uniform(0.8, 1.2, 3)
            tri, m = doubled_triangle(*lens)
        else:
            x = rng.normal(size=(n, 3))
            x /= np.linalg.norm(x, axis=1, keepdims=True)
            try:
                tri, m = hull_sphere(x)
            except GeometryError:
                continue
        m.lengths = {e: v * math.exp(rng.uniform(-noise, noise)) for e, v in m.lengths.items()}
        try:
            face_corner_angles(m.face_lengths(tri))
        except GeometryError:
            continue
        m.radii = random_radii(tri, m.lengths, rng, radius_scale, p_zero)
        if not is_hyperideal(tri, m):
            return tri, m
    raise GeometryError("could not generate a valid random sphere")


@dataclass
class Disk:
    """Triangulated disk: faces, interior gluings, boundary sides and side lengths."""

    faces: np.ndarray
    interior_gluings: list
    boundary_sides: list
    side_lengths: np.ndarray  # (F, 3), side k opposite corner k
    radii: np.ndarray

    @property
    def n_vertices(self) -> int:
        return int(self.faces.max()) + 1

    def boundary_vertices(self) -> list[int]:
        return sorted({int(self.faces[f, (s + 1) % 3]) for f, s in self.boundary_sides})

    def interior_vertices(self) -> list[int]:
        b = set(self.boundary_vertices())
        return [v for v in range(self.n_vertices) if v not in b]

    def corner_angles(self) -> np.ndarray:
        return face_corner_angles(self.side_lengths)

    def angle_sums(self) -> np.ndarray:
        ang = self.corner_angles()
        return np.bincount(self.faces.ravel(), weights=ang.ravel(), minlength=self.n_vertices)


def disk_from_faces(faces, side_lengths, radii=None) -> Disk:
    faces = np.asarray(faces, dtype=np.int64)
    gluings, boundary = _pair_sides(faces)
    if not boundary:
        raise SurfaceError("surface has no boundary")
    r = np.zeros(int(faces.max()) + 1) if radii is None else np.asarray(radii, dtype=float)
    return Disk(faces, gluings, boundary, np.asarray(side_lengths, dtype=float), r)


def _side_lengths_from_positions(faces, pos):
    F = np.asarray(faces)
    return np.linalg.norm(pos[F[:, [2, 0, 1]]] - pos[F[:, [1, 2, 0]]], axis=-1)


def right_triangle_disk(positions=None, radii=None) -> Disk:
    """Triangle with edge midpoints, split into four faces.

    Vertices 0, 1, 2 are the corners and 3, 4, 5 the midpoints of 01, 12, 20.
    ``positions`` defaults to an isosceles right triangle with the right
    angle at vertex 0.
    """
    faces = np.array([(0, 3, 5), (3, 1, 4), (5, 4, 2), (3, 4, 5)])
    if positions is None:
        c = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
        positions = np.vstack([c, 0.5 * (c + c[[1, 2, 0]])])
    pos = np.asarray(positions, dtype=float)
    return disk_from_faces(faces, _side_lengths_from_positions(faces, pos), radii)
