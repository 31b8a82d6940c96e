"""Decorated PE-metrics: angles, inversive distances and conformal change."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateTriangleError, InfeasibleScaleError, InversiveDistanceError
from .mesh import Triangulation

__all__ = [
    "DecoratedMetric",
    "AngleData",
    "HyperidealViolation",
    "corner_angles",
    "face_corner_angles",
    "cone_angles",
    "inversive_distance",
    "is_hyperideal",
    "conformal_apply",
    "scale_from_triangles",
    "gauss_bonnet_defect",
    "uniform_targets",
]


@dataclass
class DecoratedMetric:
    """Edge lengths (by edge id) and vertex-circle radii (by vertex id)."""

    lengths: dict
    radii: np.ndarray

    def __post_init__(self):
        self.lengths = {int(e): float(v) for e, v in self.lengths.items()}
        self.radii = np.asarray(self.radii, dtype=float)

    def copy(self) -> "DecoratedMetric":
        return DecoratedMetric(dict(self.lengths), self.radii.copy())

    def face_lengths(self, tri: Triangulation) -> np.ndarray:
        """(F, 3) array; entry ``[f, k]`` is the length of the side opposite corner k."""
        lens = np.array([self.lengths[int(e)] for e in tri.edge_of])
        return lens.reshape(-1, 3)

    def face_radii(self, tri: Triangulation) -> np.ndarray:
        return self.radii[tri.faces]

    def scaled(self, factor: float) -> "DecoratedMetric":
        return DecoratedMetric(
            {e: factor * v for e, v in self.lengths.items()}, factor * self.radii
        )

    def check(self, tri: Triangulation) -> None:
        if set(self.lengths) != set(tri.edges):
            raise ValueError("metric edge set does not match the triangulation")
        if len(self.radii) != tri.n_vertices:
            raise ValueError("one radius per vertex required")
        if np.any(self.radii < 0) or not np.all(np.isfinite(self.radii)):
            raise ValueError("radii must be finite and nonnegative")
        if any(not (v > 0 and math.isfinite(v)) for v in self.lengths.values()):
            raise ValueError("lengths must be finite and positive")
        face_corner_angles(self.face_lengths(tri))


@dataclass
class AngleData:
    corner: np.ndarray  # (F, 3), corner k of face f
    cone: np.ndarray  # (V,)
    targets: np.ndarray | None = field(default=None)

    def residual(self) -> np.ndarray:
        if self.targets is None:
            raise ValueError("no target angles attached")
        return self.cone - self.targets


@dataclass(frozen=True)
class HyperidealViolation:
    edge: int
    i: int
    j: int
    length: float
    r_i: float
    r_j: float

    def __str__(self):
        return (
            f"edge {self.edge} ({self.i}-{self.j}): circles intersect, "
            f"length {self.length:.6g} <= {self.r_i:.6g} + {self.r_j:.6g}"
        )


def face_corner_angles(L: np.ndarray) -> np.ndarray:
    """Corner angles of triangles with side ``L[..., k]`` opposite corner ``k``.

    Uses the half-angle form ``theta = 2 atan2(sqrt((s-b)(s-c)), sqrt(s(s-a)))``
    which stays accurate for needle-shaped triangles.
    """
    L = np.asarray(L, dtype=float)
    a = L[..., 0]
    b = L[..., 1]
    c = L[..., 2]
    pa = -a + b + c
    pb = a - b + c
    pc = a + b - c
    bad = ~((pa > 0) & (pb > 0) & (pc > 0))
    if np.any(bad):
        idx = np.argwhere(bad)
        face = int(idx[0][0]) if idx.size else None
        raise DegenerateTriangleError(
            f"triangle inequality violated in face {face}", face=face
        )
    s = a + b + c
    ta = 2.0 * np.arctan2(np.sqrt(pb * pc), np.sqrt(s * pa))
    tb = 2.0 * np.arctan2(np.sqrt(pc * pa), np.sqrt(s * pb))
    tc = 2.0 * np.arctan2(np.sqrt(pa * pb), np.sqrt(s * pc))
    return np.stack([ta, tb, tc], axis=-1)


def corner_angles(l_ij: float, l_jk: float, l_ki: float) -> tuple[float, float, float]:
    """Angles ``(theta_i, theta_j, theta_k)`` of triangle ijk from its side lengths."""
    try:
        t = face_corner_angles(np.array([[l_jk, l_ki, l_ij]]))[0]
    except DegenerateTriangleError:
        raise DegenerateTriangleError(
            f"triangle inequality violated for lengths ({l_ij}, {l_jk}, {l_ki})"
        ) from None
    return float(t[0]), float(t[1]), float(t[2])


def cone_angles(tri: Triangulation, metric: DecoratedMetric, targets=None) -> AngleData:
    corner = face_corner_angles(metric.face_lengths(tri))
    cone = np.bincount(
        tri.faces.ravel(), weights=corner.ravel(), minlength=tri.n_vertices
    )
    t = None if targets is None else np.asarray(targets, dtype=float)
    return AngleData(corner=corner, cone=cone, targets=t)


def inversive_distance(length: float, r_i: float, r_j: float) -> float:
    if r_i <= 0 or r_j <= 0:
        raise InversiveDistanceError("inversive distance needs two positive radii")
    return (length * length - r_i * r_i - r_j * r_j) / (2.0 * r_i * r_j)


def is_hyperideal(tri: Triangulation, metric: DecoratedMetric) -> list[HyperidealViolation]:
    """Edges whose endpoint circles are not disjoint (empty list if hyperideal)."""
    out = []
    r = metric.radii
    for e in tri.edge_ids():
        i, j = tri.endpoints(e)
        length = metric.lengths[e]
        if r[i] == 0 and r[j] == 0:
            continue
        if not length > r[i] + r[j]:
            out.append(HyperidealViolation(e, i, j, length, float(r[i]), float(r[j])))
    return out


def conformal_apply(tri: Triangulation, metric: DecoratedMetric, u) -> DecoratedMetric:
    """Decorated conformal change of ``metric`` by log scale factors ``u``.

    Radii scale by ``exp(u_i)``; lengths follow the rule that keeps every
    edge's inversive distance fixed.  Raises ``InfeasibleScaleError`` when the
    result is not a valid metric on ``tri``.
    """
    u = np.asarray(u, dtype=float)
    r = metric.radii
    new_lengths = {}
    for e, (h, _) in tri.edges.items():
        i, j = tri.origin(h), tri.dest(h)
        length = metric.lengths[e]
        ui, uj = u[i], u[j]
        if i == j:
            new_lengths[e] = math.exp(ui) * length
            continue
        sq = (
            math.exp(ui + uj) * (length * length - r[i] * r[i] - r[j] * r[j])
            + math.exp(2 * ui) * r[i] * r[i]
            + math.exp(2 * uj) * r[j] * r[j]
        )
        if not sq > 0:
            raise InfeasibleScaleError(f"squared length of edge {e} is {sq:.3g} <= 0")
        new_lengths[e] = math.sqrt(sq)
    out = DecoratedMetric(new_lengths, np.exp(u) * r)
    try:
        face_corner_angles(out.face_lengths(tri))
    except DegenerateTriangleError as exc:
        raise InfeasibleScaleError(f"scale factors break face {exc.face}") from None
    return out


def scale_from_triangles(lengths, radii, new_lengths, new_radii) -> np.ndarray:
    """Recover ``exp(2 u)`` at the three corners of a face from two decorations.

    ``lengths = (l_ij, l_jk, l_ki)`` and ``radii = (r_i, r_j, r_k)``; the tilde
    quantities describe the changed triangle.  Valid also for zero radii.
    """
    l = np.asarray(lengths, dtype=float)
    r = np.asarray(radii, dtype=float)
    nl = np.asarray(new_lengths, dtype=float)
    nr = np.asarray(new_radii, dtype=float)
    # side s joins corners (s, s+1): ij, jk, ki
    a = np.array([l[s] ** 2 - r[s] ** 2 - r[(s + 1) % 3] ** 2 for s in range(3)])
    b = np.array([nl[s] ** 2 - nr[s] ** 2 - nr[(s + 1) % 3] ** 2 for s in range(3)])
    if np.any(a == 0) or np.any(b == 0):
        raise ZeroDivisionError("tangent-orthogonal configuration: l^2 = r_i^2 + r_j^2")
    q = b / a
    # corner c touches sides c (c, c+1) and c-1 (c-1, c); opposite side is c+1
    return np.array([q[c] * q[(c + 2) % 3] / q[(c + 1) % 3] for c in range(3)])


def gauss_bonnet_defect(targets, genus: int, n_vertices: int) -> float:
    return float(np.sum(targets)) / (2 * math.pi) - (2 * genus - 2 + n_vertices)


def uniform_targets(genus: int, n_vertices: int) -> np.ndarray:
    return np.full(n_vertices, 2 * math.pi * (2 * genus - 2 + n_vertices) / n_vertices)
