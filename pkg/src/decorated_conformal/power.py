"""Euclidean power geometry of decorated triangles.

For a triangle with vertex circles the face-circle is the circle orthogonal
to all three vertex circles; its center is the radical center.  Each side
carries a power radius (half the chord the face-circle cuts from the side
line), the signed distance of the face-circle center to the side, and the
intersection angle ``alpha`` between face-circle and side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CirclesNotDisjointError, GeometryError
from .metric import face_corner_angles

__all__ = [
    "FacePower",
    "TrianglePowerData",
    "MinkowskiLift",
    "edge_power",
    "face_power",
    "triangle_power",
    "minkowski_lift",
    "projective_map",
    "layout_projective_map",
    "apply_projective",
    "minkowski_form",
]

# triangle ijk is stored with corners (i, j, k) = (0, 1, 2); side s is opposite
# corner s, so edges (ij, jk, ki) are sides (2, 0, 1)
_EDGE_TO_SIDE = (2, 0, 1)


def edge_power(length: float, r_i: float, r_j: float) -> tuple[float, float]:
    """Foot of the radical axis on edge ij and the power radius ``r_ij``.

    Returns ``(x_i, r_ij)``: distance from vertex i to the foot, and the
    square root of the common power of the foot.
    """
    x_i = (length * length + r_i * r_i - r_j * r_j) / (2.0 * length)
    sq = _power_radius_sq(length, r_i, r_j)
    if not sq > 0:
        raise CirclesNotDisjointError(
            f"circles of radii {r_i}, {r_j} at distance {length} are not disjoint"
        )
    return x_i, math.sqrt(sq)


def _power_radius_sq(length, r_a, r_b):
    # x^2 - r_a^2 in factored form, positive iff length > r_a + r_b
    return (
        (length * length - (r_a + r_b) ** 2)
        * (length * length - (r_a - r_b) ** 2)
        / (4.0 * length * length)
    )


@dataclass
class FacePower:
    """Vectorized power data; side ``k`` is opposite corner ``k``."""

    layout: np.ndarray  # (..., 3, 2) corner positions, corner 0 at origin, corner 1 on +x
    angles: np.ndarray  # (..., 3) corner angles
    center: np.ndarray  # (..., 2) face-circle center
    r_face_sq: np.ndarray  # (...)
    foot: np.ndarray  # (..., 3) distance from corner k+1 to the radical-axis foot on side k
    r_side: np.ndarray  # (..., 3) power radius of side k
    d: np.ndarray  # (..., 3) signed distance of center to side k, > 0 towards the triangle
    alpha: np.ndarray  # (..., 3) face-circle / side intersection angle in (0, pi)


def face_power(L, R) -> FacePower:
    """Power data for triangles with sides ``L[..., k]`` and radii ``R[..., k]``."""
    L = np.asarray(L, dtype=float)
    R = np.asarray(R, dtype=float)
    angles = face_corner_angles(L)
    shape = L.shape[:-1]

    a_idx = [1, 2, 0]  # start corner of side k
    b_idx = [2, 0, 1]  # end corner of side k
    Ra = R[..., a_idx]
    Rb = R[..., b_idx]
    r_side_sq = _power_radius_sq(L, Ra, Rb)
    if np.any(~(r_side_sq > 0)):
        bad = np.argwhere(~(r_side_sq > 0))[0]
        raise CirclesNotDisjointError(
            f"vertex circles intersect on side {tuple(int(x) for x in bad)}"
        )
    r_side = np.sqrt(r_side_sq)
    foot = (L * L + Ra * Ra - Rb * Rb) / (2.0 * L)

    layout = np.zeros(shape + (3, 2))
    layout[..., 1, 0] = L[..., 2]
    layout[..., 2, 0] = L[..., 1] * np.cos(angles[..., 0])
    layout[..., 2, 1] = L[..., 1] * np.sin(angles[..., 0])

    cx = (L[..., 2] ** 2 + R[..., 0] ** 2 - R[..., 1] ** 2) / (2.0 * L[..., 2])
    px, py = layout[..., 2, 0], layout[..., 2, 1]
    cy = (L[..., 1] ** 2 - R[..., 2] ** 2 + R[..., 0] ** 2 - 2.0 * cx * px) / (2.0 * py)
    center = np.stack([cx, cy], axis=-1)
    r_face_sq = cx * cx + cy * cy - R[..., 0] ** 2
    if np.any(~(r_face_sq > 0)):
        raise GeometryError("face-circle has nonpositive squared radius (not hyperideal)")

    pa = layout[..., a_idx, :]
    pb = layout[..., b_idx, :]
    edge = pb - pa
    rel = center[..., None, :] - pa
    d = (edge[..., 0] * rel[..., 1] - edge[..., 1] * rel[..., 0]) / L
    alpha = np.arctan2(r_side, d)
    return FacePower(layout, angles, center, r_face_sq, foot, r_side, d, alpha)


@dataclass
class TrianglePowerData:
    """Power data of one triangle ijk; per-edge arrays ordered (ij, jk, ki)."""

    layout: np.ndarray  # positions of i, j, k; i at origin, j on +x, k above
    center: np.ndarray
    r_face_sq: float
    foot: np.ndarray  # x_i on ij, x_j on jk, x_k on ki
    r_edge: np.ndarray
    d: np.ndarray
    alpha: np.ndarray

    @property
    def r_face(self) -> float:
        return math.sqrt(self.r_face_sq)


def _corner_arrays(lengths, radii):
    l_ij, l_jk, l_ki = (float(x) for x in lengths)
    return np.array([l_jk, l_ki, l_ij]), np.asarray(radii, dtype=float)


def triangle_power(lengths, radii) -> TrianglePowerData:
    """Power data of a decorated triangle.

    ``lengths = (l_ij, l_jk, l_ki)``, ``radii = (r_i, r_j, r_k)``.
    """
    L, R = _corner_arrays(lengths, radii)
    fp = face_power(L, R)
    s = list(_EDGE_TO_SIDE)
    return TrianglePowerData(
        layout=fp.layout,
        center=fp.center,
        r_face_sq=float(fp.r_face_sq),
        foot=fp.foot[s],
        r_edge=fp.r_side[s],
        d=fp.d[s],
        alpha=fp.alpha[s],
    )


def minkowski_form(p, q) -> float:
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    return p[..., 0] * q[..., 0] + p[..., 1] * q[..., 1] - p[..., 2] * q[..., 2]


@dataclass
class MinkowskiLift:
    points: np.ndarray  # (3, 3) rows p_i, p_j, p_k in R^{2,1}
    center: np.ndarray  # face-circle center in the planar layout
    r_face: float

    def matrix(self) -> np.ndarray:
        """Lifts as columns."""
        return self.points.T.copy()


def minkowski_lift(lengths, radii) -> MinkowskiLift:
    """Lift a decorated triangle into the plane ``z = r_face`` of R^{2,1}.

    The layout is translated so the face-circle center sits on the z-axis.
    """
    tp = triangle_power(lengths, radii)
    r_face = tp.r_face
    pts = np.empty((3, 3))
    pts[:, :2] = tp.layout - tp.center
    pts[:, 2] = r_face
    return MinkowskiLift(pts, tp.center.copy(), r_face)


def _changed_triangle(lengths, radii, u):
    l = np.asarray(lengths, dtype=float)
    r = np.asarray(radii, dtype=float)
    u = np.asarray(u, dtype=float)
    new_l = np.empty(3)
    for s in range(3):
        a, b = s, (s + 1) % 3
        sq = (
            math.exp(u[a] + u[b]) * (l[s] ** 2 - r[a] ** 2 - r[b] ** 2)
            + math.exp(2 * u[a]) * r[a] ** 2
            + math.exp(2 * u[b]) * r[b] ** 2
        )
        new_l[s] = math.sqrt(sq)
    return new_l, np.exp(u) * r


def projective_map(lengths, radii, u) -> np.ndarray:
    """Face-circle preserving map between a decorated triangle and its conformal image.

    Returns the 3x3 matrix acting on Minkowski lifts: it sends the lift of
    each source vertex to a positive multiple of the lift of the image
    vertex, and it is a Lorentz transformation, so the light cone (and with
    it the face-circle) is preserved.
    """
    src = minkowski_lift(lengths, radii)
    new_l, new_r = _changed_triangle(lengths, radii, u)
    dst = minkowski_lift(new_l, new_r)
    P = src.matrix()
    Q = dst.matrix()
    if abs(np.linalg.det(P)) < 1e-300:
        raise GeometryError("singular lift matrix")
    return Q @ np.diag(np.exp(-np.asarray(u, dtype=float))) @ np.linalg.inv(P)


def _chart(center, r_face):
    cx, cy = center
    return np.array([[1.0, 0.0, -cx], [0.0, 1.0, -cy], [0.0, 0.0, r_face]])


def layout_projective_map(lengths, radii, u) -> np.ndarray:
    """``projective_map`` expressed on homogeneous layout coordinates ``(x, y, 1)``.

    Both source and image use the canonical layout (i at the origin, j on the
    positive x-axis, k above).
    """
    src = minkowski_lift(lengths, radii)
    new_l, new_r = _changed_triangle(lengths, radii, u)
    dst = minkowski_lift(new_l, new_r)
    L = projective_map(lengths, radii, u)
    M = np.linalg.inv(_chart(dst.center, dst.r_face)) @ L @ _chart(src.center, src.r_face)
    return M / M[2, 2] if abs(M[2, 2]) > 1e-300 else M


def apply_projective(M, points) -> np.ndarray:
    """Apply a homogeneous 3x3 map to planar points of shape (n, 2)."""
    pts = np.asarray(points, dtype=float)
    hom = np.column_stack([pts, np.ones(len(pts))]) @ np.asarray(M).T
    return hom[:, :2] / hom[:, 2:3]
