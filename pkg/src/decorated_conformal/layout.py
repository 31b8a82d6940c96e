"""Planar layout of flat results and per-face projective interpolation maps."""

from __future__ import annotations

import math
from collections import deque

import numpy as np

from .errors import GeometryError
from .metric import face_corner_angles
from .power import layout_projective_map

__all__ = ["layout_faces", "layout_edge_lengths", "interpolation_maps"]


def _place_apex(a, b, l_ca, angle_a):
    """Apex c left of the directed segment a -> b with |ca| = l_ca and angle at a."""
    d = (b - a) / np.linalg.norm(b - a)
    c, s = math.cos(angle_a), math.sin(angle_a)
    return a + l_ca * np.array([c * d[0] - s * d[1], s * d[0] + c * d[1]])


def layout_faces(faces, gluings, side_lengths, cut=(), atol=1e-9) -> np.ndarray:
    """Isometric breadth-first placement of the faces in the plane.

    ``gluings`` lists glued side pairs ``((f, s), (g, t))``; sides in ``cut``
    are not crossed.  Returns per-corner coordinates of shape (F, 3, 2);
    vertices on seams appear once per corner.  Raises ``GeometryError`` when
    the faces do not form one piece or two layouts of a crossable side
    disagree (metric not flat away from the cut).
    """
    faces = np.asarray(faces, dtype=np.int64)
    L = np.asarray(side_lengths, dtype=float)
    n_f = len(faces)
    ang = face_corner_angles(L)
    cut = {tuple(int(x) for x in c) for c in cut}
    partner = {}
    for a, b in gluings:
        a = tuple(int(x) for x in a)
        b = tuple(int(x) for x in b)
        if a in cut or b in cut:
            continue
        partner[a] = b
        partner[b] = a

    pos = np.full((n_f, 3, 2), np.nan)
    placed = np.zeros(n_f, dtype=bool)
    pos[0, 0] = (0.0, 0.0)
    pos[0, 1] = (L[0, 2], 0.0)
    pos[0, 2] = L[0, 1] * np.array([math.cos(ang[0, 0]), math.sin(ang[0, 0])])
    placed[0] = True
    queue = deque([0])
    scale = float(np.max(L))
    while queue:
        f = queue.popleft()
        for s in range(3):
            if (f, s) not in partner:
                continue
            g, t = partner[(f, s)]
            # side s of f runs corner s+1 -> s+2; side t of g runs the other way
            p_from, p_to = pos[f, (s + 1) % 3], pos[f, (s + 2) % 3]
            if placed[g]:
                q_from, q_to = pos[g, (t + 1) % 3], pos[g, (t + 2) % 3]
                err = max(np.linalg.norm(q_from - p_to), np.linalg.norm(q_to - p_from))
                if err > atol * max(1.0, scale):
                    raise GeometryError(
                        f"layout mismatch of {err:.3g} across sides ({f}, {s}) and ({g}, {t}); "
                        "the metric is not flat away from the cut"
                    )
                continue
            a_c, b_c = (t + 1) % 3, (t + 2) % 3
            pos[g, a_c] = p_to
            pos[g, b_c] = p_from
            pos[g, t] = _place_apex(p_to, p_from, L[g, b_c], ang[g, a_c])
            placed[g] = True
            queue.append(g)
    if not placed.all():
        raise GeometryError("faces are not connected across uncut sides")
    return pos


def layout_edge_lengths(pos) -> np.ndarray:
    """Side lengths (F, 3) measured in a layout."""
    pos = np.asarray(pos)
    return np.linalg.norm(pos[:, [2, 0, 1]] - pos[:, [1, 2, 0]], axis=-1)


def interpolation_maps(faces, side_lengths, radii, u) -> np.ndarray:
    """Per-face 3x3 projective maps from the source to the scaled triangle.

    Matrices act on homogeneous coordinates of each face's canonical layout
    (corner 0 at the origin, corner 1 on the positive x-axis).
    """
    faces = np.asarray(faces, dtype=np.int64)
    L = np.asarray(side_lengths, dtype=float)
    r = np.asarray(radii, dtype=float)
    u = np.asarray(u, dtype=float)
    out = np.empty((len(faces), 3, 3))
    for f, (i, j, k) in enumerate(faces):
        lengths = (L[f, 2], L[f, 0], L[f, 1])
        out[f] = layout_projective_map(lengths, (r[i], r[j], r[k]), (u[i], u[j], u[k]))
    return out
