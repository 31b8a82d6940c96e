"""Half-edge representation of closed oriented triangulated surfaces.

Conventions
-----------
Face ``f`` has corners ``0, 1, 2`` stored counter-clockwise in ``faces[f]``.
Side ``k`` of face ``f`` is the side *opposite* corner ``k``; it is the
half-edge ``h = 3*f + k`` running from corner ``k+1`` to corner ``k+2``
(indices mod 3).  Every per-face array of shape ``(F, 3)`` in this package
is therefore indexed both by corner and by the opposite half-edge, and
flattening it gives a per-half-edge array.

Self-gluings and multiple edges between the same vertices are allowed, so
nothing here is ever keyed on pairs of vertex ids.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import FlipError, SurfaceError

__all__ = [
    "Triangulation",
    "DoubledSurface",
    "build_surface",
    "flip",
    "double",
]


class Triangulation:
    """Combinatorial triangulation of a closed oriented surface.

    Attributes
    ----------
    faces : (F, 3) int array of corner vertices.
    twin : (3F,) int array, fixed-point free involution on half-edges.
    edge_of : (3F,) int array mapping a half-edge to its edge id.
    edges : dict edge id -> (h0, h1), the two half-edges of the edge.
    n_vertices, genus : int
    """

    def __init__(self, faces, twin, edge_of, edges, n_vertices, genus, next_edge_id=None):
        self.faces = np.asarray(faces, dtype=np.int64)
        self.twin = np.asarray(twin, dtype=np.int64)
        self.edge_of = np.asarray(edge_of, dtype=np.int64)
        self.edges = dict(edges)
        self.n_vertices = int(n_vertices)
        self.genus = int(genus)
        if next_edge_id is None:
            next_edge_id = max(self.edges) + 1 if self.edges else 0
        self.next_edge_id = int(next_edge_id)

    # -- sizes -------------------------------------------------------------
    @property
    def n_faces(self) -> int:
        return len(self.faces)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_halfedges(self) -> int:
        return 3 * len(self.faces)

    def edge_ids(self) -> list[int]:
        return sorted(self.edges)

    # -- half-edge navigation ---------------------------------------------
    @staticmethod
    def face_of(h: int) -> int:
        return h // 3

    @staticmethod
    def side_of(h: int) -> int:
        return h % 3

    @staticmethod
    def next(h: int) -> int:
        return 3 * (h // 3) + (h % 3 + 1) % 3

    @staticmethod
    def prev(h: int) -> int:
        return 3 * (h // 3) + (h % 3 + 2) % 3

    def origin(self, h: int) -> int:
        return int(self.faces[h // 3, (h % 3 + 1) % 3])

    def dest(self, h: int) -> int:
        return int(self.faces[h // 3, (h % 3 + 2) % 3])

    def apex(self, h: int) -> int:
        """Vertex at the corner opposite half-edge ``h``."""
        return int(self.faces[h // 3, h % 3])

    def endpoints(self, e: int) -> tuple[int, int]:
        h = self.edges[e][0]
        return self.origin(h), self.dest(h)

    def is_loop(self, e: int) -> bool:
        i, j = self.endpoints(e)
        return i == j

    def edge_key(self, e: int) -> tuple[int, int]:
        """Smallest ``(face, side)`` among the two sides of edge ``e``."""
        h = min(self.edges[e])
        return h // 3, h % 3

    def outgoing(self, v: int) -> list[int]:
        """Half-edges with origin ``v``, in rotation order (one per corner)."""
        start = None
        for h in range(self.n_halfedges):
            if self.origin(h) == v:
                start = h
                break
        if start is None:
            return []
        orbit = [start]
        h = int(self.twin[self.prev(start)])
        while h != start:
            orbit.append(h)
            h = int(self.twin[self.prev(h)])
        return orbit

    def euler_characteristic(self) -> int:
        return self.n_vertices - self.n_edges + self.n_faces

    # -- copying / validation ---------------------------------------------
    def copy(self) -> "Triangulation":
        return Triangulation(
            self.faces.copy(),
            self.twin.copy(),
            self.edge_of.copy(),
            dict(self.edges),
            self.n_vertices,
            self.genus,
            self.next_edge_id,
        )

    def check(self) -> None:
        """Raise ``SurfaceError`` if any structural invariant is broken."""
        n = self.n_halfedges
        hs = np.arange(n)
        if np.any(self.twin[self.twin] != hs) or np.any(self.twin == hs):
            raise SurfaceError("twin is not a fixed-point free involution")
        nxt = 3 * (hs // 3) + (hs % 3 + 1) % 3
        if np.any(nxt[nxt[nxt]] != hs):
            raise SurfaceError("next^3 is not the identity")
        for h in range(n):
            t = int(self.twin[h])
            if self.origin(h) != self.dest(t) or self.dest(h) != self.origin(t):
                raise SurfaceError(f"half-edges {h} and {t} are not glued oppositely")
            if self.edge_of[h] != self.edge_of[t]:
                raise SurfaceError(f"half-edges {h} and {t} carry different edge ids")
        for e, (a, b) in self.edges.items():
            if self.twin[a] != b or self.edge_of[a] != e:
                raise SurfaceError(f"edge {e} is inconsistent")
        if 2 - 2 * self.genus != self.euler_characteristic():
            raise SurfaceError("Euler relation violated")

    # -- mutation ----------------------------------------------------------
    def flip_edge(self, e: int) -> int:
        """Flip edge ``e`` in place; returns the id of the new diagonal.

        The two incident face slots are reused.  With ``h`` running i->j in
        face ``f`` (apex k) and its twin j->i in face ``g`` (apex l), the new
        faces are ``f = (i, l, k)`` and ``g = (j, k, l)``; the diagonal k-l
        is side 0 of both.
        """
        if e not in self.edges:
            raise FlipError(f"edge {e} does not exist")
        h, t = self.edges[e]
        f, a = divmod(h, 3)
        g, b = divmod(t, 3)
        if f == g:
            raise FlipError(f"edge {e} bounds a single face on both sides")
        k = int(self.faces[f, a])
        i = int(self.faces[f, (a + 1) % 3])
        j = int(self.faces[f, (a + 2) % 3])
        l_ = int(self.faces[g, b])

        # outer half-edges (old index) and their slots in the new faces
        h_jk = 3 * f + (a + 1) % 3
        h_ki = 3 * f + (a + 2) % 3
        h_il = 3 * g + (b + 1) % 3
        h_lj = 3 * g + (b + 2) % 3
        moved = {h_jk: 3 * g + 2, h_ki: 3 * f + 1, h_il: 3 * f + 2, h_lj: 3 * g + 1}

        old_twin = {o: int(self.twin[o]) for o in moved}
        old_edge = {o: int(self.edge_of[o]) for o in moved}

        self.faces[f] = (i, l_, k)
        self.faces[g] = (j, k, l_)
        for o, new in moved.items():
            tw = moved.get(old_twin[o], old_twin[o])
            self.twin[new] = tw
            self.twin[tw] = new
            self.edge_of[new] = old_edge[o]
        for o, new in moved.items():
            eid = old_edge[o]
            self.edges[eid] = (new, int(self.twin[new]))

        del self.edges[e]
        e_new = self.next_edge_id
        self.next_edge_id += 1
        d0, d1 = 3 * f, 3 * g
        self.twin[d0] = d1
        self.twin[d1] = d0
        self.edge_of[d0] = e_new
        self.edge_of[d1] = e_new
        self.edges[e_new] = (d0, d1)
        return e_new


def build_surface(face_corners, side_gluings) -> Triangulation:
    """Build a closed triangulation from faces and side gluings.

    ``face_corners`` is a sequence of vertex-id triples; ``side_gluings`` a
    sequence of ``((f, s), (g, t))`` pairs.  Every side must occur in exactly
    one pair and glued sides must run in opposite directions.  Edge ids are
    assigned in increasing order of the smaller ``(face, side)`` key.
    """
    faces = np.asarray(face_corners, dtype=np.int64).reshape(-1, 3)
    n_f = len(faces)
    if n_f == 0:
        raise SurfaceError("no faces")
    if faces.min() < 0:
        raise SurfaceError("negative vertex id")
    n_he = 3 * n_f
    twin = np.full(n_he, -1, dtype=np.int64)
    for pair in side_gluings:
        (f, s), (g, t) = pair
        for ff, ss in ((f, s), (g, t)):
            if not (0 <= ff < n_f and 0 <= ss < 3):
                raise SurfaceError(f"side ({ff}, {ss}) out of range")
        h, k = 3 * f + s, 3 * g + t
        if h == k:
            raise SurfaceError(f"side ({f}, {s}) glued to itself")
        if twin[h] >= 0 or twin[k] >= 0:
            dup = (f, s) if twin[h] >= 0 else (g, t)
            raise SurfaceError(f"side {dup} appears in more than one gluing")
        twin[h], twin[k] = k, h
    unpaired = [(int(h // 3), int(h % 3)) for h in np.flatnonzero(twin < 0)]
    if unpaired:
        raise SurfaceError(f"unpaired side {unpaired[0]} (surface not closed)")

    tri = Triangulation(faces, twin, np.full(n_he, -1), {}, 0, 0)
    for h in range(n_he):
        t = int(twin[h])
        if tri.origin(h) != tri.dest(t) or tri.dest(h) != tri.origin(t):
            if tri.origin(h) == tri.origin(t) and tri.dest(h) == tri.dest(t):
                raise SurfaceError(
                    f"orientation mismatch gluing sides {divmod(h, 3)} and {divmod(t, 3)}"
                )
            raise SurfaceError(
                f"endpoint mismatch gluing sides {divmod(h, 3)} and {divmod(t, 3)}"
            )

    edge_of = np.full(n_he, -1, dtype=np.int64)
    edges = {}
    for h in range(n_he):
        if edge_of[h] < 0:
            e = len(edges)
            t = int(twin[h])
            edge_of[h] = edge_of[t] = e
            edges[e] = (h, t)

    # vertices: one rotation orbit per label, labels contiguous
    labels = np.unique(faces)
    n_v = int(faces.max()) + 1
    if len(labels) != n_v:
        missing = sorted(set(range(n_v)) - set(labels.tolist()))
        raise SurfaceError(f"vertex ids not contiguous, missing {missing[:5]}")
    seen = np.zeros(n_he, dtype=bool)
    orbit_labels = []
    for h0 in range(n_he):
        if seen[h0]:
            continue
        v = tri.origin(h0)
        h = h0
        while not seen[h]:
            seen[h] = True
            if tri.origin(h) != v:
                raise SurfaceError("vertex labels inconsistent with gluings")
            h = int(twin[3 * (h // 3) + (h % 3 + 2) % 3])
        orbit_labels.append(v)
    if len(orbit_labels) != n_v:
        raise SurfaceError(
            "a vertex id labels several distinct vertices (non-manifold vertex)"
        )

    # connectivity via face adjacency
    reached = np.zeros(n_f, dtype=bool)
    reached[0] = True
    queue = deque([0])
    while queue:
        f = queue.popleft()
        for s in range(3):
            g = int(twin[3 * f + s]) // 3
            if not reached[g]:
                reached[g] = True
                queue.append(g)
    if not reached.all():
        raise SurfaceError("surface is not connected")

    n_e = len(edges)
    chi = n_v - n_e + n_f
    if (2 - chi) % 2 != 0 or chi > 2:
        raise SurfaceError(f"Euler characteristic {chi} gives no valid genus")
    genus = (2 - chi) // 2
    return Triangulation(faces, twin, edge_of, edges, n_v, genus, n_e)


def flip(tri: Triangulation, e: int) -> Triangulation:
    """Return a copy of ``tri`` with edge ``e`` flipped."""
    out = tri.copy()
    out.flip_edge(e)
    return out


@dataclass
class DoubledSurface:
    """Closed double of a surface with boundary, with its reflection.

    Original faces keep slots ``0..F-1`` and mirror faces are ``F..2F-1``.
    Boundary vertices keep their ids, interior vertex ``v`` is mirrored to a
    new id.  Corner ``k`` of a face maps to corner ``mirror_corner[k]`` of the
    mirror face, and so does side ``k``.
    """

    triangulation: Triangulation
    vertex_map: np.ndarray
    face_map: np.ndarray
    halfedge_map: np.ndarray
    edge_map: dict
    boundary_edges: frozenset
    boundary_vertices: frozenset
    n_original_vertices: int
    n_original_faces: int

    mirror_corner = (0, 2, 1)

    def original_vertices(self) -> np.ndarray:
        return np.arange(self.n_original_vertices)


def double(face_corners, interior_gluings, boundary_sides) -> DoubledSurface:
    """Double a triangulated surface with boundary along its boundary.

    ``boundary_sides`` lists every ``(face, side)`` not covered by
    ``interior_gluings``.
    """
    faces = np.asarray(face_corners, dtype=np.int64).reshape(-1, 3)
    n_f = len(faces)
    boundary_sides = [tuple(int(x) for x in s) for s in boundary_sides]
    if not boundary_sides:
        raise SurfaceError("no boundary sides given")
    if len(set(boundary_sides)) != len(boundary_sides):
        raise SurfaceError("boundary side listed twice")

    # boundary sides must form closed cycles
    balance: dict[int, int] = {}
    for f, s in boundary_sides:
        a = int(faces[f, (s + 1) % 3])
        b = int(faces[f, (s + 2) % 3])
        balance[a] = balance.get(a, 0) + 1
        balance[b] = balance.get(b, 0) - 1
    if any(balance.values()):
        raise SurfaceError("boundary sides do not form closed cycles")

    n_v = int(faces.max()) + 1
    bverts = sorted(balance)
    bset = set(bverts)
    vmap = np.empty(n_v, dtype=np.int64)
    nxt = n_v
    for v in range(n_v):
        if v in bset:
            vmap[v] = v
        else:
            vmap[v] = nxt
            nxt += 1
    n_vd = nxt
    vmap_full = np.empty(n_vd, dtype=np.int64)
    vmap_full[:n_v] = vmap
    for v in range(n_v):
        if vmap[v] != v:
            vmap_full[vmap[v]] = v

    mc = DoubledSurface.mirror_corner
    mirror_faces = np.empty_like(faces)
    for k in range(3):
        mirror_faces[:, mc[k]] = vmap[faces[:, k]]
    all_faces = np.vstack([faces, mirror_faces])

    gluings = []
    for (f, s), (g, t) in interior_gluings:
        gluings.append(((f, s), (g, t)))
        gluings.append(((n_f + f, mc[s]), (n_f + g, mc[t])))
    for f, s in boundary_sides:
        gluings.append(((f, s), (n_f + f, mc[s])))

    tri = build_surface(all_faces, gluings)

    face_map = np.concatenate([np.arange(n_f) + n_f, np.arange(n_f)])
    hmap = np.empty(tri.n_halfedges, dtype=np.int64)
    for f in range(2 * n_f):
        for k in range(3):
            hmap[3 * f + k] = 3 * int(face_map[f]) + mc[k]
    edge_map = {e: int(tri.edge_of[hmap[h0]]) for e, (h0, _) in tri.edges.items()}
    bedges = frozenset(e for e, m in edge_map.items() if m == e)
    return DoubledSurface(
        triangulation=tri,
        vertex_map=vmap_full,
        face_map=face_map,
        halfedge_map=hmap,
        edge_map=edge_map,
        boundary_edges=bedges,
        boundary_vertices=frozenset(bverts),
        n_original_vertices=n_v,
        n_original_faces=n_f,
    )
