"""Plain-text surface files.

Example (square torus, one vertex)::

    surface genus 1 vertices 1 faces 2
    v 0 0.20000000000000001
    f 0 0 0
    f 0 0 0
    g 0 0 1 1
    g 0 1 1 2
    g 0 2 1 0
    l 0 0 1
    l 0 1 1.4142135623730951
    l 0 2 1

Records: ``v id radius [target]``, ``f a b c`` (faces numbered in order),
``g f s g t`` (side s of face f glued to side t of face g) and
``l f s length``.  Side ``s`` of a face is the side opposite corner ``s``.
One length per edge is required; it may be given on either side of a
gluing.  In a ``surface disk`` file unglued sides form the boundary.
Blank lines and text after ``#`` are ignored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import GeometryError, ParseError
from .instances import Disk
from .mesh import Triangulation, build_surface
from .metric import DecoratedMetric

__all__ = ["SurfaceFile", "parse_surface", "read_surface", "write_surface", "fmt"]


def fmt(x: float) -> str:
    """Float with 17 significant digits (exact round trip for binary64)."""
    return format(float(x), ".17g")


@dataclass
class SurfaceFile:
    kind: str  # "closed" or "disk"
    genus: int | None
    radii: np.ndarray
    targets: np.ndarray  # nan where absent
    faces: np.ndarray
    gluings: list  # ((f, s), (g, t)) with (f, s) < (g, t), sorted
    lengths: dict  # canonical (face, side) key -> length

    @property
    def n_vertices(self) -> int:
        return len(self.radii)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    def has_targets(self) -> bool:
        return bool(np.all(np.isfinite(self.targets)))

    def side_lengths(self) -> np.ndarray:
        """(F, 3) lengths, both sides of a gluing carrying the edge length."""
        out = np.empty((self.n_faces, 3))
        partner = {}
        for a, b in self.gluings:
            partner[a] = b
            partner[b] = a
        for f in range(self.n_faces):
            for s in range(3):
                key = min((f, s), partner.get((f, s), (f, s)))
                out[f, s] = self.lengths[key]
        return out

    def boundary_sides(self) -> list:
        used = {x for pair in self.gluings for x in pair}
        return [(f, s) for f in range(self.n_faces) for s in range(3) if (f, s) not in used]

    # -- conversion ----------------------------------------------------------
    def to_closed(self) -> tuple[Triangulation, DecoratedMetric]:
        if self.kind != "closed":
            raise GeometryError("file describes a disk, not a closed surface")
        tri = build_surface(self.faces, self.gluings)
        if self.genus is not None and tri.genus != self.genus:
            raise GeometryError(
                f"header genus {self.genus} but the gluings give genus {tri.genus}"
            )
        lengths = {}
        for e, (h0, h1) in tri.edges.items():
            lengths[e] = self.lengths[min(divmod(h0, 3), divmod(h1, 3))]
        return tri, DecoratedMetric(lengths, self.radii.copy())

    def to_disk(self) -> Disk:
        if self.kind != "disk":
            raise GeometryError("file describes a closed surface, not a disk")
        bsides = self.boundary_sides()
        if not bsides:
            raise GeometryError("disk has no boundary sides")
        return Disk(
            self.faces.copy(), list(self.gluings), bsides, self.side_lengths(), self.radii.copy()
        )

    @classmethod
    def from_closed(cls, tri: Triangulation, metric: DecoratedMetric, targets=None) -> "SurfaceFile":
        gluings = []
        lengths = {}
        for e, (h0, h1) in tri.edges.items():
            a, b = sorted((divmod(h0, 3), divmod(h1, 3)))
            gluings.append((a, b))
            lengths[a] = metric.lengths[e]
        gluings.sort()
        return cls(
            kind="closed",
            genus=tri.genus,
            radii=np.asarray(metric.radii, dtype=float).copy(),
            targets=_targets(targets, tri.n_vertices),
            faces=tri.faces.copy(),
            gluings=gluings,
            lengths=dict(sorted(lengths.items())),
        )

    @classmethod
    def from_disk(cls, disk: Disk, targets=None) -> "SurfaceFile":
        gluings = sorted(tuple(sorted((tuple(a), tuple(b)))) for a, b in disk.interior_gluings)
        lengths = {}
        for a, b in gluings:
            lengths[a] = float(disk.side_lengths[a])
        for f, s in disk.boundary_sides:
            lengths[(int(f), int(s))] = float(disk.side_lengths[f, s])
        return cls(
            kind="disk",
            genus=None,
            radii=np.asarray(disk.radii, dtype=float).copy(),
            targets=_targets(targets, disk.n_vertices),
            faces=np.asarray(disk.faces).copy(),
            gluings=gluings,
            lengths=dict(sorted(lengths.items())),
        )


def _targets(targets, n):
    if targets is None:
        return np.full(n, np.nan)
    return np.asarray(targets, dtype=float).copy()


def _num(tok, line, kind=float):
    try:
        v = kind(tok)
    except ValueError:
        raise ParseError(f"expected {'an integer' if kind is int else 'a number'}, got {tok!r}", line) from None
    if kind is float and not math.isfinite(v):
        raise ParseError(f"non-finite number {tok!r}", line)
    return v


def parse_surface(text: str) -> SurfaceFile:
    """Parse a surface file; raises ``ParseError`` naming the offending line."""
    header = None
    verts: dict[int, tuple[float, float]] = {}
    faces: list[tuple[int, int, int]] = []
    glue_raw: list[tuple[tuple[int, int], tuple[int, int], int]] = []
    len_raw: list[tuple[tuple[int, int], float, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        rec = tok[0]
        if header is None:
            if rec != "surface":
                raise ParseError("file must start with a 'surface' header", lineno)
            header = _parse_header(tok, lineno)
            continue
        if rec == "v":
            if len(tok) not in (3, 4):
                raise ParseError("vertex record is 'v id radius [target]'", lineno)
            vid = _num(tok[1], lineno, int)
            if vid in verts:
                raise ParseError(f"vertex {vid} defined twice", lineno)
            r = _num(tok[2], lineno)
            if r < 0:
                raise ParseError(f"negative radius for vertex {vid}", lineno)
            t = _num(tok[3], lineno) if len(tok) == 4 else math.nan
            verts[vid] = (r, t)
        elif rec == "f":
            if len(tok) != 4:
                raise ParseError("face record is 'f a b c'", lineno)
            faces.append(tuple(_num(x, lineno, int) for x in tok[1:]))
        elif rec == "g":
            if len(tok) != 5:
                raise ParseError("gluing record is 'g f s g t'", lineno)
            f, s, g, t = (_num(x, lineno, int) for x in tok[1:])
            glue_raw.append(((f, s), (g, t), lineno))
        elif rec == "l":
            if len(tok) != 4:
                raise ParseError("length record is 'l f s length'", lineno)
            f, s = _num(tok[1], lineno, int), _num(tok[2], lineno, int)
            v = _num(tok[3], lineno)
            if v <= 0:
                raise ParseError("lengths must be positive", lineno)
            len_raw.append(((f, s), v, lineno))
        else:
            raise ParseError(f"unknown record {rec!r}", lineno)
    if header is None:
        raise ParseError("empty file", 1)
    kind, genus, n_v, n_f = header

    n = len(verts)
    if sorted(verts) != list(range(n)):
        raise ParseError("vertex ids must be 0..n-1", None)
    if n_v is not None and n != n_v:
        raise ParseError(f"header announces {n_v} vertices, found {n}", None)
    if n_f is not None and len(faces) != n_f:
        raise ParseError(f"header announces {n_f} faces, found {len(faces)}", None)
    if not faces:
        raise ParseError("no faces", None)
    for k, fc in enumerate(faces):
        if any(not 0 <= v < n for v in fc):
            raise ParseError(f"face {k} references an unknown vertex", None)

    def side_ok(fs, lineno):
        f, s = fs
        if not (0 <= f < len(faces) and 0 <= s < 3):
            raise ParseError(f"side ({f}, {s}) out of range", lineno)

    partner: dict = {}
    gluings = []
    for a, b, lineno in glue_raw:
        side_ok(a, lineno)
        side_ok(b, lineno)
        if a == b:
            raise ParseError(f"side {a} glued to itself", lineno)
        for x in (a, b):
            if x in partner:
                raise ParseError(f"side {x} glued twice", lineno)
        partner[a], partner[b] = b, a
        gluings.append(tuple(sorted((a, b))))
    gluings.sort()

    lengths: dict = {}
    for fs, v, lineno in len_raw:
        side_ok(fs, lineno)
        key = min(fs, partner.get(fs, fs))
        if key in lengths and lengths[key] != v:
            raise ParseError(f"conflicting lengths for the edge of side {fs}", lineno)
        lengths[key] = v
    keys = set()
    for f in range(len(faces)):
        for s in range(3):
            keys.add(min((f, s), partner.get((f, s), (f, s))))
    missing = sorted(keys - set(lengths))
    if missing:
        raise ParseError(f"no length given for the edge of side {missing[0]}", None)

    return SurfaceFile(
        kind=kind,
        genus=genus,
        radii=np.array([verts[i][0] for i in range(n)]),
        targets=np.array([verts[i][1] for i in range(n)]),
        faces=np.array(faces, dtype=np.int64),
        gluings=gluings,
        lengths=dict(sorted(lengths.items())),
    )


def _parse_header(tok, lineno):
    if len(tok) < 2:
        raise ParseError("header is 'surface genus G ...' or 'surface disk ...'", lineno)
    rest = tok[1:]
    if rest[0] == "disk":
        kind, genus, rest = "disk", None, rest[1:]
    elif rest[0] == "genus" and len(rest) >= 2:
        kind, genus, rest = "closed", _num(rest[1], lineno, int), rest[2:]
        if genus < 0:
            raise ParseError("genus must be nonnegative", lineno)
    else:
        raise ParseError("header is 'surface genus G ...' or 'surface disk ...'", lineno)
    counts = {"vertices": None, "faces": None}
    if len(rest) % 2:
        raise ParseError("header counts come as 'vertices N faces M'", lineno)
    for name, val in zip(rest[::2], rest[1::2]):
        if name not in counts:
            raise ParseError(f"unknown header field {name!r}", lineno)
        counts[name] = _num(val, lineno, int)
    return kind, genus, counts["vertices"], counts["faces"]


def read_surface(path) -> SurfaceFile:
    with open(path, encoding="utf-8") as fh:
        return parse_surface(fh.read())


def write_surface(sf: SurfaceFile) -> str:
    """Canonical text form; ``write_surface(parse_surface(s)) == s`` for canonical ``s``."""
    head = "surface disk" if sf.kind == "disk" else f"surface genus {sf.genus}"
    lines = [f"{head} vertices {sf.n_vertices} faces {sf.n_faces}"]
    for i, r in enumerate(sf.radii):
        t = sf.targets[i]
        lines.append(f"v {i} {fmt(r)}" + (f" {fmt(t)}" if math.isfinite(t) else ""))
    for a, b, c in sf.faces:
        lines.append(f"f {a} {b} {c}")
    for (f, s), (g, t) in sorted(sf.gluings):
        lines.append(f"g {f} {s} {g} {t}")
    for (f, s), v in sorted(sf.lengths.items()):
        lines.append(f"l {f} {s} {fmt(v)}")
    return "\n".join(lines) + "\n"
