"""Weighted Delaunay predicate, metric edge flips and the flip algorithm."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import FlipCapError, InfeasibleScaleError, NotFlippableError
from .mesh import Triangulation
from .metric import DecoratedMetric, conformal_apply, corner_angles
from .power import face_power, triangle_power

__all__ = [
    "DecoratedQuad",
    "EdgeWeightReport",
    "FlipEvent",
    "FlipResult",
    "FLIP_TOL",
    "FLAT_TOL",
    "local_delaunay_margin",
    "quad_alpha_sum",
    "flip_diagonal_length",
    "edge_weight_report",
    "flip_algorithm",
    "non_flat_edges",
    "is_weighted_delaunay",
    "conformal_path",
]

# an edge is flipped when its margin is below -FLIP_TOL * min(1, length)
FLIP_TOL = 1e-12
# an edge is flat when its cotan weight is within FLAT_TOL of zero
FLAT_TOL = 1e-10


@dataclass(frozen=True)
class DecoratedQuad:
    """Triangles ijk and jil glued along ij; k lies left of i->j, l right."""

    l_ij: float
    l_jk: float
    l_ki: float
    l_il: float
    l_lj: float
    r_i: float = 0.0
    r_j: float = 0.0
    r_k: float = 0.0
    r_l: float = 0.0

    @classmethod
    def from_edge(cls, tri: Triangulation, metric: DecoratedMetric, e: int) -> "DecoratedQuad":
        h, t = tri.edges[e]
        lens = metric.lengths
        eo = tri.edge_of
        nh, ph = tri.next(h), tri.prev(h)
        nt, pt = tri.next(t), tri.prev(t)
        r = metric.radii
        return cls(
            l_ij=lens[int(eo[h])],
            l_jk=lens[int(eo[nh])],
            l_ki=lens[int(eo[ph])],
            l_il=lens[int(eo[nt])],
            l_lj=lens[int(eo[pt])],
            r_i=float(r[tri.origin(h)]),
            r_j=float(r[tri.dest(h)]),
            r_k=float(r[tri.apex(h)]),
            r_l=float(r[tri.apex(t)]),
        )

    def triangle_k(self):
        return (self.l_ij, self.l_jk, self.l_ki), (self.r_i, self.r_j, self.r_k)

    def triangle_l(self):
        return (self.l_ij, self.l_il, self.l_lj), (self.r_j, self.r_i, self.r_l)


def local_delaunay_margin(quad: DecoratedQuad) -> float:
    """Signed sum ``d_ij^k + d_ij^l``; nonnegative iff ij is weighted Delaunay."""
    pk = triangle_power(*quad.triangle_k())
    pl = triangle_power(*quad.triangle_l())
    return float(pk.d[0] + pl.d[0])


def quad_alpha_sum(quad: DecoratedQuad) -> float:
    """``alpha_ij^k + alpha_ij^l``; at most pi iff ij is weighted Delaunay."""
    pk = triangle_power(*quad.triangle_k())
    pl = triangle_power(*quad.triangle_l())
    return float(pk.alpha[0] + pl.alpha[0])


def _quad_layout(quad: DecoratedQuad):
    ti, tj, _ = corner_angles(quad.l_ij, quad.l_jk, quad.l_ki)
    sj, si, _ = corner_angles(quad.l_ij, quad.l_il, quad.l_lj)
    k = quad.l_ki * np.array([math.cos(ti), math.sin(ti)])
    l_ = quad.l_il * np.array([math.cos(si), -math.sin(si)])
    return ti + si, tj + sj, k, l_


def flip_diagonal_length(quad: DecoratedQuad) -> float:
    """Length of the diagonal kl after flipping ij."""
    ang_i, ang_j, k, l_ = _quad_layout(quad)
    if not (ang_i < math.pi and ang_j < math.pi):
        raise NotFlippableError(
            f"quadrilateral is not convex (angles {ang_i:.6g}, {ang_j:.6g} at the diagonal ends)"
        )
    return float(np.hypot(*(k - l_)))


@dataclass
class EdgeWeightReport:
    """Per-edge Delaunay data, arrays aligned with ``edge_ids``."""

    edge_ids: np.ndarray
    alpha_sum: np.ndarray
    margin: np.ndarray
    weight: np.ndarray
    r_edge: np.ndarray
    length: np.ndarray
    flat: np.ndarray
    flat_tol: float = FLAT_TOL

    def index(self, e: int) -> int:
        return int(np.searchsorted(self.edge_ids, e))

    def min_margin(self) -> float:
        return float(self.margin.min())

    def flat_edges(self) -> list[int]:
        return [int(e) for e in self.edge_ids[self.flat]]

    def rows(self) -> list[dict]:
        return [
            {
                "edge": int(e),
                "alpha_sum": float(a),
                "margin": float(m),
                "weight": float(w),
                "flat": bool(f),
            }
            for e, a, m, w, f in zip(
                self.edge_ids, self.alpha_sum, self.margin, self.weight, self.flat
            )
        ]


def edge_weight_report(
    tri: Triangulation, metric: DecoratedMetric, flat_tol: float = FLAT_TOL
) -> EdgeWeightReport:
    fp = face_power(metric.face_lengths(tri), metric.face_radii(tri))
    d = fp.d.ravel()
    alpha = fp.alpha.ravel()
    r_side = fp.r_side.ravel()
    ids = np.array(tri.edge_ids(), dtype=np.int64)
    h0 = np.array([tri.edges[int(e)][0] for e in ids], dtype=np.int64)
    h1 = np.array([tri.edges[int(e)][1] for e in ids], dtype=np.int64)
    margin = d[h0] + d[h1]
    r_e = r_side[h0]
    weight = margin / r_e
    length = np.array([metric.lengths[int(e)] for e in ids])
    return EdgeWeightReport(
        edge_ids=ids,
        alpha_sum=alpha[h0] + alpha[h1],
        margin=margin,
        weight=weight,
        r_edge=r_e,
        length=length,
        flat=np.abs(weight) <= flat_tol,
        flat_tol=flat_tol,
    )


@dataclass(frozen=True)
class FlipEvent:
    edge: int
    new_edge: int
    length: float


@dataclass
class FlipResult:
    triangulation: Triangulation
    metric: DecoratedMetric
    report: EdgeWeightReport
    log: list = field(default_factory=list)

    @property
    def n_flips(self) -> int:
        return len(self.log)


def _violates(quad: DecoratedQuad, tol: float) -> bool:
    return local_delaunay_margin(quad) < -tol * min(1.0, quad.l_ij)


def flip_algorithm(
    tri: Triangulation,
    metric: DecoratedMetric,
    flip_tol: float = FLIP_TOL,
    flat_tol: float = FLAT_TOL,
    max_flips: int | None = None,
    fixed=frozenset(),
) -> FlipResult:
    """Flip edges until every edge is weighted Delaunay.

    Works on copies.  Violating edges are taken from a queue ordered by edge
    id; after a flip the four edges of the quadrilateral are re-queued.
    Edges in ``fixed`` are never flipped.
    """
    tri = tri.copy()
    metric = metric.copy()
    lengths = metric.lengths
    cap = 100 * tri.n_edges if max_flips is None else max_flips
    log: list[FlipEvent] = []

    heap = list(tri.edge_ids())
    heapq.heapify(heap)
    queued = set(heap)
    while heap:
        e = heapq.heappop(heap)
        queued.discard(e)
        if e not in tri.edges or e in fixed:
            continue
        h, t = tri.edges[e]
        if h // 3 == t // 3:
            continue
        quad = DecoratedQuad.from_edge(tri, metric, e)
        if not _violates(quad, flip_tol):
            continue
        if len(log) >= cap:
            raise FlipCapError(f"flip cap of {cap} flips exceeded")
        new_len = flip_diagonal_length(quad)
        outer = [int(tri.edge_of[x]) for x in (tri.next(h), tri.prev(h), tri.next(t), tri.prev(t))]
        e_new = tri.flip_edge(e)
        del lengths[e]
        lengths[e_new] = new_len
        log.append(FlipEvent(e, e_new, new_len))
        for o in outer:
            if o not in queued:
                heapq.heappush(heap, o)
                queued.add(o)

    report = edge_weight_report(tri, metric, flat_tol)
    return FlipResult(tri, metric, report, log)


def non_flat_edges(report: EdgeWeightReport, tol: float | None = None) -> set[int]:
    """Edges of the weighted Delaunay tessellation (positive cotan weight)."""
    tol = report.flat_tol if tol is None else tol
    return {int(e) for e, w in zip(report.edge_ids, report.weight) if w > tol}


def is_weighted_delaunay(tri: Triangulation, metric: DecoratedMetric, tol: float = 1e-12) -> bool:
    return edge_weight_report(tri, metric).min_margin() >= -tol


def _free_mask(rep, fixed):
    return np.array([int(e) not in fixed for e in rep.edge_ids], dtype=bool)


def _delaunay_state(tri, metric, du, tol, fixed):
    """Scaled metric and its report, or ``None`` if infeasible or not Delaunay."""
    try:
        m = conformal_apply(tri, metric, du)
        rep = edge_weight_report(tri, m)
    except (InfeasibleScaleError, ValueError):
        return None
    bad = (rep.margin < -tol * np.minimum(1.0, rep.length)) & _free_mask(rep, fixed)
    if np.any(bad):
        return None
    return m, rep


def conformal_path(
    tri: Triangulation,
    metric: DecoratedMetric,
    du,
    flip_tol: float = FLIP_TOL,
    flat_tol: float = FLAT_TOL,
    max_flips: int | None = None,
    fixed=frozenset(),
) -> FlipResult:
    """Apply scale factors ``du`` along a path of weighted Delaunay triangulations.

    ``tri`` must be weighted Delaunay for ``metric``.  The straight segment
    from 0 to ``du`` is followed; whenever an edge becomes flat on the way
    the scaling stops there, the edge is flipped and the remaining scaling
    continues on the new triangulation.  Scaling a triangulation past the
    point where it stops being Delaunay would change the surface, so this is
    the only way to keep the result discretely conformally equivalent.
    Edges in ``fixed`` are never flipped and not checked.
    """
    du = np.asarray(du, dtype=float)
    tri = tri.copy()
    metric = metric.copy()
    cap = 100 * tri.n_edges if max_flips is None else max_flips
    log: list[FlipEvent] = []
    done = 0.0
    while True:
        rem = (1.0 - done) * du
        state = _delaunay_state(tri, metric, rem, flip_tol, fixed)
        if state is not None:
            metric = state[0]
            break
        lo, hi = 0.0, 1.0
        lo_state = (metric, edge_weight_report(tri, metric))
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            st = _delaunay_state(tri, metric, mid * rem, flip_tol, fixed)
            if st is None:
                hi = mid
            else:
                lo, lo_state = mid, st
        m_lo, rep = lo_state
        # the edge that is about to turn over is the one closest to flat
        rel = np.where(_free_mask(rep, fixed), rep.margin / np.minimum(1.0, rep.length), np.inf)
        k = int(np.argmin(rel))
        if rel[k] > 1e-8:
            raise InfeasibleScaleError("scale factors degenerate a triangle inside a Delaunay cell")
        if len(log) >= cap:
            raise FlipCapError(f"flip cap of {cap} flips exceeded")
        e = int(rep.edge_ids[k])
        new_len = flip_diagonal_length(DecoratedQuad.from_edge(tri, m_lo, e))
        e_new = tri.flip_edge(e)
        del m_lo.lengths[e]
        m_lo.lengths[e_new] = new_len
        log.append(FlipEvent(e, e_new, new_len))
        metric = m_lo
        done = done + lo * (1.0 - done)
    res = flip_algorithm(tri, metric, flip_tol, flat_tol, fixed=fixed)
    res.log = log + res.log
    return res
