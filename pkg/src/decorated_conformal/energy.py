"""Discrete Hilbert-Einstein functional with gradient and Hessian.

Coordinates are logarithmic scale factors ``u``; heights are ``h = h0 - u``.
The functional is concave in ``u`` and its gradient is ``theta - Theta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .delaunay import EdgeWeightReport, conformal_path, edge_weight_report
from .errors import NotDelaunayError
from .hyperbolic import HeightVector, face_volumes, heights, lambda_length
from .mesh import Triangulation
from .metric import AngleData, DecoratedMetric, cone_angles, conformal_apply
from .power import face_power

__all__ = [
    "EnergyEvaluation",
    "evaluate",
    "evaluate_at",
    "evaluate_path",
    "edge_lambda_lengths",
    "hessian_coefficients",
    "shift_behavior",
    "coo_lines",
    "DELAUNAY_TOL",
]

DELAUNAY_TOL = 1e-10


@dataclass(frozen=True)
class EnergyEvaluation:
    value: float | None
    gradient: np.ndarray | None
    hessian: sp.csr_matrix | None
    angles: AngleData
    report: EdgeWeightReport
    triangulation: Triangulation
    metric: DecoratedMetric
    heights: HeightVector


def edge_lambda_lengths(tri: Triangulation, metric: DecoratedMetric, hv: HeightVector) -> dict:
    """Lambda-length of every edge, keyed by edge id."""
    ids = tri.edge_ids()
    ends = np.array([tri.endpoints(e) for e in ids], dtype=np.int64).reshape(-1, 2)
    lens = np.array([metric.lengths[e] for e in ids])
    i, j = ends[:, 0], ends[:, 1]
    lam = lambda_length(lens, hv.h[i], hv.h[j], hv.eps[i], hv.eps[j])
    return dict(zip(ids, np.atleast_1d(lam).tolist()))


def hessian_coefficients(tri: Triangulation, report: EdgeWeightReport) -> np.ndarray:
    """Edge coefficients ``w r / l``, zero for loops; aligned with ``report.edge_ids``."""
    c = report.weight * report.r_edge / report.length
    loops = np.array([tri.is_loop(int(e)) for e in report.edge_ids], dtype=bool)
    c[loops] = 0.0
    return c


def _assemble_hessian(tri, report, n):
    c = hessian_coefficients(tri, report)
    ends = np.array([tri.endpoints(int(e)) for e in report.edge_ids], dtype=np.int64)
    i, j = ends[:, 0], ends[:, 1]
    rows = np.concatenate([i, j, i, j])
    cols = np.concatenate([j, i, i, j])
    vals = np.concatenate([c, c, -c, -c])
    return sp.coo_matrix((vals, (rows, cols)), shape=(n, n)).tocsr()


def evaluate_at(
    tri: Triangulation,
    metric: DecoratedMetric,
    hv: HeightVector,
    targets,
    value: bool = True,
    gradient: bool = True,
    hessian: bool = True,
    delaunay_tol: float = DELAUNAY_TOL,
    fixed=frozenset(),
) -> EnergyEvaluation:
    """Evaluate on the decorated metric ``metric`` with heights ``hv``.

    ``metric`` must already be the scaled metric and ``tri`` weighted
    Delaunay for it, except possibly at edges in ``fixed``.
    """
    targets = np.asarray(targets, dtype=float)
    report = edge_weight_report(tri, metric)
    bad = report.margin < -delaunay_tol * np.minimum(1.0, report.length)
    if fixed:
        bad &= np.array([int(e) not in fixed for e in report.edge_ids], dtype=bool)
    if np.any(bad):
        e = int(report.edge_ids[np.argmax(bad)])
        raise NotDelaunayError(
            f"edge {e} violates the weighted Delaunay condition "
            f"(margin {report.margin[np.argmax(bad)]:.3g})"
        )
    angles = cone_angles(tri, metric, targets)
    n = tri.n_vertices

    val = None
    if value:
        fp = face_power(metric.face_lengths(tri), metric.face_radii(tri))
        vol = face_volumes(angles.corner, fp.alpha)
        lam = edge_lambda_lengths(tri, metric, hv)
        lam_arr = np.array([lam[int(e)] for e in report.edge_ids])
        # fixed summation order: faces, vertices, edges by id
        val = float(
            -2.0 * math.fsum(vol)
            + math.fsum((targets - angles.cone) * hv.h)
            + math.fsum((math.pi - report.alpha_sum) * lam_arr)
        )
    grad = angles.cone - targets if gradient else None
    hess = _assemble_hessian(tri, report, n) if hessian else None
    return EnergyEvaluation(val, grad, hess, angles, report, tri, metric, hv)


def evaluate(
    tri: Triangulation,
    metric: DecoratedMetric,
    u,
    targets,
    value: bool = True,
    gradient: bool = True,
    hessian: bool = True,
) -> EnergyEvaluation:
    """Evaluate at scale factors ``u`` relative to ``metric``.

    ``tri`` must be weighted Delaunay for ``conformal_apply(tri, metric, u)``;
    run ``flip_algorithm`` first otherwise.
    """
    u = np.asarray(u, dtype=float)
    scaled = conformal_apply(tri, metric, u)
    return evaluate_at(
        tri, scaled, heights(metric, u), targets, value=value, gradient=gradient, hessian=hessian
    )


def evaluate_path(
    tri: Triangulation,
    metric: DecoratedMetric,
    u,
    targets,
    value: bool = True,
    gradient: bool = True,
    hessian: bool = True,
) -> EnergyEvaluation:
    """Evaluate at ``u`` on the weighted Delaunay triangulation reached by ``conformal_path``.

    ``tri`` must be weighted Delaunay for ``metric``.  Unlike ``evaluate``
    this is defined for every feasible ``u``, not only inside one cell.
    """
    u = np.asarray(u, dtype=float)
    res = conformal_path(tri, metric, u)
    return evaluate_at(
        res.triangulation,
        res.metric,
        heights(metric, u),
        targets,
        value=value,
        gradient=gradient,
        hessian=hessian,
    )


def shift_behavior(genus: int, n_vertices: int, targets, c: float) -> float:
    """Predicted ``HE(u - c) - HE(u)`` for a constant shift ``c``."""
    total = 2 * math.pi * (2 * genus - 2 + n_vertices)
    return -c * (total - float(np.sum(targets)))


def coo_lines(matrix) -> list[str]:
    """``row col value`` triples of a sparse matrix, one per line, sorted."""
    m = sp.coo_matrix(matrix)
    m.sum_duplicates()
    order = np.lexsort((m.col, m.row))
    return [f"{m.row[k]} {m.col[k]} {m.data[k]:.17g}" for k in order]
