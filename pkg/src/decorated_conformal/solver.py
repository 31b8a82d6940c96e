"""Newton ascent of the Hilbert-Einstein functional and the decorated flow."""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from .delaunay import FLAT_TOL, FLIP_TOL, FlipEvent, conformal_path, edge_weight_report, flip_algorithm
from .energy import EnergyEvaluation, evaluate_at
from .errors import (
    ConvergenceError,
    GeometryError,
    NoSolutionError,
    SolverError,
    SymmetryError,
)
from .hyperbolic import HeightVector, heights
from .instances import Disk
from .mesh import DoubledSurface, Triangulation, double
from .metric import DecoratedMetric, face_corner_angles, gauss_bonnet_defect, uniform_targets

__all__ = [
    "SolverConfig",
    "IterationRecord",
    "SolverReport",
    "BoundaryResult",
    "FlowResult",
    "solve_prescribed_angles",
    "uniformize",
    "solve_boundary",
    "theta_flow",
    "doubled_metric",
]

log = logging.getLogger(__name__)


@dataclass
class SolverConfig:
    tol: float = 1e-10
    max_iter: int = 50
    armijo: float = 1e-4
    backtrack: float = 0.5
    max_halvings: int = 40
    flip_tol: float = FLIP_TOL
    flat_tol: float = FLAT_TOL
    divergence_guard: float = 50.0
    normalize: bool = True

    def __post_init__(self):
        if not (self.tol > 0 and self.flip_tol > 0 and self.flat_tol > 0):
            raise ValueError("tolerances must be positive")
        if not (0 < self.armijo < 1 and 0 < self.backtrack < 1):
            raise ValueError("Armijo parameters must lie in (0, 1)")
        if self.max_iter < 0 or self.max_halvings < 1:
            raise ValueError("iteration limits must be positive")

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    residual: float
    step: float
    value: float
    flips: int


@dataclass
class SolverReport:
    converged: bool
    iterations: int
    history: list
    flips: list
    u: np.ndarray
    triangulation: Triangulation
    metric: DecoratedMetric
    targets: np.ndarray
    residual: float
    heights: HeightVector | None = None
    config: SolverConfig = field(default_factory=SolverConfig)

    @property
    def n_flips(self) -> int:
        return len(self.flips)


def _check_targets(targets, n):
    targets = np.asarray(targets, dtype=float)
    if targets.shape != (n,):
        raise ValueError(f"expected {n} target angles, got shape {targets.shape}")
    if np.any(~np.isfinite(targets)) or np.any(targets <= 0):
        raise ValueError("target angles must be finite and positive")
    return targets


def _newton_direction(ev: EnergyEvaluation) -> np.ndarray:
    g = ev.gradient
    n = len(g)
    # -H is positive semidefinite with kernel spanned by the constants
    A = -ev.hessian.toarray() + np.full((n, n), 1.0 / n)
    return np.linalg.solve(A, g)


def _report(converged, it, history, flips, u, tri, m, targets, residual, h0, eps, cfg):
    shift = float(np.mean(u)) if cfg.normalize else 0.0
    u_out = u - shift
    m_out = m.scaled(math.exp(-shift)) if shift else m
    return SolverReport(
        converged=converged,
        iterations=it,
        history=history,
        flips=flips,
        u=u_out,
        triangulation=tri,
        metric=m_out,
        targets=targets,
        residual=residual,
        heights=HeightVector(h0 - u_out, eps),
        config=cfg,
    )


def solve_prescribed_angles(
    tri: Triangulation,
    metric: DecoratedMetric,
    targets,
    cfg: SolverConfig | None = None,
    fixed_edges=frozenset(),
) -> SolverReport:
    """Find scale factors ``u`` realizing the cone angles ``targets``.

    Damped Newton ascent of the concave functional.  Every trial step is
    applied along a path of weighted Delaunay triangulations, so the result
    is discretely conformally equivalent to the input.  ``u`` is relative to
    ``metric`` and normalized to zero mean.  Edges in ``fixed_edges`` are
    never flipped.
    """
    cfg = cfg or SolverConfig()
    n = tri.n_vertices
    targets = _check_targets(targets, n)
    defect = gauss_bonnet_defect(targets, tri.genus, n)
    if abs(defect) > 1e-12:
        warnings.warn(
            f"targets violate Gauss-Bonnet (defect {defect:.3g}); no solution exists",
            RuntimeWarning,
            stacklevel=2,
        )
    metric.check(tri)
    base = heights(metric)
    h0, eps = base.h, base.eps

    fixed = frozenset(fixed_edges)
    res = flip_algorithm(tri, metric, cfg.flip_tol, cfg.flat_tol, fixed=fixed)
    cur_tri, cur_m = res.triangulation, res.metric
    flips: list[FlipEvent] = list(res.log)
    u = np.zeros(n)
    ev = evaluate_at(cur_tri, cur_m, HeightVector(h0 - u, eps), targets, fixed=fixed)
    history: list[IterationRecord] = []
    step = 0.0
    n_flips_it = len(res.log)

    for it in range(cfg.max_iter + 1):
        residual = float(np.max(np.abs(ev.gradient)))
        history.append(IterationRecord(it, residual, step, ev.value, n_flips_it))
        log.debug("iter %d residual %.3e value %.12g", it, residual, ev.value)
        if residual <= cfg.tol:
            return _report(True, it, history, flips, u, cur_tri, cur_m, targets, residual, h0, eps, cfg)
        if it == cfg.max_iter:
            break
        delta = _newton_direction(ev)
        slope = float(ev.gradient @ delta)
        t = 1.0
        accepted = None
        for _ in range(cfg.max_halvings):
            try:
                cand = conformal_path(
                    cur_tri, cur_m, t * delta, cfg.flip_tol, cfg.flat_tol, fixed=fixed
                )
                u_c = u + t * delta
                ev_c = evaluate_at(
                    cand.triangulation, cand.metric, HeightVector(h0 - u_c, eps), targets, fixed=fixed
                )
            except GeometryError:
                t *= cfg.backtrack
                continue
            slack = 1e-12 * (1.0 + abs(ev.value))
            if ev_c.value >= ev.value + cfg.armijo * t * slope - slack:
                accepted = (cand, u_c, ev_c)
                break
            t *= cfg.backtrack
        if accepted is None:
            rep = _report(False, it, history, flips, u, cur_tri, cur_m, targets, residual, h0, eps, cfg)
            raise ConvergenceError("line search failed to find an ascent step", rep)
        cand, u, ev = accepted
        cur_tri, cur_m = cand.triangulation, cand.metric
        flips.extend(cand.log)
        n_flips_it = cand.n_flips
        step = t
        if np.max(np.abs(u)) > cfg.divergence_guard:
            rep = _report(False, it + 1, history, flips, u, cur_tri, cur_m, targets, residual, h0, eps, cfg)
            raise NoSolutionError(
                f"scale factors exceed {cfg.divergence_guard}; no solution for these targets", rep
            )
    rep = _report(False, cfg.max_iter, history, flips, u, cur_tri, cur_m, targets, residual, h0, eps, cfg)
    raise ConvergenceError(f"no convergence within {cfg.max_iter} iterations", rep)


def uniformize(tri: Triangulation, metric: DecoratedMetric, cfg: SolverConfig | None = None) -> SolverReport:
    """Equal cone angles ``2 pi (2g - 2 + |V|) / |V|`` at every vertex."""
    return solve_prescribed_angles(tri, metric, uniform_targets(tri.genus, tri.n_vertices), cfg)


def doubled_metric(disk: Disk, ds: DoubledSurface) -> DecoratedMetric:
    """Metric on the double: mirror faces copy their original's sides."""
    n_f = ds.n_original_faces
    mc = DoubledSurface.mirror_corner
    lengths = {}
    for e, (h0, _) in ds.triangulation.edges.items():
        f, s = divmod(h0, 3)
        if f < n_f:
            lengths[e] = float(disk.side_lengths[f, s])
        else:
            lengths[e] = float(disk.side_lengths[f - n_f, mc[s]])
    vmap = ds.vertex_map
    n = ds.n_original_vertices
    r = np.array([disk.radii[v] if v < n else disk.radii[vmap[v]] for v in range(len(vmap))])
    return DecoratedMetric(lengths, r)


@dataclass
class BoundaryResult:
    report: SolverReport  # solve on the doubled surface
    doubled: DoubledSurface
    disk: Disk  # solved disk
    u: np.ndarray  # scale factors on the disk vertices
    asymmetry: float
    # smallest Delaunay margin of a boundary edge on the double; when it is
    # >= 0 the final doubled triangulation is weighted Delaunay everywhere
    boundary_margin: float

    def angle_sums(self) -> np.ndarray:
        return self.disk.angle_sums()


def solve_boundary(disk: Disk, boundary_targets, cfg: SolverConfig | None = None, sym_tol: float = 1e-9) -> BoundaryResult:
    """Flat metric on a disk with prescribed angle sums at boundary vertices.

    ``boundary_targets`` has one entry per disk vertex; entries of interior
    vertices are ignored (they are always ``2 pi``).  The disk is doubled
    along its boundary and the closed problem solved with doubled boundary
    targets.
    """
    cfg = cfg or SolverConfig()
    ds = double(disk.faces, disk.interior_gluings, disk.boundary_sides)
    tri = ds.triangulation
    m = doubled_metric(disk, ds)
    n = ds.n_original_vertices
    bt = np.asarray(boundary_targets, dtype=float)
    if bt.shape != (n,):
        raise ValueError(f"expected {n} boundary targets, got shape {bt.shape}")
    targets = np.full(tri.n_vertices, 2 * math.pi)
    for v in ds.boundary_vertices:
        targets[v] = 2.0 * bt[v]
    defect = gauss_bonnet_defect(targets, tri.genus, tri.n_vertices)
    if abs(defect) > 1e-9:
        raise NoSolutionError(
            f"boundary targets violate Gauss-Bonnet on the double (defect {defect:.3g})", None
        )
    targets *= 2 * math.pi * (2 * tri.genus - 2 + tri.n_vertices) / targets.sum()

    report = solve_prescribed_angles(tri, m, targets, cfg, fixed_edges=ds.boundary_edges)
    u = report.u
    asym = float(np.max(np.abs(u - u[ds.vertex_map])))
    if asym > sym_tol:
        raise SymmetryError(f"solution is not reflection symmetric (asymmetry {asym:.3g})", report)

    # boundary edges are never flipped, so face slots 0..F-1 stay the original half
    final = report.triangulation
    n_f = ds.n_original_faces
    faces = final.faces[:n_f].copy()
    if faces.max() >= n:
        raise SolverError("restricted faces reference mirrored vertices", report)
    gluings, bsides = [], []
    for h in range(3 * n_f):
        t = int(final.twin[h])
        if t >= 3 * n_f:
            bsides.append(divmod(h, 3))
        elif h < t:
            gluings.append((divmod(h, 3), divmod(t, 3)))
    side = np.array([report.metric.lengths[int(e)] for e in final.edge_of[: 3 * n_f]]).reshape(-1, 3)
    solved = Disk(faces, gluings, bsides, side, report.metric.radii[:n].copy())
    face_corner_angles(side)  # raises if a restricted face degenerated
    rep = edge_weight_report(final, report.metric)
    bmask = np.array([int(e) in ds.boundary_edges for e in rep.edge_ids], dtype=bool)
    return BoundaryResult(report, ds, solved, u[:n].copy(), asym, float(rep.margin[bmask].min()))


@dataclass
class FlowResult:
    u: np.ndarray
    triangulation: Triangulation
    metric: DecoratedMetric
    residuals: list  # 2-norm of theta - Theta after every accepted step
    values: list
    dts: list
    flips: list


def theta_flow(
    tri: Triangulation,
    metric: DecoratedMetric,
    targets,
    dt: float,
    steps: int,
    dt_max: float | None = None,
    growth: float = 1.25,
    tol: float = 0.0,
    max_halvings: int = 40,
) -> FlowResult:
    """Explicit Euler steps of ``du/dt = theta - Theta`` with adaptive ``dt``.

    A step is rejected and ``dt`` halved when it would lower the functional
    or raise the residual; accepted steps let ``dt`` grow by ``growth`` up to
    ``dt_max`` (default ``dt``).
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    dt_max = dt if dt_max is None else dt_max
    n = tri.n_vertices
    targets = _check_targets(targets, n)
    base = heights(metric)
    h0, eps = base.h, base.eps
    res = flip_algorithm(tri, metric)
    cur_tri, cur_m = res.triangulation, res.metric
    flips = list(res.log)
    u = np.zeros(n)
    ev = evaluate_at(cur_tri, cur_m, HeightVector(h0, eps), targets, hessian=False)
    residuals = [float(np.linalg.norm(ev.gradient))]
    values = [ev.value]
    dts: list[float] = []
    for _ in range(steps):
        if residuals[-1] <= tol:
            break
        for _ in range(max_halvings):
            du = dt * ev.gradient
            try:
                cand = conformal_path(cur_tri, cur_m, du)
                ev_c = evaluate_at(
                    cand.triangulation, cand.metric, HeightVector(h0 - u - du, eps), targets, hessian=False
                )
            except GeometryError:
                dt *= 0.5
                continue
            r_c = float(np.linalg.norm(ev_c.gradient))
            if ev_c.value >= ev.value - 1e-13 * (1 + abs(ev.value)) and r_c <= residuals[-1]:
                break
            dt *= 0.5
        else:
            raise ConvergenceError("flow step infeasible after maximal halving", None)
        u = u + du
        cur_tri, cur_m, ev = cand.triangulation, cand.metric, ev_c
        flips.extend(cand.log)
        residuals.append(r_c)
        values.append(ev.value)
        dts.append(dt)
        dt = min(dt * growth, dt_max)
    return FlowResult(u, cur_tri, cur_m, residuals, values, dts, flips)
