"""Decorated discrete conformal maps of triangulated surfaces."""

from .delaunay import conformal_path, edge_weight_report, flip_algorithm, is_weighted_delaunay
from .energy import evaluate, evaluate_at, evaluate_path
from .errors import (
    ConvergenceError,
    GeometryError,
    NoSolutionError,
    ParseError,
    SolverError,
    SymmetryError,
)
from .hyperbolic import heights, lambda_length, lobachevsky
from .instances import Disk
from .mesh import DoubledSurface, Triangulation, build_surface, double
from .metric import DecoratedMetric, cone_angles, conformal_apply
from .solver import SolverConfig, SolverReport, solve_boundary, solve_prescribed_angles, theta_flow, uniformize
from .surface_file import SurfaceFile, parse_surface, read_surface, write_surface

__all__ = [
    "ConvergenceError",
    "DecoratedMetric",
    "Disk",
    "DoubledSurface",
    "GeometryError",
    "NoSolutionError",
    "ParseError",
    "SolverConfig",
    "SolverError",
    "SolverReport",
    "SurfaceFile",
    "SymmetryError",
    "Triangulation",
    "build_surface",
    "cone_angles",
    "conformal_apply",
    "conformal_path",
    "double",
    "edge_weight_report",
    "evaluate",
    "evaluate_at",
    "evaluate_path",
    "flip_algorithm",
    "heights",
    "is_weighted_delaunay",
    "lambda_length",
    "lobachevsky",
    "parse_surface",
    "read_surface",
    "solve_boundary",
    "solve_prescribed_angles",
    "theta_flow",
    "uniformize",
    "write_surface",
]
