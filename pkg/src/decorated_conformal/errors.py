"""Exception hierarchy shared by all modules."""


class GeometryError(ValueError):
    """Base class for invalid or infeasible geometric input."""


class SurfaceError(GeometryError):
    """Combinatorial surface could not be built (unpaired side, bad gluing, ...)."""


class FlipError(GeometryError):
    """Edge cannot be flipped combinatorially."""


class DegenerateTriangleError(GeometryError):
    def __init__(self, message, face=None):
        super().__init__(message)
        self.face = face


class InversiveDistanceError(GeometryError):
    """Inversive distance requested for a circle of radius zero."""


class InfeasibleScaleError(GeometryError):
    """Scale factors produce a metric violating triangle inequalities."""


class CirclesNotDisjointError(GeometryError):
    """Two vertex circles of an edge intersect (decoration not hyperideal)."""


class NotFlippableError(GeometryError):
    """Quadrilateral is not convex in the layout, the diagonal cannot be flipped."""


class FlipCapError(RuntimeError):
    """Flip algorithm exceeded its iteration cap."""


class InconsistentAnglesError(GeometryError):
    """Triangle angles do not sum to pi."""


class NotDelaunayError(GeometryError):
    """Energy evaluated on a triangulation that is not weighted Delaunay."""


class SolverError(RuntimeError):
    """Solver failure; carries the partial report when available."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NoSolutionError(SolverError):
    """Iterates diverged; the target angles are most likely not realizable."""


class ConvergenceError(SolverError):
    """Line search failure or iteration cap reached."""


class SymmetryError(SolverError):
    """Doubled-surface solution is not reflection symmetric."""


class ParseError(ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
