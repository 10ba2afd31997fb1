"""
Geometry errors - Exceptions raised by the numerical library
"""

from typing import Optional, Tuple


class GeometryError(Exception):
    """Base class for every numerical failure in the geometry package"""


class NonFiniteVector(GeometryError):
    """A vector with NaN or infinite components was passed in"""


class DegenerateFrame(GeometryError):
    """Re-orthonormalization met a (nearly) null frame vector"""

    def __init__(self, index: int, magnitude: float):
        self.index = index
        self.magnitude = magnitude
        super().__init__(
            f"Frenet vector F{index + 1} degenerated during re-orthonormalization "
            f"(|<v,v>|^(1/2) = {magnitude:.3e})"
        )


class CurveRangeError(GeometryError):
    """Arclength outside the integrated interval"""


class SingularPoint(GeometryError):
    """Surface point violates the regularity margin"""

    def __init__(self, point: Tuple[float, float, float], margin: float,
                 reason: Optional[str] = None):
        self.point = point
        self.margin = margin
        s, t, w = point
        detail = reason or "regularity margin violated"
        super().__init__(f"{detail} at (s,t,w)=({s:.6g},{t:.6g},{w:.6g}); margin={margin:.3e}")


class DegenerateMetric(GeometryError):
    """First fundamental form is (nearly) singular"""

    def __init__(self, frak_g: float, point: Optional[Tuple[float, float, float]] = None):
        self.frak_g = frak_g
        self.point = point
        where = ""
        if point is not None:
            where = " at (s,t,w)=({:.6g},{:.6g},{:.6g})".format(*point)
        super().__init__(f"degenerate metric{where}: |g| = {abs(frak_g):.3e}")


class UnsupportedFamily(GeometryError):
    """Operation is only defined for a different tube family"""


class OptimizerDidNotConverge(GeometryError):
    """Residual minimization hit its iteration cap"""

    def __init__(self, iterations: int, best: float):
        self.iterations = iterations
        self.best = best
        super().__init__(f"refinement stopped after {iterations} iterations (best objective {best:.3e})")
