"""
Tube Surfaces - Tubular hypersurfaces around non-null curves in E^4_1

Seven families: the tube around a timelike curve (foliated by pseudo
hyperspheres), and for a spacelike curve whose timelike Frenet vector is
F_j (j = 2, 3, 4) the tubes foliated by pseudo hyperspheres (lambda = 1)
or pseudo hyperbolic hyperspheres (lambda = -1).

Every quantity comes both as a closed form and as a finite-difference
oracle built from tube_point alone.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from geometry.errors import DegenerateMetric, SingularPoint
from geometry.frenet import CurveCase, FramedCurve, FrenetFrame
from geometry.minkowski import ETA, Vec4, inner

logger = logging.getLogger(__name__)

REG_TOL = 1e-3
METRIC_TOL = 1e-9
FD_STEP = 1e-5


def parity_sign(n: int) -> int:
    """(-1)^(n!) evaluated on the integer factorial"""
    return -1 if math.factorial(n) % 2 else 1


@dataclass(frozen=True)
class TubeFamily:
    """Family selector: j=None for the timelike tube, else (j, lam)"""

    j: Optional[int] = None
    lam: int = 1

    def __post_init__(self):
        if self.j is not None and self.j not in (2, 3, 4):
            raise ValueError(f"j must be 2, 3 or 4, got {self.j}")
        if self.lam not in (1, -1):
            raise ValueError(f"lambda must be +1 or -1, got {self.lam}")
        if self.j is None and self.lam != 1:
            raise ValueError("the timelike tube has no lambda choice")

    @classmethod
    def timelike(cls) -> "TubeFamily":
        return cls()

    @classmethod
    def spacelike(cls, j: int, lam: int) -> "TubeFamily":
        return cls(j, lam)

    @property
    def is_timelike(self) -> bool:
        return self.j is None

    @property
    def curve_case(self) -> CurveCase:
        return CurveCase.TIMELIKE_CENTER if self.j is None else CurveCase.spacelike(self.j)

    @property
    def sigma4(self) -> int:
        """(-1)^((4-j)!)"""
        return parity_sign(4 - self.j)

    @property
    def sigma5(self) -> int:
        """(-1)^((5-j)!)"""
        return parity_sign(5 - self.j)

    @property
    def sign_j(self) -> int:
        """(-1)^j"""
        return -1 if self.j % 2 else 1

    @property
    def lam_j(self) -> int:
        """lambda^j"""
        return self.lam ** self.j

    @property
    def normal_sign(self) -> int:
        """Expected <N,N>: 1 for the timelike tube, lambda otherwise"""
        return 1 if self.j is None else self.lam

    @property
    def label(self) -> str:
        if self.j is None:
            return "timelike"
        return f"j{self.j}_lambda{'+' if self.lam > 0 else '-'}1"

    def to_selector(self):
        """Config form: "timelike" or {"j": .., "lambda": ..}"""
        if self.j is None:
            return "timelike"
        return {"j": self.j, "lambda": self.lam}

    def __str__(self) -> str:
        return self.label


ALL_FAMILIES: Tuple[TubeFamily, ...] = (TubeFamily.timelike(),) + tuple(
    TubeFamily.spacelike(j, lam) for j in (2, 3, 4) for lam in (1, -1)
)


def _h(lam: int, w: float) -> Tuple[float, float]:
    # (h+, h-): h+ = sinh w for lambda = 1, cosh w for lambda = -1
    if lam == 1:
        return math.sinh(w), math.cosh(w)
    return math.cosh(w), math.sinh(w)


def _place(j: int, at_j: float, at_j1: float, at_j2: float) -> np.ndarray:
    # Coefficients of F2, F3, F4 with mu_5 = mu_2 and mu_6 = mu_3
    out = np.empty(3)
    for offset, value in enumerate((at_j, at_j1, at_j2)):
        out[(j + offset - 2) % 3] = value
    return out


def mu(j: int, lam: int, t: float, w: float) -> np.ndarray:
    """(mu_2, mu_3, mu_4) of the (j, lambda) tube"""
    h_plus, h_minus = _h(lam, w)
    return _place(j, h_plus * math.cosh(t), h_minus, h_plus * math.sinh(t))


def mu_w(j: int, lam: int, t: float, w: float) -> np.ndarray:
    """w-derivatives of (mu_2, mu_3, mu_4)"""
    h_plus, h_minus = _h(lam, w)
    # d/dw swaps sinh and cosh
    return _place(j, h_minus * math.cosh(t), h_plus, h_minus * math.sinh(t))


# The six spacelike parametrizations written out term by term
_EXPLICIT_OFFSETS = {
    (2, 1): lambda t, w: (math.cosh(t) * math.sinh(w), math.cosh(w), math.sinh(t) * math.sinh(w)),
    (2, -1): lambda t, w: (math.cosh(t) * math.cosh(w), math.sinh(w), math.sinh(t) * math.cosh(w)),
    (3, 1): lambda t, w: (math.sinh(t) * math.sinh(w), math.cosh(t) * math.sinh(w), math.cosh(w)),
    (3, -1): lambda t, w: (math.sinh(t) * math.cosh(w), math.cosh(t) * math.cosh(w), math.sinh(w)),
    (4, 1): lambda t, w: (math.cosh(w), math.sinh(t) * math.sinh(w), math.cosh(t) * math.sinh(w)),
    (4, -1): lambda t, w: (math.sinh(w), math.sinh(t) * math.cosh(w), math.cosh(t) * math.cosh(w)),
}


def explicit_tube_offset(j: int, lam: int, t: float, w: float) -> np.ndarray:
    """Coefficients of F2, F3, F4 from the written-out (j, lambda) parametrization"""
    return np.array(_EXPLICIT_OFFSETS[(j, lam)](t, w))


def profile(family: TubeFamily, t: float, w: float) -> np.ndarray:
    """Coefficients of (F2, F3, F4) in (tube_point - beta(s)) / r"""
    if family.is_timelike:
        return np.array([math.cos(t) * math.cos(w), math.sin(t) * math.cos(w), math.sin(w)])
    return mu(family.j, family.lam, t, w)


@dataclass(frozen=True, eq=False)
class TubeSpec:
    """A tube of radius r around a framed curve"""

    curve: FramedCurve
    r: float
    family: TubeFamily
    reg_tol: float = REG_TOL
    metric_tol: float = METRIC_TOL

    def __post_init__(self):
        if not self.r > 0:
            raise ValueError(f"radius must be positive, got {self.r}")
        if self.curve.case is not self.family.curve_case:
            raise ValueError(
                f"{self.family.label} tube needs a {self.family.curve_case.name} curve, "
                f"got {self.curve.case.name}"
            )

    @property
    def epsilon(self) -> int:
        return self.family.normal_sign


@dataclass(frozen=True, eq=False)
class SurfacePoint:
    s: float
    t: float
    w: float
    position: Vec4
    N: Vec4
    frame: FrenetFrame


def regularity_margin(spec: TubeSpec, s: float, t: float, w: float) -> float:
    """|1 + r k1 cos t cos w| (timelike) or |1 + (-1)^((4-j)!) r k1 mu_2|"""
    k1 = spec.curve.curvatures.k1(s)
    c2 = profile(spec.family, t, w)[0]
    sign = 1 if spec.family.is_timelike else spec.family.sigma4
    return abs(1.0 + sign * spec.r * k1 * c2)


def require_regular(spec: TubeSpec, s: float, t: float, w: float):
    margin = regularity_margin(spec, s, t, w)
    if margin <= spec.reg_tol:
        raise SingularPoint((s, t, w), margin)


def tube_point(spec: TubeSpec, s: float, t: float, w: float, check: bool = True) -> Vec4:
    """beta(s) + r sum_i c_i F_i(s)"""
    if check:
        require_regular(spec, s, t, w)
    beta, frame = spec.curve.evaluate(s)
    return beta + spec.r * (profile(spec.family, t, w) @ frame.vectors[1:])


def normal_components(spec: TubeSpec, t: float, w: float) -> np.ndarray:
    """Frenet coefficients (of F1..F4) of the unit normal"""
    c = profile(spec.family, t, w)
    if spec.family.is_timelike:
        scale = -1.0
    else:
        scale = -spec.family.sigma4 * spec.family.lam_j
    return np.concatenate([[0.0], scale * c])


def unit_normal(spec: TubeSpec, s: float, t: float, w: float, check: bool = True) -> Vec4:
    """Closed-form unit normal; <N,N> is 1 (timelike tube) or lambda"""
    if check:
        require_regular(spec, s, t, w)
    return spec.curve.frame_at(s).compose(normal_components(spec, t, w))


def surface_point(spec: TubeSpec, s: float, t: float, w: float) -> SurfacePoint:
    require_regular(spec, s, t, w)
    beta, frame = spec.curve.evaluate(s)
    c = profile(spec.family, t, w)
    return SurfacePoint(
        s, t, w,
        position=beta + spec.r * (c @ frame.vectors[1:]),
        N=frame.compose(normal_components(spec, t, w)),
        frame=frame,
    )


@dataclass(frozen=True)
class MetricTensor3:
    """Symmetric first fundamental form in the (s, t, w) coordinates"""

    g11: float
    g12: float
    g13: float
    g22: float
    g23: float
    g33: float

    @classmethod
    def from_matrix(cls, m: np.ndarray) -> "MetricTensor3":
        return cls(m[0, 0], m[0, 1], m[0, 2], m[1, 1], m[1, 2], m[2, 2])

    @property
    def matrix(self) -> np.ndarray:
        return np.array([
            [self.g11, self.g12, self.g13],
            [self.g12, self.g22, self.g23],
            [self.g13, self.g23, self.g33],
        ])

    @property
    def frak_g(self) -> float:
        """g13^2 g22 - 2 g12 g13 g23 + g11 g23^2 + g12^2 g33 - g11 g22 g33 (= -det g)"""
        return (self.g13 ** 2 * self.g22 - 2 * self.g12 * self.g13 * self.g23
                + self.g11 * self.g23 ** 2 + self.g12 ** 2 * self.g33
                - self.g11 * self.g22 * self.g33)

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.matrix))

    def coefficients(self) -> dict:
        return {"g11": self.g11, "g12": self.g12, "g13": self.g13,
                "g22": self.g22, "g23": self.g23, "g33": self.g33}


def _timelike_metric(r: float, k: Tuple[float, float, float], t: float, w: float) -> MetricTensor3:
    k1, k2, k3 = k
    ct, st, cw, sw = math.cos(t), math.sin(t), math.cos(w), math.sin(w)
    g11 = (-(1 + r * k1 * ct * cw) ** 2 + (r * k2 * ct * cw - r * k3 * sw) ** 2
           + r ** 2 * (k2 ** 2 + k3 ** 2) * st ** 2 * cw ** 2)
    g12 = r ** 2 * (k2 * cw - k3 * ct * sw) * cw
    g13 = r ** 2 * k3 * st
    return MetricTensor3(g11, g12, g13, r ** 2 * cw ** 2, 0.0, r ** 2)


def _spacelike_metric(family: TubeFamily, r: float, k: Tuple[float, float, float],
                      t: float, w: float) -> MetricTensor3:
    k1, k2, k3 = k
    j, lam = family.j, family.lam
    s4, s5, sj = family.sigma4, family.sigma5, family.sign_j
    m2, m3, m4 = mu(j, lam, t, w)
    d2, _, d4 = mu_w(j, lam, t, w)
    # (mu_{j+1})_w, with the index wrapped into 2..4
    d_next = mu_w(j, lam, t, w)[(j + 1 - 2) % 3]

    g11 = (1 + r ** 2 * k2 ** 2 * (-s4 * m3 ** 2 + sj * m2 ** 2)
           + r ** 2 * k3 ** 2 * (s5 * m3 ** 2 + sj * m4 ** 2)
           + 2 * s4 * r * k1 * m2 + r ** 2 * k1 ** 2 * m2 ** 2
           - 2 * s5 * r ** 2 * k2 * k3 * m2 * m4)
    g12 = r ** 2 * d_next * (sj * k3 * d2 - s4 * k2 * d4)
    g22 = r ** 2 * d_next ** 2
    if j == 2:
        g13 = lam * r ** 2 * (-k2 * math.cosh(t) + k3 * math.sinh(t))
    elif j == 3:
        g13 = -lam * r ** 2 * k3 * math.cosh(t)
    else:
        g13 = lam * r ** 2 * k2 * math.sinh(t)
    return MetricTensor3(g11, g12, g13, g22, 0.0, -lam * r ** 2)


def first_fundamental_form(spec: TubeSpec, s: float, t: float, w: float) -> MetricTensor3:
    """Closed-form g_ij of the family"""
    require_regular(spec, s, t, w)
    k = spec.curve.curvatures.at(s)
    if spec.family.is_timelike:
        return _timelike_metric(spec.r, k, t, w)
    return _spacelike_metric(spec.family, spec.r, k, t, w)


def principal_curvatures(spec: TubeSpec, s: float, t: float, w: float) -> Tuple[float, float, float]:
    """Closed-form (kappa1, kappa2, kappa3), eigenvalues of -dN"""
    require_regular(spec, s, t, w)
    r = spec.r
    k1 = spec.curve.curvatures.k1(s)
    c2 = profile(spec.family, t, w)[0]
    if spec.family.is_timelike:
        kappa3 = k1 * c2 / (1 + r * k1 * c2)
        return 1.0 / r, 1.0 / r, kappa3
    fam = spec.family
    kappa = fam.sigma4 * fam.lam_j / r
    kappa3 = k1 * c2 / (fam.lam_j * (1 + fam.sigma4 * r * k1 * c2))
    return kappa, kappa, kappa3


def _central(f, x: np.ndarray, axis: int, h: float) -> np.ndarray:
    e = np.zeros(3)
    e[axis] = h
    return (f(*(x + e)) - f(*(x - e))) / (2.0 * h)


def central_partials(f, s: float, t: float, w: float, h: float = FD_STEP,
                     richardson: bool = False) -> np.ndarray:
    """
    Central differences of f(s, t, w) along each coordinate

    Returns an array whose first axis indexes (d/ds, d/dt, d/dw). With
    richardson=True the h and h/2 estimates are combined as (4 D(h/2) - D(h)) / 3.
    """
    x = np.array([s, t, w], dtype=np.float64)
    out = []
    for axis in range(3):
        d = _central(f, x, axis, h)
        if richardson:
            d = (4.0 * _central(f, x, axis, h / 2) - d) / 3.0
        out.append(d)
    return np.array(out)


def tangent_basis(spec: TubeSpec, s: float, t: float, w: float, h: float = FD_STEP,
                  richardson: bool = False) -> np.ndarray:
    """
    Finite-difference coordinate tangents, rows (T_s, T_t, T_w)

    Raises:
        SingularPoint: if the point or any stencil point is singular
    """
    if h <= 0:
        raise ValueError(f"step must be positive, got {h}")
    require_regular(spec, s, t, w)
    return central_partials(lambda *p: tube_point(spec, *p), s, t, w, h, richardson)


def fd_gram_metric(tangents: np.ndarray) -> MetricTensor3:
    """Gram matrix <T_i, T_j> of three tangents"""
    return MetricTensor3.from_matrix(tangents @ ETA @ tangents.T)


def principal_curvatures_numeric(spec: TubeSpec, s: float, t: float, w: float,
                                 h: float = FD_STEP, richardson: bool = True) -> np.ndarray:
    """
    Eigenvalues of the shape operator g^-1 b with b_ij = -<d_i N, T_j>

    Both N and the tangents are differentiated numerically; the result is
    sorted ascending.

    Raises:
        DegenerateMetric: if the Gram metric is singular
    """
    tangents = tangent_basis(spec, s, t, w, h, richardson)
    dN = central_partials(lambda *p: unit_normal(spec, *p), s, t, w, h, richardson)
    g = fd_gram_metric(tangents)
    if abs(g.frak_g) <= spec.metric_tol:
        raise DegenerateMetric(g.frak_g, (s, t, w))
    b = -(dN @ ETA @ tangents.T)
    b = 0.5 * (b + b.T)
    eigenvalues = np.linalg.eigvals(np.linalg.solve(g.matrix, b))
    return np.sort(eigenvalues.real)


@dataclass(frozen=True)
class MetricAuditRecord:
    """One closed-form coefficient against its finite-difference value"""

    family: str
    coefficient: str
    point: Tuple[float, float, float]
    closed_form: float
    numeric: float
    error: float
    agrees: bool

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "coefficient": self.coefficient,
            "point": list(self.point),
            "closed_form": self.closed_form,
            "numeric": self.numeric,
            "error": self.error,
            "agrees": self.agrees,
        }


def audit_metric(spec: TubeSpec, s: float, t: float, w: float, rel_tol: float = 1e-6,
                 h: float = FD_STEP) -> List[MetricAuditRecord]:
    """Compare every closed-form g_ij with the Gram matrix of FD tangents"""
    closed = first_fundamental_form(spec, s, t, w).coefficients()
    numeric = fd_gram_metric(tangent_basis(spec, s, t, w, h, richardson=True)).coefficients()
    scale = max(1.0, max(abs(v) for v in numeric.values()))
    records = []
    for name in closed:
        error = abs(closed[name] - numeric[name]) / scale
        records.append(MetricAuditRecord(spec.family.label, name, (s, t, w),
                                         float(closed[name]), float(numeric[name]),
                                         float(error), bool(error <= rel_tol)))
        if error > rel_tol:
            logger.warning("%s %s disagrees with the FD metric at (%g,%g,%g): %.3e",
                           spec.family.label, name, s, t, w, error)
    return records


def foliation_value(spec: TubeSpec, s: float, t: float, w: float) -> float:
    """<P - beta(s), P - beta(s)>; r^2 for the timelike tube, lambda r^2 otherwise"""
    d = tube_point(spec, s, t, w) - spec.curve.point_at(s)
    return inner(d, d)
