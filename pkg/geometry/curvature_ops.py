"""
Curvature Operators - Mean curvatures and the operators L_k on the Gauss map

L_k N = -eps C_k (grad H_{k+1} + (n H_1 H_{k+1} - (n-k-1) H_{k+2}) N),  n = 3

The generic route builds grad H_{k+1} numerically from the tube alone and
is treated as ground truth; the closed forms for each family are evaluated
exactly as written and compared against it term by term.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from geometry.errors import DegenerateMetric, UnsupportedFamily
from geometry.minkowski import Vec4, inner
from geometry.tubes import (FD_STEP, METRIC_TOL, MetricTensor3, TubeSpec, central_partials,
                            fd_gram_metric, normal_components, principal_curvatures, profile,
                            tangent_basis, require_regular)

logger = logging.getLogger(__name__)

DIMENSION = 3
AGREEMENT_TOL = 1e-6


@dataclass(frozen=True)
class SymmetricFunctions:
    a1: float
    a2: float
    a3: float

    def __getitem__(self, k: int) -> float:
        return (self.a1, self.a2, self.a3)[k - 1]


def symmetric_functions(kappa) -> SymmetricFunctions:
    """a_k = (-1)^k e_k(kappa1, kappa2, kappa3)"""
    k1, k2, k3 = (float(x) for x in kappa)
    return SymmetricFunctions(
        a1=-(k1 + k2 + k3),
        a2=k1 * k2 + k1 * k3 + k2 * k3,
        a3=-k1 * k2 * k3,
    )


@dataclass(frozen=True)
class MeanCurvatures:
    """H_1..H_3 with H_4 = 0; eps is the sign of <N,N>"""

    H1: float
    H2: float
    H3: float
    epsilon: int

    @property
    def H4(self) -> float:
        return 0.0

    def __getitem__(self, k: int) -> float:
        return (self.H1, self.H2, self.H3, 0.0)[k - 1]


def mean_curvatures(a: SymmetricFunctions, epsilon: int) -> MeanCurvatures:
    """binom(3,k) H_k = (-eps)^k a_k"""
    if epsilon not in (1, -1):
        raise ValueError(f"epsilon must be +1 or -1, got {epsilon}")
    return MeanCurvatures(
        H1=(-epsilon) * a.a1 / 3.0,
        H2=a.a2 / 3.0,
        H3=(-epsilon) ** 3 * a.a3,
        epsilon=epsilon,
    )


def ck_constant(k: int, epsilon: int) -> float:
    """C_k = binom(3, k+1) (-eps)^k"""
    if k not in (1, 2):
        raise ValueError(f"operator index must be 1 or 2, got {k}")
    return float(math.comb(DIMENSION, k + 1) * (-epsilon) ** k)


def gradient_on_M(f_partials, g: MetricTensor3, metric_tol: float = METRIC_TOL,
                  point: Optional[Tuple[float, float, float]] = None) -> np.ndarray:
    """
    Coefficients of grad f along (d_s, d_t, d_w)

    Cofactor rows of the metric divided by frak_g, which equals -det(g),
    so the result is g^-1 (f_s, f_t, f_w).

    Raises:
        DegenerateMetric: if |frak_g| <= metric_tol
    """
    fs, ft, fw = (float(x) for x in f_partials)
    g11, g12, g13, g22, g23, g33 = g.g11, g.g12, g.g13, g.g22, g.g23, g.g33
    frak = g.frak_g
    if not abs(frak) > metric_tol:
        raise DegenerateMetric(frak, point)
    row_s = ((g23 ** 2 - g22 * g33) * fs + (-g13 * g23 + g12 * g33) * ft
             + (g13 * g22 - g12 * g23) * fw)
    row_t = ((-g13 * g23 + g12 * g33) * fs + (g13 ** 2 - g11 * g33) * ft
             + (-g12 * g13 + g11 * g23) * fw)
    row_w = ((g13 * g22 - g12 * g23) * fs + (-g12 * g13 + g11 * g23) * ft
             + (g12 ** 2 - g11 * g22) * fw)
    return np.array([row_s, row_t, row_w]) / frak


@dataclass(frozen=True, eq=False)
class FrenetField:
    """Vector at a surface point, in Frenet components and ambient coordinates"""

    frenet_components: np.ndarray
    ambient: Vec4
    point: Tuple[float, float, float]

    @property
    def euclidean_norm(self) -> float:
        return float(np.linalg.norm(self.frenet_components))


@dataclass(frozen=True, eq=False)
class LkResult(FrenetField):
    k: int = 1
    # tangential part, set by the generic route only
    gradient: Optional[Vec4] = None


def _frenet_field(spec: TubeSpec, components, s: float, t: float, w: float) -> Tuple[np.ndarray, Vec4]:
    components = np.asarray(components, dtype=np.float64)
    return components, spec.curve.frame_at(s).compose(components)


def mean_curvatures_at(spec: TubeSpec, s: float, t: float, w: float,
                       epsilon: int) -> MeanCurvatures:
    """Mean curvatures from the closed-form principal curvatures"""
    return mean_curvatures(symmetric_functions(principal_curvatures(spec, s, t, w)), epsilon)


def lk_gauss_map_numeric(spec: TubeSpec, k: int, s: float, t: float, w: float,
                         h: float = FD_STEP, richardson: bool = False) -> LkResult:
    """
    L_k N through the generic formula

    grad H_{k+1} is assembled from FD partials of H_{k+1}, the Gram metric of
    the FD tangents and the tangents themselves. eps is read off <N,N>.

    Raises:
        SingularPoint: if the point or a stencil point is singular
        DegenerateMetric: if the Gram metric is singular
    """
    if k not in (1, 2):
        raise ValueError(f"operator index must be 1 or 2, got {k}")
    require_regular(spec, s, t, w)
    frame = spec.curve.frame_at(s)
    N = frame.compose(normal_components(spec, t, w))
    epsilon = 1 if inner(N, N) > 0 else -1

    def h_next(s_, t_, w_):
        return mean_curvatures_at(spec, s_, t_, w_, epsilon)[k + 1]

    partials = central_partials(h_next, s, t, w, h, richardson)
    tangents = tangent_basis(spec, s, t, w, h, richardson)
    coefficients = gradient_on_M(partials, fd_gram_metric(tangents), spec.metric_tol, (s, t, w))
    gradient = coefficients @ tangents

    H = mean_curvatures_at(spec, s, t, w, epsilon)
    scalar = DIMENSION * H.H1 * H[k + 1] - (DIMENSION - k - 1) * H[k + 2]
    ambient = -epsilon * ck_constant(k, epsilon) * (gradient + scalar * N)
    return LkResult(frame.components(ambient), ambient, (s, t, w), k=k, gradient=gradient)


def _timelike_trig(t: float, w: float):
    return math.cos(t), math.sin(t), math.cos(w), math.sin(w)


def l1_closed_form(spec: TubeSpec, s: float, t: float, w: float) -> LkResult:
    """L_1 N in Frenet components as written for the family"""
    require_regular(spec, s, t, w)
    r = spec.r
    k1, k2, _ = spec.curve.curvatures.at(s)
    dk1 = spec.curve.curvatures.k1.derivative(s)
    fam = spec.family

    if fam.is_timelike:
        ct, st, cw, sw = _timelike_trig(t, w)
        D = 1 + r * k1 * ct * cw
        comps = [
            -2 * (k1 * k2 * st + dk1 * ct) * cw / (r * D ** 3),
            -2 * (r * k1 * (3 * r * k1 * ct ** 3 * cw ** 3 + 2 * ct ** 2 * math.cos(2 * w)
                            + math.cos(2 * t)) + ct * cw) / (r ** 3 * D ** 2),
            -2 * (1 + 3 * r * k1 * ct * cw) * st * cw / (r ** 3 * D),
            -2 * (3 * r * k1 * ct * cw + 1) * sw / (r ** 3 * D),
        ]
    else:
        lam, s4, s5 = fam.lam, fam.sigma4, fam.sigma5
        m2, m3, m4 = profile(fam, t, w)
        P = s4 + r * k1 * m2
        comps = [
            2 * (-s5 * k1 * k2 * m3 + dk1 * m2) / (r * P ** 3),
            -2 * lam * (m2 + 3 * r ** 2 * m2 ** 3 * k1 ** 2
                        + k1 * (lam * r + 4 * s4 * r * m2 ** 2)) / (r ** 3 * P ** 2),
            -2 * lam * s4 * m3 * (1 + 3 * s4 * r * k1 * m2) / (r ** 3 * P),
            -2 * lam * m4 * (s4 + 3 * r * k1 * m2) / (r ** 3 * P),
        ]
    components, ambient = _frenet_field(spec, comps, s, t, w)
    return LkResult(components, ambient, (s, t, w), k=1)


def l2_closed_form(spec: TubeSpec, s: float, t: float, w: float) -> LkResult:
    """L_2 N in Frenet components as written for the family"""
    require_regular(spec, s, t, w)
    r = spec.r
    k1, k2, _ = spec.curve.curvatures.at(s)
    dk1 = spec.curve.curvatures.k1.derivative(s)
    fam = spec.family

    if fam.is_timelike:
        ct, st, cw, sw = _timelike_trig(t, w)
        D = 1 + r * k1 * ct * cw
        inner_f2 = (r * k1 / 2 * (24 * r * k1 * ct ** 4 * cw ** 4 + 12 * ct ** 3 * math.cos(3 * w)
                                  + 19 * ct * cw + 9 * math.cos(3 * t) * cw)
                    + 6 * ct ** 2 * math.cos(2 * w) + 3 * math.cos(2 * t) - 1)
        comps = [
            (dk1 * ct + k1 * k2 * st) * cw / (r ** 2 * D ** 3),
            k1 * inner_f2 / (4 * r ** 3 * D ** 3),
            3 * k1 * st * ct * cw ** 2 / (r ** 3 * D),
            3 * k1 * ct * sw * cw / (r ** 3 * D),
        ]
    else:
        lam, lam_j = fam.lam, fam.lam_j
        s4, s5, sj = fam.sigma4, fam.sigma5, fam.sign_j
        m2, m3, m4 = profile(fam, t, w)
        P = s4 + r * k1 * m2
        Q = s5 + sj * r * k1 * m2
        comps = [
            lam_j * (sj * m3 * k1 * k2 - s4 * m2 * dk1) / (r ** 2 * P ** 3),
            -lam_j * lam * k1 * (2 * lam * s4 - 3 * sj * m4 ** 2 - 3 * s5 * m3 ** 2
                                 - 3 * s4 * r * k1 * m2 ** 3) / (r ** 3 * P ** 2),
            lam_j * lam * m3 * (3 * s5 * r * k1 * m2) / (r ** 4 * Q),
            lam_j * lam * m4 * (3 * s5 * r * k1 * m2) / (r ** 4 * Q),
        ]
    components, ambient = _frenet_field(spec, comps, s, t, w)
    return LkResult(components, ambient, (s, t, w), k=2)


def lk_closed_form(spec: TubeSpec, k: int, s: float, t: float, w: float) -> LkResult:
    if k == 1:
        return l1_closed_form(spec, s, t, w)
    if k == 2:
        return l2_closed_form(spec, s, t, w)
    raise ValueError(f"operator index must be 1 or 2, got {k}")


def _require_timelike(spec: TubeSpec, what: str):
    if not spec.family.is_timelike:
        raise UnsupportedFamily(f"{what} is only written for the timelike tube, not {spec.family.label}")


def timelike_symmetric_functions(spec: TubeSpec, s: float, t: float, w: float) -> SymmetricFunctions:
    """a_1, a_2, a_3 of the timelike tube written directly in (t, w)"""
    _require_timelike(spec, "timelike_symmetric_functions")
    require_regular(spec, s, t, w)
    r = spec.r
    k1 = spec.curve.curvatures.k1(s)
    ct, _, cw, _ = _timelike_trig(t, w)
    D = 1 + r * k1 * ct * cw
    return SymmetricFunctions(
        a1=(-2 - 3 * r * k1 * ct * cw) / (r * D),
        a2=(1 + 3 * r * k1 * ct * cw) / (r ** 2 * D),
        # -k1 / (r^2 (r k1 + sec t sec w)), cleared of the secants
        a3=-k1 * ct * cw / (r ** 2 * D),
    )


def grad_a2_closed_form(spec: TubeSpec, s: float, t: float, w: float) -> FrenetField:
    """grad a_2 of the timelike tube in Frenet components"""
    _require_timelike(spec, "grad_a2_closed_form")
    require_regular(spec, s, t, w)
    r = spec.r
    k1, k2, _ = spec.curve.curvatures.at(s)
    dk1 = spec.curve.curvatures.k1.derivative(s)
    ct, st, cw, sw = _timelike_trig(t, w)
    D = 1 + r * k1 * ct * cw
    comps = [
        -2 * (dk1 * ct + k1 * k2 * st) * cw / (r * D ** 3),
        -k1 * (2 * ct ** 2 * math.cos(2 * w) + math.cos(2 * t) - 3) / (2 * r ** 2 * D ** 2),
        -2 * k1 * st * ct * cw ** 2 / (r ** 2 * D ** 2),
        -2 * k1 * ct * sw * cw / (r ** 2 * D ** 2),
    ]
    components, ambient = _frenet_field(spec, comps, s, t, w)
    return FrenetField(components, ambient, (s, t, w))


def grad_a3_closed_form(spec: TubeSpec, s: float, t: float, w: float) -> FrenetField:
    """grad a_3 of the timelike tube in Frenet components"""
    _require_timelike(spec, "grad_a3_closed_form")
    require_regular(spec, s, t, w)
    r = spec.r
    k1, k2, _ = spec.curve.curvatures.at(s)
    dk1 = spec.curve.curvatures.k1.derivative(s)
    ct, st, cw, sw = _timelike_trig(t, w)
    D = 1 + r * k1 * ct * cw
    comps = [
        (dk1 * ct + k1 * k2 * st) * cw / (r ** 2 * D ** 3),
        k1 * (2 * ct ** 2 * math.cos(2 * w) + math.cos(2 * t) - 3) / (4 * r ** 3 * D ** 2),
        k1 * st * ct * cw ** 2 / (r ** 3 * D ** 2),
        k1 * ct * sw * cw / (r ** 3 * D ** 2),
    ]
    components, ambient = _frenet_field(spec, comps, s, t, w)
    return FrenetField(components, ambient, (s, t, w))


def gradient_numeric(spec: TubeSpec, f, s: float, t: float, w: float,
                     h: float = FD_STEP, richardson: bool = True) -> FrenetField:
    """grad f of a scalar f(s, t, w) on the tube, via FD partials and FD tangents"""
    partials = central_partials(f, s, t, w, h, richardson)
    tangents = tangent_basis(spec, s, t, w, h, richardson)
    coefficients = gradient_on_M(partials, fd_gram_metric(tangents), spec.metric_tol, (s, t, w))
    ambient = coefficients @ tangents
    return FrenetField(spec.curve.frame_at(s).components(ambient), ambient, (s, t, w))


@dataclass(frozen=True)
class TermComparison:
    """Closed form against the generic route for one Frenet component"""

    family: str
    k: int
    term: str
    point: Tuple[float, float, float]
    closed_form: float
    numeric: float
    difference: float
    agrees: bool

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "k": self.k,
            "term": self.term,
            "point": list(self.point),
            "closed_form": self.closed_form,
            "numeric": self.numeric,
            "difference": self.difference,
            "status": "agreement" if self.agrees else "discrepancy",
        }


def compare_terms(spec: TubeSpec, numeric: LkResult, closed: LkResult,
                  tol: float = AGREEMENT_TOL) -> List[TermComparison]:
    """One record per Frenet component; exactly one status per term"""
    records = []
    for i in range(4):
        diff = abs(float(numeric.frenet_components[i] - closed.frenet_components[i]))
        records.append(TermComparison(
            family=spec.family.label,
            k=numeric.k,
            term=f"F{i + 1}",
            point=numeric.point,
            closed_form=float(closed.frenet_components[i]),
            numeric=float(numeric.frenet_components[i]),
            difference=diff,
            agrees=bool(diff <= tol),
        ))
    return records
