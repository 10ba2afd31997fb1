"""
Frenet Frames - Signature-aware moving frames along non-null curves in E^4_1

Curves are given by their curvature functions k1, k2, k3 and an initial
frame; the frame and the curve are propagated with classical fixed-step
Runge-Kutta and re-orthonormalized after every step.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy.interpolate import CubicSpline

from geometry.errors import CurveRangeError, DegenerateFrame, NonFiniteVector
from geometry.minkowski import CAUSAL_TOL, ETA, CausalCharacter, Vec4, causal_character, inner

logger = logging.getLogger(__name__)

FRAME_TOL = 1e-8
DEFAULT_STEP = 1e-3
DERIVATIVE_STEP = 1e-5
RENORM_FLOOR = 1e-10


class CurveCase(Enum):
    """The four non-null curve cases, named after the position of the timelike Frenet vector"""

    TIMELIKE_CENTER = 1
    SPACELIKE_J2 = 2
    SPACELIKE_J3 = 3
    SPACELIKE_J4 = 4

    @property
    def timelike_index(self) -> int:
        """1-based index of the Frenet vector with <F,F> = -1"""
        return self.value

    @property
    def signature(self) -> Tuple[int, int, int, int]:
        """(eps1, eps2, eps3, eps4)"""
        return tuple(-1 if i == self.value else 1 for i in range(1, 5))

    @classmethod
    def spacelike(cls, j: int) -> "CurveCase":
        """Spacelike case whose timelike vector is F_j"""
        if j not in (2, 3, 4):
            raise ValueError(f"j must be 2, 3 or 4, got {j}")
        return cls(j)


class CurvatureFunction:
    """A scalar function of arclength with an optional analytic derivative"""

    def __init__(self, value: Callable[[float], float],
                 derivative: Optional[Callable[[float], float]] = None,
                 label: str = "custom"):
        self._value = value
        self._derivative = derivative
        self.label = label

    def __call__(self, s: float) -> float:
        return float(self._value(s))

    def derivative(self, s: float) -> float:
        """Analytic derivative when supplied, else a central difference"""
        if self._derivative is not None:
            return float(self._derivative(s))
        h = DERIVATIVE_STEP
        return (self(s + h) - self(s - h)) / (2.0 * h)

    @property
    def is_identically_zero(self) -> bool:
        return self.label == "zero"

    def __repr__(self) -> str:
        return f"CurvatureFunction({self.label})"


def zero() -> CurvatureFunction:
    """k(s) = 0"""
    return CurvatureFunction(lambda s: 0.0, lambda s: 0.0, label="zero")


def constant(c: float) -> CurvatureFunction:
    """k(s) = c"""
    c = float(c)
    if c == 0.0:
        return zero()
    return CurvatureFunction(lambda s: c, lambda s: 0.0, label=f"constant({c:g})")


def sinusoid(a: float, b: float, omega: float = 1.0) -> CurvatureFunction:
    """k(s) = a + b sin(omega s)"""
    a, b, omega = float(a), float(b), float(omega)
    return CurvatureFunction(
        lambda s: a + b * math.sin(omega * s),
        lambda s: b * omega * math.cos(omega * s),
        label=f"sinusoid({a:g},{b:g},{omega:g})",
    )


def table(s_samples: Sequence[float], values: Sequence[float]) -> CurvatureFunction:
    """Natural cubic spline through tabulated samples"""
    spline = CubicSpline(np.asarray(s_samples, dtype=float), np.asarray(values, dtype=float),
                         bc_type="natural")
    slope = spline.derivative()
    return CurvatureFunction(lambda s: spline(s), lambda s: slope(s),
                             label=f"table({len(s_samples)} samples)")


@dataclass(frozen=True)
class CurvatureFunctions:
    """First, second and third curvatures of a curve"""

    k1: CurvatureFunction
    k2: CurvatureFunction
    k3: CurvatureFunction

    def at(self, s: float) -> Tuple[float, float, float]:
        return self.k1(s), self.k2(s), self.k3(s)

    def derivatives(self, s: float) -> Tuple[float, float, float]:
        return self.k1.derivative(s), self.k2.derivative(s), self.k3.derivative(s)


@dataclass(frozen=True, eq=False)
class FrenetFrame:
    """Ordered quadruple (F1..F4); row i of `vectors` is F_{i+1}"""

    vectors: np.ndarray
    case: CurveCase

    def __post_init__(self):
        vectors = np.array(self.vectors, dtype=np.float64)
        if vectors.shape != (4, 4):
            raise ValueError(f"frame needs a 4x4 array, got {vectors.shape}")
        if not np.all(np.isfinite(vectors)):
            raise NonFiniteVector("non-finite Frenet vector")
        vectors.setflags(write=False)
        object.__setattr__(self, "vectors", vectors)

    @property
    def F1(self) -> Vec4:
        return self.vectors[0]

    @property
    def F2(self) -> Vec4:
        return self.vectors[1]

    @property
    def F3(self) -> Vec4:
        return self.vectors[2]

    @property
    def F4(self) -> Vec4:
        return self.vectors[3]

    @property
    def signature(self) -> np.ndarray:
        return np.array(self.case.signature, dtype=np.float64)

    def components(self, v: Vec4) -> np.ndarray:
        """Frenet coefficients of v: c_i = eps_i <v, F_i>"""
        return self.signature * (self.vectors @ (ETA @ v))

    def compose(self, coefficients) -> Vec4:
        """Ambient vector sum_i c_i F_i"""
        return np.asarray(coefficients, dtype=np.float64) @ self.vectors


def standard_frame(case: CurveCase) -> FrenetFrame:
    """Coordinate basis arranged so that e1 sits in the timelike slot"""
    order = [1, 2, 3, 4]
    j = case.timelike_index
    order[0], order[j - 1] = order[j - 1], order[0]
    return FrenetFrame(np.eye(4)[[i - 1 for i in order]], case)


def frenet_matrix(case: CurveCase, k: Tuple[float, float, float]) -> np.ndarray:
    """Coefficient matrix K with F' = K F for the case's Frenet system"""
    k1, k2, k3 = k
    # Sign pattern of F2' -> F1 and F3' -> F2, as printed per case
    a = 1.0 if case in (CurveCase.TIMELIKE_CENTER, CurveCase.SPACELIKE_J2) else -1.0
    b = -1.0 if case in (CurveCase.TIMELIKE_CENTER, CurveCase.SPACELIKE_J4) else 1.0
    c = -1.0 if case in (CurveCase.TIMELIKE_CENTER, CurveCase.SPACELIKE_J2) else 1.0
    return np.array([
        [0.0, k1, 0.0, 0.0],
        [a * k1, 0.0, k2, 0.0],
        [0.0, b * k2, 0.0, k3],
        [0.0, 0.0, c * k3, 0.0],
    ])


def frenet_derivative(frame: FrenetFrame, k: Tuple[float, float, float]) -> np.ndarray:
    """(F1'..F4') as rows, from the case's Frenet equations"""
    return frenet_matrix(frame.case, k) @ frame.vectors


def check_orthonormality(frame: FrenetFrame) -> float:
    """max over i<=j of |<F_i,F_j> - eps_i delta_ij|"""
    gram = frame.vectors @ ETA @ frame.vectors.T
    target = np.diag(frame.signature)
    return float(np.max(np.abs(np.triu(gram - target))))


def reorthonormalize(vectors: np.ndarray, case: CurveCase) -> np.ndarray:
    """
    Signature-aware Gram-Schmidt in the order F1 -> F4

    Raises:
        DegenerateFrame: if a normalization denominator drops below 1e-10
    """
    eps = case.signature
    out = np.empty((4, 4))
    for i in range(4):
        v = np.array(vectors[i], dtype=np.float64)
        for j in range(i):
            v -= eps[j] * inner(v, out[j]) * out[j]
        magnitude = math.sqrt(abs(inner(v, v)))
        if magnitude < RENORM_FLOOR:
            raise DegenerateFrame(i, magnitude)
        out[i] = v / magnitude
    return out


def _state_derivative(case: CurveCase, curvatures: CurvatureFunctions, s: float,
                      state: np.ndarray) -> np.ndarray:
    # state rows: beta, F1, F2, F3, F4
    d = np.empty_like(state)
    d[0] = state[1]
    d[1:] = frenet_matrix(case, curvatures.at(s)) @ state[1:]
    return d


def rk4_step(case: CurveCase, curvatures: CurvatureFunctions, s: float,
             state: np.ndarray, h: float) -> np.ndarray:
    """One classical Runge-Kutta step of (beta, F1..F4); no re-orthonormalization"""
    k1 = _state_derivative(case, curvatures, s, state)
    k2 = _state_derivative(case, curvatures, s + h / 2, state + h / 2 * k1)
    k3 = _state_derivative(case, curvatures, s + h / 2, state + h / 2 * k2)
    k4 = _state_derivative(case, curvatures, s + h, state + h * k3)
    return state + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


class FramedCurve:
    """
    Sampled curve beta(s) with its Frenet frames

    Nodes come from integrate_frame. Evaluation between nodes takes one
    partial Runge-Kutta step from the node below, so off-grid values carry
    the same order of accuracy as the nodes.
    """

    def __init__(self, case: CurveCase, curvatures: CurvatureFunctions,
                 s_grid: np.ndarray, points: np.ndarray, frames: np.ndarray):
        self.case = case
        self.curvatures = curvatures
        self.s_grid = np.asarray(s_grid, dtype=np.float64)
        self.points = np.asarray(points, dtype=np.float64)
        self.frames = np.asarray(frames, dtype=np.float64)
        for array in (self.s_grid, self.points, self.frames):
            array.setflags(write=False)
        self._evaluate = lru_cache(maxsize=16384)(self._evaluate_uncached)

    @property
    def s_range(self) -> Tuple[float, float]:
        return float(self.s_grid[0]), float(self.s_grid[-1])

    def __len__(self) -> int:
        return len(self.s_grid)

    def uniform_node_count(self) -> int:
        """Leading nodes on the uniform step; a short final step is left out"""
        steps = np.diff(self.s_grid)
        if len(steps) > 1 and not math.isclose(steps[-1], steps[0], rel_tol=1e-9):
            return len(self.s_grid) - 1
        return len(self.s_grid)

    def frame(self, i: int) -> FrenetFrame:
        """Frame at node i"""
        return FrenetFrame(self.frames[i], self.case)

    def evaluate(self, s: float) -> Tuple[Vec4, FrenetFrame]:
        """(beta(s), frame at s) for any s inside the integrated range"""
        return self._evaluate(float(s))

    def point_at(self, s: float) -> Vec4:
        return self.evaluate(s)[0]

    def frame_at(self, s: float) -> FrenetFrame:
        return self.evaluate(s)[1]

    def _evaluate_uncached(self, s: float) -> Tuple[Vec4, FrenetFrame]:
        s0, s1 = self.s_range
        slack = 1e-12 * max(1.0, abs(s0), abs(s1))
        if s < s0 - slack or s > s1 + slack:
            raise CurveRangeError(f"s={s:.6g} outside integrated range [{s0:.6g}, {s1:.6g}]")
        if len(self.s_grid) == 1:
            return self.points[0].copy(), self.frame(0)

        i = int(np.searchsorted(self.s_grid, s, side="right")) - 1
        i = min(max(i, 0), len(self.s_grid) - 2)
        ds = s - self.s_grid[i]
        if ds == 0.0:
            return self.points[i].copy(), self.frame(i)

        state = np.vstack([self.points[i], self.frames[i]])
        state = rk4_step(self.case, self.curvatures, float(self.s_grid[i]), state, ds)
        vectors = reorthonormalize(state[1:], self.case)
        return state[0], FrenetFrame(vectors, self.case)


def integrate_frame(case: CurveCase, curvatures: CurvatureFunctions,
                    s_range: Tuple[float, float], initial: FrenetFrame,
                    step: float = DEFAULT_STEP, origin: Optional[Vec4] = None,
                    frame_tol: float = FRAME_TOL) -> FramedCurve:
    """
    Propagate frame and curve (beta' = F1) over s_range

    Args:
        case: curve case whose Frenet system is integrated
        curvatures: k1, k2, k3 as functions of arclength
        s_range: (s0, s1) with s1 >= s0
        initial: frame at s0, orthonormal within frame_tol
        step: fixed Runge-Kutta step
        origin: beta(s0), the coordinate origin by default

    Raises:
        ValueError: on a non-positive step, reversed range or bad initial frame
        DegenerateFrame: if re-orthonormalization breaks down
    """
    if step <= 0:
        raise ValueError(f"step must be positive, got {step}")
    s0, s1 = float(s_range[0]), float(s_range[1])
    if s1 < s0:
        raise ValueError(f"reversed arclength range ({s0}, {s1})")
    if initial.case is not case:
        raise ValueError(f"initial frame is {initial.case.name}, expected {case.name}")
    drift = check_orthonormality(initial)
    if drift > frame_tol:
        raise ValueError(f"initial frame not orthonormal (drift {drift:.3e})")

    beta0 = np.zeros(4) if origin is None else np.asarray(origin, dtype=np.float64)
    n_steps = int(math.ceil((s1 - s0) / step - 1e-9)) if s1 > s0 else 0
    s_grid = s0 + step * np.arange(n_steps + 1)
    s_grid[-1] = s1

    points = np.empty((n_steps + 1, 4))
    frames = np.empty((n_steps + 1, 4, 4))
    points[0] = beta0
    frames[0] = initial.vectors
    state = np.vstack([beta0, initial.vectors])

    for i in range(n_steps):
        h = s_grid[i + 1] - s_grid[i]
        state = rk4_step(case, curvatures, float(s_grid[i]), state, h)
        state[1:] = reorthonormalize(state[1:], case)
        points[i + 1] = state[0]
        frames[i + 1] = state[1:]

    logger.debug("integrated %s over [%g, %g] in %d steps", case.name, s0, s1, n_steps)
    return FramedCurve(case, curvatures, s_grid, points, frames)


def five_point_derivative(values: np.ndarray, h: float) -> np.ndarray:
    """Fourth-order central derivative along axis 0; loses two samples at each end"""
    return (-values[4:] + 8 * values[3:-1] - 8 * values[1:-3] + values[:-4]) / (12.0 * h)


@dataclass
class FrameIntegrity:
    case: CurveCase
    nodes: int
    orthonormality_drift: float
    unit_speed_drift: float
    velocity_mismatch: float
    tangent_character: CausalCharacter
    expected_character: CausalCharacter

    @property
    def character_ok(self) -> bool:
        return self.tangent_character is self.expected_character

    def within(self, tol: float) -> bool:
        return (self.character_ok and self.orthonormality_drift < tol
                and self.unit_speed_drift < tol and self.velocity_mismatch < tol)

    def to_dict(self) -> dict:
        return {
            "case": self.case.name,
            "nodes": self.nodes,
            "orthonormality_drift": self.orthonormality_drift,
            "unit_speed_drift": self.unit_speed_drift,
            "velocity_mismatch": self.velocity_mismatch,
            "tangent_character": self.tangent_character.value,
            "expected_character": self.expected_character.value,
        }


def frame_integrity(curve: FramedCurve, causal_tol: float = CAUSAL_TOL) -> FrameIntegrity:
    """
    Drift measures over every node of an integrated curve

    beta' comes from a five-point derivative of the node positions, so the
    speed and velocity checks skip two nodes at each end and need at least
    five uniform nodes (otherwise they report 0).
    """
    frames = curve.frames
    signature = np.array(curve.case.signature, dtype=np.float64)
    gram = np.einsum("nik,kl,njl->nij", frames, ETA, frames)
    ortho = float(np.max(np.abs(np.triu(gram - np.diag(signature)))))

    speed_drift = mismatch = 0.0
    n = curve.uniform_node_count()
    if n >= 5:
        h = float(curve.s_grid[1] - curve.s_grid[0])
        velocity = five_point_derivative(curve.points[:n], h)
        speed = np.einsum("ni,ij,nj->n", velocity, ETA, velocity)
        speed_drift = float(np.max(np.abs(speed - signature[0])))
        mismatch = float(np.max(np.linalg.norm(velocity - frames[2:n - 2, 0], axis=1)))

    expected = CausalCharacter.TIMELIKE if signature[0] < 0 else CausalCharacter.SPACELIKE
    worst = frames[int(np.argmax(np.abs(gram[:, 0, 0] - signature[0])))][0]
    return FrameIntegrity(curve.case, len(curve), ortho, speed_drift, mismatch,
                          causal_character(worst, causal_tol), expected)
