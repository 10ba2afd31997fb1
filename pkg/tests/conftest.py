import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from geometry.frenet import (CurvatureFunction, CurvatureFunctions, CurveCase, FrenetFrame,
                             constant, integrate_frame, sinusoid, standard_frame, zero)
from geometry.tubes import ALL_FAMILIES, TubeFamily, TubeSpec

SQRT2 = math.sqrt(2.0)
SQRT3 = math.sqrt(3.0)

# beta(s) = (sqrt2 sinh s, sqrt2 cosh s, cos s, sin s): unit-speed timelike,
# k1 = sqrt3, k2 = sqrt(8/3), k3 = 1/sqrt3
FIXTURE_CURVATURES = (SQRT3, math.sqrt(8.0 / 3.0), 1.0 / SQRT3)


def fixture_beta(s: float) -> np.ndarray:
    return np.array([SQRT2 * math.sinh(s), SQRT2 * math.cosh(s), math.cos(s), math.sin(s)])


def fixture_frame(s: float) -> np.ndarray:
    ch, sh, c, sn = math.cosh(s), math.sinh(s), math.cos(s), math.sin(s)
    return np.array([
        [SQRT2 * ch, SQRT2 * sh, -sn, c],
        [SQRT2 * sh / SQRT3, SQRT2 * ch / SQRT3, -c / SQRT3, -sn / SQRT3],
        [-ch, -sh, SQRT2 * sn, -SQRT2 * c],
        [sh / SQRT3, ch / SQRT3, SQRT2 * c / SQRT3, SQRT2 * sn / SQRT3],
    ])


@pytest.fixture(scope="session")
def fixture_curve():
    k = CurvatureFunctions(*(constant(v) for v in FIXTURE_CURVATURES))
    initial = FrenetFrame(fixture_frame(0.0), CurveCase.TIMELIKE_CENTER)
    return integrate_frame(CurveCase.TIMELIKE_CENTER, k, (0.0, 1.0), initial,
                           step=1e-3, origin=fixture_beta(0.0))


def witness_curvatures(k1: CurvatureFunction) -> CurvatureFunctions:
    return CurvatureFunctions(k1, constant(0.2), constant(0.1))


def make_spec(family: TubeFamily, k1: CurvatureFunction, r: float = 0.5,
              s_range=(0.0, 2.0)) -> TubeSpec:
    case = family.curve_case
    curve = integrate_frame(case, witness_curvatures(k1), s_range, standard_frame(case), step=1e-3)
    return TubeSpec(curve, r, family)


@pytest.fixture(scope="session")
def sinusoid_specs():
    """One tube per family around k1 = 0.3 + 0.1 sin s, r = 0.5"""
    return {f.label: make_spec(f, sinusoid(0.3, 0.1, 1.0)) for f in ALL_FAMILIES}


@pytest.fixture(scope="session")
def flat_specs():
    """One tube per family around k1 = 0, r = 0.5"""
    return {f.label: make_spec(f, zero()) for f in ALL_FAMILIES}


@pytest.fixture(scope="session")
def timelike_spec(sinusoid_specs):
    return sinusoid_specs["timelike"]


FAMILY_LABELS = [f.label for f in ALL_FAMILIES]
SPACELIKE_LABELS = FAMILY_LABELS[1:]
