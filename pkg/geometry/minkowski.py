"""
Minkowski Core - Linear algebra of the Lorentz-Minkowski space E^4_1

Vectors are numpy arrays of shape (4,) in the rectangular coordinates
(x1, x2, x3, x4) with metric signature (-, +, +, +).
"""

from enum import Enum

import numpy as np
import numpy.typing as npt

from geometry.errors import NonFiniteVector

Vec4 = npt.NDArray[np.float64]

# Gram matrix of the standard basis
ETA = np.diag([-1.0, 1.0, 1.0, 1.0])

CAUSAL_TOL = 1e-12


class CausalCharacter(Enum):
    """Causal character of a vector"""

    SPACELIKE = "spacelike"
    TIMELIKE = "timelike"
    LIGHTLIKE = "lightlike"


def vec4(*components) -> Vec4:
    """
    Build a Vec4 from four components (or one iterable of four)

    Raises:
        NonFiniteVector: if any component is NaN or infinite
        ValueError: if the shape is not (4,)
    """
    if len(components) == 1:
        components = tuple(components[0])
    u = np.asarray(components, dtype=np.float64)
    if u.shape != (4,):
        raise ValueError(f"Vec4 needs exactly 4 components, got shape {u.shape}")
    if not np.all(np.isfinite(u)):
        raise NonFiniteVector(f"non-finite component in {u!r}")
    return u


def basis(i: int) -> Vec4:
    """Standard basis vector e_i (1-based, as in the coordinate names)"""
    e = np.zeros(4)
    e[i - 1] = 1.0
    return e


def inner(u: Vec4, v: Vec4) -> float:
    """Indefinite inner product -u1 v1 + u2 v2 + u3 v3 + u4 v4"""
    return float(-u[0] * v[0] + u[1] * v[1] + u[2] * v[2] + u[3] * v[3])


def _det3(m) -> float:
    # Explicit expansion keeps integer inputs exact
    return (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))


def triple_cross(u: Vec4, v: Vec4, w: Vec4) -> Vec4:
    """
    Ternary vector product u x v x w

    Formal determinant expansion along the first row (-e1, e2, e3, e4)
    with u, v, w as the remaining rows. The result is orthogonal to all
    three arguments under the indefinite inner product.
    """
    rows = (u, v, w)
    cofactors = []
    for col in range(4):
        minor = [[row[c] for c in range(4) if c != col] for row in rows]
        cofactors.append((-1) ** col * _det3(minor))
    # -e1 in the first slot flips the first component
    return np.array([-cofactors[0], cofactors[1], cofactors[2], cofactors[3]], dtype=np.float64)


def causal_character(u: Vec4, tol: float = CAUSAL_TOL) -> CausalCharacter:
    """Classify u as spacelike, timelike or lightlike; the zero vector is spacelike"""
    if not np.any(u):
        return CausalCharacter.SPACELIKE
    q = inner(u, u)
    band = tol * max(1.0, float(np.dot(u, u)))
    if q > band:
        return CausalCharacter.SPACELIKE
    if q < -band:
        return CausalCharacter.TIMELIKE
    return CausalCharacter.LIGHTLIKE


def norm(u: Vec4) -> float:
    """Pseudo-norm sqrt(|<u,u>|)"""
    return float(np.sqrt(abs(inner(u, u))))
