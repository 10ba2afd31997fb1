"""
Tube meshes - Triangulated fixed-s slices of a tube

A slice is the (t, w) sheet over one s value. OBJ vertices carry the
(x2, x3, x4) projection; the full coordinates and per-vertex scalars go
to a sidecar table keyed by vertex index.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Sequence, Tuple

import numpy as np

from geometry.curvature_ops import l1_closed_form, lk_gauss_map_numeric
from geometry.errors import DegenerateMetric, SingularPoint
from geometry.tubes import FD_STEP, TubeSpec, principal_curvatures, tube_point

logger = logging.getLogger(__name__)

Tri = Tuple[int, int, int]

SIDECAR_HEADER = ("index", "slice", "s", "t", "w", "x1", "x2", "x3", "x4",
                  "kappa3", "l1_discrepancy", "regular")


@dataclass
class TubeMesh:
    name: str
    vertices: np.ndarray                  # (n, 4) ambient coordinates
    parameters: np.ndarray                # (n, 3) (s, t, w)
    slices: np.ndarray                    # (n,) slice index
    faces: List[Tri] = field(default_factory=list)
    kappa3: np.ndarray = None
    l1_discrepancy: np.ndarray = None
    regular: np.ndarray = None

    def sidecar_rows(self):
        for i in range(len(self.vertices)):
            yield (i, int(self.slices[i]), *self.parameters[i], *self.vertices[i],
                   float(self.kappa3[i]), float(self.l1_discrepancy[i]), bool(self.regular[i]))


def parameter_ranges(spec: TubeSpec) -> Tuple[Tuple[float, float], Tuple[float, float]]:
    """(t, w) ranges covering one sheet of the family's profile"""
    if spec.family.is_timelike:
        return (0.0, 2 * math.pi), (-math.pi / 2, math.pi / 2)
    return (-1.5, 1.5), (-1.5, 1.5)


def grid_faces(n_t: int, n_w: int, offset: int = 0) -> List[Tri]:
    """Two consistently wound triangles per grid cell; vertex (i, j) sits at i*n_w + j"""
    faces = []
    for i in range(n_t - 1):
        for j in range(n_w - 1):
            a = offset + i * n_w + j
            b = offset + (i + 1) * n_w + j
            c = offset + i * n_w + j + 1
            d = offset + (i + 1) * n_w + j + 1
            faces.append((a, b, c))
            faces.append((b, d, c))
    return faces


def build_tube_mesh(spec: TubeSpec, s_values: Sequence[float], n_t: int, n_w: int,
                    h: float = FD_STEP, richardson: bool = True,
                    with_discrepancy: bool = True) -> TubeMesh:
    """
    Vertices and faces for every slice

    Singular or metric-degenerate vertices stay in the mesh with regular=False
    and NaN scalars.
    """
    if n_t < 2 or n_w < 2:
        raise ValueError("mesh grids need at least 2 samples per direction")
    (t0, t1), (w0, w1) = parameter_ranges(spec)
    t_values = np.linspace(t0, t1, n_t)
    w_values = np.linspace(w0, w1, n_w)

    vertices, params, slices, faces = [], [], [], []
    kappa3, discrepancy, regular = [], [], []
    for index, s_value in enumerate(s_values):
        faces.extend(grid_faces(n_t, n_w, offset=len(vertices)))
        for t_value in t_values:
            for w_value in w_values:
                s, t, w = float(s_value), float(t_value), float(w_value)
                vertices.append(tube_point(spec, s, t, w, check=False))
                params.append((s, t, w))
                slices.append(index)
                try:
                    k3 = principal_curvatures(spec, s, t, w)[2]
                    gap = 0.0
                    if with_discrepancy:
                        numeric = lk_gauss_map_numeric(spec, 1, s, t, w, h, richardson)
                        closed = l1_closed_form(spec, s, t, w)
                        gap = float(np.max(np.abs(numeric.frenet_components
                                                  - closed.frenet_components)))
                    kappa3.append(k3)
                    discrepancy.append(gap)
                    regular.append(True)
                except (SingularPoint, DegenerateMetric):
                    kappa3.append(math.nan)
                    discrepancy.append(math.nan)
                    regular.append(False)

    mesh = TubeMesh(
        name=f"tube_{spec.family.label}",
        vertices=np.array(vertices),
        parameters=np.array(params),
        slices=np.array(slices),
        faces=faces,
        kappa3=np.array(kappa3),
        l1_discrepancy=np.array(discrepancy),
        regular=np.array(regular),
    )
    logger.info("%s: %d vertices, %d triangles, %d irregular", mesh.name, len(vertices),
                len(faces), int(np.sum(~mesh.regular)))
    return mesh


def obj_text(mesh: TubeMesh) -> str:
    """Wavefront OBJ with the (x2, x3, x4) projection as vertex positions"""
    lines = [f"# {mesh.name}: vertices are (x2, x3, x4); x1 is in the sidecar table",
             f"o {mesh.name}"]
    for v in mesh.vertices:
        lines.append(f"v {v[1]:.10f} {v[2]:.10f} {v[3]:.10f}")
    for a, b, c in mesh.faces:
        lines.append(f"f {a + 1} {b + 1} {c + 1}")
    return "\n".join(lines) + "\n"
