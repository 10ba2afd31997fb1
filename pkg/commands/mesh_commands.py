"""
Mesh Commands - OBJ export of fixed-s tube slices
"""

from pathlib import Path

import numpy as np

from commands import CommandResult
from geometry.classification import build_tube_spec
from geometry.mesh import SIDECAR_HEADER, build_tube_mesh, obj_text
from utils.colors import Colors
from utils.config import RunConfig
from utils.report_io import atomic_write_text, write_csv


class MeshCommands:

    def cmd_mesh(self, config: RunConfig) -> CommandResult:
        """Write tube_<family>.obj and its per-vertex table"""
        spec = build_tube_spec(config, config.family)
        s0, s1 = config.s_range
        s_values = np.linspace(s0, s1, config.mesh.slices + 2)[1:-1]
        mesh = build_tube_mesh(spec, s_values, config.mesh.t, config.mesh.w,
                               h=config.fd_step, richardson=config.richardson)

        out = Path(config.output_dir)
        obj_path = atomic_write_text(out / f"{mesh.name}.obj", obj_text(mesh))
        csv_path = write_csv(out / f"{mesh.name}_vertices.csv", SIDECAR_HEADER, mesh.sidecar_rows())

        irregular = int(np.sum(~mesh.regular))
        lines = [Colors.info(f"{mesh.name}: {len(mesh.vertices)} vertices, "
                             f"{len(mesh.faces)} triangles over {len(s_values)} slices")]
        if irregular:
            lines.append(Colors.warning(f"{irregular} vertices singular or metric-degenerate "
                                        f"(regular=0 in the table)"))
        lines += [f"wrote {obj_path}", f"wrote {csv_path}"]
        return CommandResult("\n".join(lines), 0, [obj_path, csv_path])
