"""
Frame Commands - Frenet frame integration and drift checks
"""

import logging
from pathlib import Path

from commands import CommandResult
from geometry.frenet import CurveCase, frame_integrity, integrate_frame, standard_frame
from geometry.classification import SCHEMA_VERSION
from utils.colors import Colors
from utils.config import RunConfig, config_summary
from utils.report_io import write_json

logger = logging.getLogger(__name__)


class FrameCommands:
    """Integrates the configured curvatures in every curve case"""

    def cmd_frame(self, config: RunConfig) -> CommandResult:
        """Report orthonormality, unit-speed and velocity drift per curve case"""
        tol = config.tolerances.frame_tol
        records = []
        lines = [Colors.info(f"{'case':<16} {'nodes':>7} {'ortho drift':>12} {'speed drift':>12} "
                             f"{'F1 mismatch':>12} {'F1 character':>13}")]
        ok = True
        for case in CurveCase:
            curve = integrate_frame(case, config.curvatures.build(), config.s_range,
                                    standard_frame(case), step=config.frame_step, frame_tol=tol)
            report = frame_integrity(curve, config.tolerances.causal_tol)
            passed = report.within(tol)
            ok = ok and passed
            records.append({**report.to_dict(), "within_tolerance": passed})
            line = (f"{case.name:<16} {report.nodes:>7} {report.orthonormality_drift:>12.3e} "
                    f"{report.unit_speed_drift:>12.3e} {report.velocity_mismatch:>12.3e} "
                    f"{report.tangent_character.value:>13}")
            lines.append(line if passed else Colors.error(line))
            logger.info("%s: drift %.3e", case.name, report.orthonormality_drift)

        path = write_json(Path(config.output_dir) / "frame_report.json", {
            "schema_version": SCHEMA_VERSION,
            "settings": config_summary(config),
            "frame_tol": tol,
            "within_tolerance": ok,
            "cases": records,
        })
        if ok:
            lines.append(Colors.success(f"all cases within {tol:.1e}"))
        else:
            lines.append(Colors.error(f"drift above {tol:.1e} in at least one case"))
        lines.append(f"wrote {path}")
        return CommandResult("\n".join(lines), 0 if ok else 1, [path])
