"""
Gauss Map Commands - Operator tables and the classification suite
"""

import logging
import math
from pathlib import Path
from typing import Dict, List

import numpy as np

from commands import CommandResult
from geometry.classification import (SCHEMA_VERSION, ExcludedPoint, GaussMapSample,
                                     build_tube_spec, default_grid, evaluate_samples,
                                     theorem_suite)
from geometry.curvature_ops import TermComparison, compare_terms
from geometry.minkowski import inner
from utils.colors import Colors
from utils.config import RunConfig, config_summary
from utils.report_io import atomic_write_text, write_csv, write_json

logger = logging.getLogger(__name__)

OPERATORS = (1, 2)
COMPONENTS = ("F1", "F2", "F3", "F4")


def lk_header() -> List[str]:
    header = ["family", "s", "t", "w", "regular", "reason", "margin"]
    header += [f"N_{c}" for c in COMPONENTS]
    for k in OPERATORS:
        header += [f"L{k}N_{c}" for c in COMPONENTS]
        header += [f"L{k}N_closed_{c}" for c in COMPONENTS]
    header += ["kappa1", "kappa2", "kappa3", "a1", "a2", "a3"]
    for k in OPERATORS:
        header += [f"m{k}", f"L{k}_first_kind_residual", f"L{k}_discrepancy"]
    return header


def _sample_row(label: str, sample: GaussMapSample) -> list:
    row = [label, *sample.point, True, "", sample.margin, *sample.n_components]
    for k in OPERATORS:
        row += list(sample.operators[k].frenet_components)
        row += list(sample.closed[k].frenet_components)
    row += list(sample.kappa) + [sample.a.a1, sample.a.a2, sample.a.a3]
    for k in OPERATORS:
        L = sample.operators[k]
        m = sample.epsilon * inner(L.ambient, sample.N)
        residual = float(np.linalg.norm(L.frenet_components - m * sample.n_components))
        gap = float(np.max(np.abs(L.frenet_components - sample.closed[k].frenet_components)))
        row += [m, residual, gap]
    return row


def _excluded_row(label: str, excluded: ExcludedPoint, width: int) -> list:
    row = [label, *excluded.point, False, excluded.reason]
    return row + [math.nan] * (width - len(row))


def _worst_terms(records: List[TermComparison]) -> List[TermComparison]:
    """The largest difference per (k, term); its status stands for the whole grid"""
    worst: Dict[tuple, TermComparison] = {}
    for rec in records:
        key = (rec.k, rec.term)
        if key not in worst or rec.difference > worst[key].difference:
            worst[key] = rec
    return [worst[key] for key in sorted(worst)]


class GaussCommands:
    """L_k tables and the theorem suite"""

    def cmd_lk(self, config: RunConfig) -> CommandResult:
        """L1N and L2N by the generic route and by closed form over the configured grid"""
        family = config.family
        spec = build_tube_spec(config, family)
        grid = default_grid(family, config.s_range, config.grid.s, config.grid.t, config.grid.w)
        samples = evaluate_samples(spec, grid, ks=OPERATORS, source="numeric", h=config.fd_step,
                                   richardson=config.richardson, with_closed=True,
                                   threads=config.threads)
        if not samples.samples:
            return CommandResult(Colors.error(
                f"{family.label}: all {grid.size} grid points are singular or metric-degenerate; "
                f"no operator values to report"), 1)

        header = lk_header()
        by_point = {p.point: p for p in samples.samples}
        by_point.update({x.point: x for x in samples.excluded})
        rows = []
        for point in grid.points():
            entry = by_point[point]
            if isinstance(entry, GaussMapSample):
                rows.append(_sample_row(family.label, entry))
            else:
                rows.append(_excluded_row(family.label, entry, len(header)))

        tol = config.tolerances.agreement_tol
        discrepancy, records = {}, []
        for k in OPERATORS:
            numeric = samples.operator_components(k)
            closed = np.array([p.closed[k].frenet_components for p in samples.samples])
            gap = np.abs(numeric - closed)
            discrepancy[f"L{k}"] = {
                "max": dict(zip(COMPONENTS, gap.max(axis=0).tolist())),
                "mean": dict(zip(COMPONENTS, gap.mean(axis=0).tolist())),
            }
            for p in samples.samples:
                records.extend(compare_terms(spec, p.operators[k], p.closed[k], tol))
        terms = _worst_terms(records)
        agreement = all(t.agrees for t in terms)

        out = Path(config.output_dir)
        csv_path = write_csv(out / f"lk_{family.label}.csv", header, rows)
        json_path = write_json(out / f"lk_{family.label}_summary.json", {
            "schema_version": SCHEMA_VERSION,
            "settings": config_summary(config),
            "family": family.label,
            "points": len(samples),
            "excluded": len(samples.excluded),
            "agreement_tol": tol,
            "status": "agreement" if agreement else "discrepancy",
            "discrepancy": discrepancy,
            "terms": [t.to_dict() for t in terms],
        })

        lines = [Colors.info(f"{family.label}: {len(samples)} points, "
                             f"{len(samples.excluded)} excluded")]
        for t in terms:
            text = f"  L{t.k}N {t.term}: max |numeric - closed| = {t.difference:.3e}"
            lines.append(text if t.agrees else Colors.warning(text + "  discrepancy"))
        if agreement:
            lines.append(Colors.success(f"closed forms agree within {tol:.1e}"))
        else:
            lines.append(Colors.warning("closed forms disagree; per-term records in the summary"))
        lines += [f"wrote {csv_path}", f"wrote {json_path}"]
        return CommandResult("\n".join(lines), 0, [csv_path, json_path])

    def cmd_classify(self, config: RunConfig) -> CommandResult:
        """Run the suite; exit 0 iff every check gives its expected verdict"""
        report = theorem_suite(config)
        out = Path(config.output_dir)
        json_path = write_json(out / "suite_report.json", report.to_dict())
        table_path = out / "suite_report.txt"
        table = report.to_table()
        atomic_write_text(table_path, table + "\n")

        matched = sum(c.matches for c in report.checks)
        lines = [table, ""]
        errors = [(c.check_id, o.witness, o.error) for c in report.checks
                  for o in c.outcomes if o.error]
        for check_id, witness, error in errors:
            lines.append(Colors.error(f"{check_id} on {witness}: {error}"))
        summary = f"{matched}/{len(report.checks)} checks match the expected verdicts"
        lines.append(Colors.success(summary) if report.all_match else Colors.error(summary))
        lines += [f"wrote {json_path}", f"wrote {table_path}"]
        return CommandResult("\n".join(lines), 0 if report.all_match else 1,
                             [json_path, table_path])
