"""Reproduction report: computed risk grid versus the published one.

Every cell of the published use-case grid is recomputed from the shipped
fixtures and compared at print precision. Deviations are reported, never
fitted away; the known inconsistencies of the reference study are attached
as notes so a reader can tell a fresh regression from a documented one.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import reference
from .risk import AlphaModel, RiskGrid, compare_use_cases
from .schema import AttributeSchema

STATUS_MATCH = "match"
STATUS_DEVIATION = "deviation"

# Published cells carry three significant digits; sub-0.01 cells are printed
# in scientific notation and checked proportionally tighter.
CELL_TOLERANCE = 2e-3
SMALL_CELL_TOLERANCE = 2e-5
SMALL_CELL_CUT = 1e-2


@dataclass(frozen=True)
class CellComparison:
    use_case: str
    far_label: str
    computed: float
    published: float
    difference: float
    tolerance: float
    status: str
    note: str | None


@dataclass(frozen=True)
class ReproductionReport:
    grid: RiskGrid
    comparisons: tuple[CellComparison, ...]
    notes: tuple[str, ...]

    @property
    def deviations(self) -> tuple[CellComparison, ...]:
        return tuple(c for c in self.comparisons if c.status == STATUS_DEVIATION)

    def comparison(self, use_case: str, far_label: str) -> CellComparison:
        for c in self.comparisons:
            if (c.use_case, c.far_label) == (use_case, far_label):
                return c
        raise KeyError((use_case, far_label))


def cell_tolerance(published: float) -> float:
    return SMALL_CELL_TOLERANCE if published < SMALL_CELL_CUT else CELL_TOLERANCE


def build_reproduction_report(
    frr: float = reference.PUBLISHED_FRR,
    n: int = reference.PUBLISHED_GALLERY_SIZE,
    schema: AttributeSchema | None = None,
) -> ReproductionReport:
    """Recompute the published grid from fixtures and compare cell by cell."""
    schema = schema or reference.reference_schema()
    model = AlphaModel.coefficient_weighted(reference.REFERENCE_COEFFICIENTS)
    far_attr = schema.attribute("FAR")
    grid = compare_use_cases(
        use_cases=list(reference.USE_CASES),
        far_levels=list(range(len(far_attr.levels))),
        frr=frr,
        n=n,
        model=model,
        schema=schema,
        mode="approximate",
        reference=reference.PUBLISHED_REFERENCE_CELL,
    )

    comparisons = []
    for (use_case, far_label), published in reference.PUBLISHED_GRID.items():
        computed = grid.cell(use_case, far_label).result.c_identify
        tol = cell_tolerance(published)
        diff = computed - published
        status = STATUS_MATCH if abs(diff) <= tol else STATUS_DEVIATION
        note = reference.KNOWN_GRID_NOTES.get(
            (use_case, far_label)
        ) or reference.KNOWN_GRID_NOTES.get(use_case)
        comparisons.append(
            CellComparison(
                use_case=use_case,
                far_label=far_label,
                computed=computed,
                published=published,
                difference=diff,
                tolerance=tol,
                status=status,
                note=note,
            )
        )

    notes = []
    for key, text in reference.KNOWN_GRID_NOTES.items():
        scope = key if isinstance(key, str) else f"{key[0]} at FAR={key[1]}"
        notes.append(f"{scope}: {text}")

    return ReproductionReport(
        grid=grid, comparisons=tuple(comparisons), notes=tuple(notes)
    )


def _fmt(value: float) -> str:
    return f"{value:.3e}" if 0 < abs(value) < SMALL_CELL_CUT else f"{value:.3f}"


def render_report_text(report: ReproductionReport) -> str:
    grid = report.grid
    lines = [
        "Reproduction report: integrated risk grid",
        f"FRR={grid.frr:g}  N={grid.n}  FPIR mode={grid.mode}  "
        f"alpha weighting={grid.model_kind}",
        "",
        f"{'use case':<12} {'FAR':>6} {'computed':>10} {'published':>10} "
        f"{'diff':>10}  status",
        "-" * 64,
    ]
    for c in report.comparisons:
        lines.append(
            f"{c.use_case:<12} {c.far_label:>6} {_fmt(c.computed):>10} "
            f"{_fmt(c.published):>10} {c.difference:>+10.4f}  {c.status}"
        )
    lines.append("")
    if grid.reference is not None:
        ref_uc, ref_far = grid.reference
        lines.append(f"reference cell: {ref_uc} at FAR={ref_far}")
        flagged = [
            f"{c.use_case} at FAR={c.far_label}"
            for c in grid.cells
            if c.flagged
        ]
        lines.append(
            "cells with lower risk than the reference: "
            + (", ".join(flagged) if flagged else "none")
        )
        lines.append("")
    if report.notes:
        lines.append("notes:")
        for note in report.notes:
            lines.append(f"  - {note}")
        lines.append("")
    return "\n".join(lines)


def report_to_dict(report: ReproductionReport) -> dict:
    return {
        "grid": grid_to_dict(report.grid),
        "comparisons": [
            {
                "use_case": c.use_case,
                "far": c.far_label,
                "computed": c.computed,
                "published": c.published,
                "difference": c.difference,
                "tolerance": c.tolerance,
                "status": c.status,
                "note": c.note,
            }
            for c in report.comparisons
        ],
        "notes": list(report.notes),
    }


def grid_to_dict(grid: RiskGrid) -> dict:
    return {
        "use_cases": list(grid.use_cases),
        "far_labels": list(grid.far_labels),
        "frr": grid.frr,
        "n": grid.n,
        "mode": grid.mode,
        "model_kind": grid.model_kind,
        "reference": list(grid.reference) if grid.reference else None,
        "cells": [
            {
                "use_case": c.use_case,
                "far": c.far_label,
                "far_value": c.far_value,
                "alpha": c.result.alpha,
                "fpir_open": c.result.fpir_open,
                "fpir_close": c.result.fpir_close,
                "c_identify": c.result.c_identify,
                "flagged": c.flagged,
            }
            for c in grid.cells
        ],
    }
