"""Persistence and interchange for every pipeline component.

All files are UTF-8 and human-auditable: JSON for structured records, CSV
(comma delimiter, mandatory header row) for tabular data. A bundle is a
directory with the fixed layout::

    manifest.json   format version + design metadata
    schema.json     {"attributes": [{"name": ..., "levels": [...]}]}
    design.csv      card,<one column per attribute>      (level labels)
    pairs.csv       pair,card1,card2                     (1-based numbers)
    responses.csv   respondent_id,pair_number,chosen     (chosen in {1,2})
    estimate.json   per-attribute rows + likelihood metadata
    risk_report.json / risk_report.csv

Serialization is canonical, so saving what was just loaded reproduces the
files byte for byte. Writers take an advisory lock file; readers never
mutate anything.
"""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass
from pathlib import Path

from .design import FractionalDesign, PairingPlan, design_criterion
from .errors import (
    FormatVersionError,
    IntegrityError,
    LockError,
    ParseError,
    ValidationError,
)
from .risk import GridCell, RiskGrid, RiskResult
from .schema import AttributeSchema, ConjointCard, schema_from_dict, schema_to_dict
from .simulate import ChoiceRecord
from .estimate import UtilityEstimate, estimate_from_dict, estimate_to_dict

FORMAT_VERSION = 1

SCHEMA_FILE = "schema.json"
DESIGN_FILE = "design.csv"
PAIRS_FILE = "pairs.csv"
RESPONSES_FILE = "responses.csv"
ESTIMATE_FILE = "estimate.json"
RISK_JSON_FILE = "risk_report.json"
RISK_CSV_FILE = "risk_report.csv"
MANIFEST_FILE = "manifest.json"
LOCK_FILE = ".lock"


def _dump_json(data: dict) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def _load_json(path: Path) -> dict:
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(path, f"cannot read: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(path, exc.msg, line=exc.lineno) from None


# -- schema ------------------------------------------------------------------

def write_schema(schema: AttributeSchema, path) -> None:
    Path(path).write_text(_dump_json(schema_to_dict(schema)), encoding="utf-8")


def read_schema(path) -> AttributeSchema:
    data = _load_json(Path(path))
    try:
        return schema_from_dict(data)
    except ValidationError as exc:
        raise ParseError(path, str(exc)) from None


# -- design ------------------------------------------------------------------

def write_design(design: FractionalDesign, schema: AttributeSchema, path) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["card", *schema.names])
    for card in design.cards:
        labels = card.labels(schema)
        writer.writerow([card.index, *(labels[n] for n in schema.names)])
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def read_design(
    path, schema: AttributeSchema, criterion_value: float | None = None,
    seed: int | None = None,
) -> FractionalDesign:
    path = Path(path)
    rows = _read_csv(path, ["card", *schema.names])
    cards = []
    for lineno, row in rows:
        try:
            number = int(row["card"])
        except ValueError:
            raise ParseError(path, f"bad card number {row['card']!r}", line=lineno,
                             field="card") from None
        assignment = {}
        for a in schema.attributes:
            label = row[a.name]
            try:
                assignment[a.name] = a.level_index(label)
            except ValidationError as exc:
                raise ParseError(path, str(exc), line=lineno, field=a.name) from None
        cards.append(ConjointCard(assignment, index=number))
    try:
        return FractionalDesign(
            cards=tuple(cards),
            criterion_value=(
                criterion_value
                if criterion_value is not None
                else design_criterion(cards, schema)
            ),
            seed=seed,
        )
    except ValidationError as exc:
        raise ParseError(path, str(exc)) from None


# -- pairing plan -------------------------------------------------------------

def write_pairs(plan: PairingPlan, path) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["pair", "card1", "card2"])
    for i, (c1, c2) in enumerate(plan.pairs, start=1):
        writer.writerow([i, c1, c2])
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def read_pairs(path, seed: int | None = None) -> PairingPlan:
    path = Path(path)
    rows = _read_csv(path, ["pair", "card1", "card2"])
    pairs = []
    for lineno, row in rows:
        try:
            number = int(row["pair"])
            c1, c2 = int(row["card1"]), int(row["card2"])
        except ValueError:
            raise ParseError(path, "pair rows must be integers", line=lineno) from None
        if number != len(pairs) + 1:
            raise ParseError(
                path, f"pair numbers must run 1..K, got {number}", line=lineno,
                field="pair",
            )
        pairs.append((c1, c2))
    return PairingPlan(pairs=tuple(pairs), seed=seed)


# -- responses -----------------------------------------------------------------

def write_responses(records: list[ChoiceRecord], path) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["respondent_id", "pair_number", "chosen"])
    for r in records:
        writer.writerow([r.respondent, r.pair_number, r.chosen])
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def append_response(record: ChoiceRecord, path) -> None:
    """Append one record; creates the file with its header when missing."""
    path = Path(path)
    new = not path.exists()
    with path.open("a", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        if new:
            writer.writerow(["respondent_id", "pair_number", "chosen"])
        writer.writerow([record.respondent, record.pair_number, record.chosen])


def read_responses(path) -> list[ChoiceRecord]:
    path = Path(path)
    rows = _read_csv(path, ["respondent_id", "pair_number", "chosen"])
    records = []
    for lineno, row in rows:
        try:
            records.append(
                ChoiceRecord(
                    respondent=row["respondent_id"],
                    pair_number=int(row["pair_number"]),
                    chosen=int(row["chosen"]),
                )
            )
        except (ValueError, ValidationError) as exc:
            raise ParseError(path, str(exc), line=lineno) from None
    return records


# -- estimate ------------------------------------------------------------------

def write_estimate(est: UtilityEstimate, path) -> None:
    Path(path).write_text(_dump_json(estimate_to_dict(est)), encoding="utf-8")


def read_estimate(path) -> UtilityEstimate:
    data = _load_json(Path(path))
    try:
        return estimate_from_dict(data)
    except ValidationError as exc:
        raise ParseError(path, str(exc)) from None


# -- risk grid -----------------------------------------------------------------

def write_risk_grid(grid: RiskGrid, json_path, csv_path=None) -> None:
    from .report import grid_to_dict

    Path(json_path).write_text(_dump_json(grid_to_dict(grid)), encoding="utf-8")
    if csv_path is not None:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["FAR", *grid.use_cases])
        for far in grid.far_labels:
            writer.writerow(
                [far]
                + [repr(grid.cell(uc, far).result.c_identify) for uc in grid.use_cases]
            )
        Path(csv_path).write_text(buf.getvalue(), encoding="utf-8")


def read_risk_grid(path) -> RiskGrid:
    data = _load_json(Path(path))
    try:
        cells = tuple(
            GridCell(
                use_case=c["use_case"],
                far_label=c["far"],
                far_value=float(c["far_value"]),
                result=RiskResult(
                    alpha=float(c["alpha"]),
                    fpir_open=float(c["fpir_open"]),
                    fpir_close=float(c["fpir_close"]),
                    c_identify=float(c["c_identify"]),
                    mode=data["mode"],
                ),
                flagged=bool(c["flagged"]),
            )
            for c in data["cells"]
        )
        return RiskGrid(
            use_cases=tuple(data["use_cases"]),
            far_labels=tuple(data["far_labels"]),
            cells=cells,
            reference=tuple(data["reference"]) if data.get("reference") else None,
            frr=float(data["frr"]),
            n=int(data["n"]),
            mode=data["mode"],
            model_kind=data["model_kind"],
        )
    except (TypeError, KeyError, ValueError) as exc:
        raise ParseError(path, f"malformed risk grid: {exc}") from None


# -- bundle --------------------------------------------------------------------

@dataclass
class ProjectBundle:
    """Everything one study produces, cross-validated on load."""

    schema: AttributeSchema | None = None
    design: FractionalDesign | None = None
    plan: PairingPlan | None = None
    responses: list[ChoiceRecord] | None = None
    estimate: UtilityEstimate | None = None
    risk_grid: RiskGrid | None = None
    format_version: int = FORMAT_VERSION

    def validate(self) -> None:
        """Check every cross-reference between present components."""
        if self.design is not None and self.schema is None:
            raise IntegrityError("a design requires its schema")
        if self.plan is not None:
            if self.design is None:
                raise IntegrityError("a pairing plan requires its design")
            numbers = {c.index for c in self.design.cards}
            for k, (c1, c2) in enumerate(self.plan.pairs, start=1):
                for ref in (c1, c2):
                    if ref not in numbers:
                        raise IntegrityError(
                            f"pair {k} references card {ref}, which is not in "
                            f"the {len(numbers)}-card design"
                        )
        if self.responses is not None:
            if self.plan is None:
                raise IntegrityError("responses require a pairing plan")
            n_pairs = len(self.plan.pairs)
            for r in self.responses:
                if not 1 <= r.pair_number <= n_pairs:
                    raise IntegrityError(
                        f"response by {r.respondent!r} references pair "
                        f"{r.pair_number} of a {n_pairs}-pair plan"
                    )
        if self.estimate is not None and self.schema is not None:
            if set(self.estimate.attributes) != set(self.schema.names):
                raise IntegrityError(
                    "estimate attributes do not match the schema"
                )


def save(bundle: ProjectBundle, path) -> None:
    """Write the bundle under an advisory directory lock."""
    bundle.validate()
    directory = Path(path)
    directory.mkdir(parents=True, exist_ok=True)
    lock = directory / LOCK_FILE
    try:
        fd = os.open(lock, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
    except FileExistsError:
        raise LockError(
            f"{lock} exists: another writer owns this bundle "
            "(remove the file if that writer is gone)"
        ) from None
    try:
        os.close(fd)
        manifest = {"format_version": bundle.format_version, "components": []}
        if bundle.schema is not None:
            write_schema(bundle.schema, directory / SCHEMA_FILE)
            manifest["components"].append("schema")
        if bundle.design is not None:
            write_design(bundle.design, bundle.schema, directory / DESIGN_FILE)
            manifest["components"].append("design")
            manifest["design"] = {
                "criterion_value": bundle.design.criterion_value,
                "seed": bundle.design.seed,
            }
        if bundle.plan is not None:
            write_pairs(bundle.plan, directory / PAIRS_FILE)
            manifest["components"].append("pairs")
            manifest["pairs"] = {"seed": bundle.plan.seed}
        if bundle.responses is not None:
            write_responses(bundle.responses, directory / RESPONSES_FILE)
            manifest["components"].append("responses")
        if bundle.estimate is not None:
            write_estimate(bundle.estimate, directory / ESTIMATE_FILE)
            manifest["components"].append("estimate")
        if bundle.risk_grid is not None:
            write_risk_grid(
                bundle.risk_grid, directory / RISK_JSON_FILE, directory / RISK_CSV_FILE
            )
            manifest["components"].append("risk_grid")
        (directory / MANIFEST_FILE).write_text(_dump_json(manifest), encoding="utf-8")
    finally:
        lock.unlink(missing_ok=True)


def load(path) -> ProjectBundle:
    directory = Path(path)
    manifest_path = directory / MANIFEST_FILE
    manifest = _load_json(manifest_path)
    version = manifest.get("format_version")
    if not isinstance(version, int):
        raise ParseError(manifest_path, "manifest lacks an integer format_version")
    if version > FORMAT_VERSION:
        raise FormatVersionError(
            f"bundle format {version} is newer than supported {FORMAT_VERSION}"
        )
    components = set(manifest.get("components", []))

    bundle = ProjectBundle(format_version=version)
    if "schema" in components:
        bundle.schema = read_schema(directory / SCHEMA_FILE)
    if "design" in components:
        meta = manifest.get("design", {})
        bundle.design = read_design(
            directory / DESIGN_FILE,
            bundle.schema,
            criterion_value=meta.get("criterion_value"),
            seed=meta.get("seed"),
        )
    if "pairs" in components:
        bundle.plan = read_pairs(
            directory / PAIRS_FILE, seed=manifest.get("pairs", {}).get("seed")
        )
    if "responses" in components:
        bundle.responses = read_responses(directory / RESPONSES_FILE)
    if "estimate" in components:
        bundle.estimate = read_estimate(directory / ESTIMATE_FILE)
    if "risk_grid" in components:
        bundle.risk_grid = read_risk_grid(directory / RISK_JSON_FILE)
    bundle.validate()
    return bundle


# -- csv plumbing ---------------------------------------------------------------

def _read_csv(path: Path, expected_header: list[str]):
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(path, f"cannot read: {exc.strerror}") from None
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError(path, "missing header row", line=1) from None
    if header != expected_header:
        raise ParseError(
            path,
            f"header {header!r} does not match expected {expected_header!r}",
            line=1,
        )
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(expected_header):
            raise ParseError(
                path, f"expected {len(expected_header)} fields, got {len(row)}",
                line=lineno,
            )
        rows.append((lineno, dict(zip(expected_header, row))))
    return rows
