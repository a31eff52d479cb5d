"""Command-line front door for the full pipeline.

Subcommands mirror the pipeline stages: ``design``, ``pair``, ``simulate``,
``estimate``, ``risk``, ``compare``, ``reproduce``, and ``serve``. Data goes
to files (or stdout with ``--json``); diagnostics go to stderr. Exit codes:
0 success, 1 domain error, 2 usage error. Randomized stages require an
explicit ``--seed`` so runs are reproducible byte for byte.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import reference, report, storage
from .design import federov_select, full_factorial, make_pairs
from .errors import ConjointRiskError
from .estimate import estimate_table, estimate_to_dict, fit
from .risk import (
    AlphaModel,
    RiskScenario,
    UseCase,
    VerifierRates,
    c_identify,
    compare_use_cases,
)
from .schema import default_schema
from .simulate import TrueUtility, simulate_responses

OUTPUT_DIR_ENV = "CONJOINTRISK_DIR"


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except ConjointRiskError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="conjointrisk",
        description="design, run, and evaluate deterrence conjoint studies",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("design", help="select a determinant-optimal card design")
    _schema_arg(p)
    p.add_argument("--n", type=int, default=9, help="number of cards")
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", default=None, help="output CSV (default design.csv)")
    p.set_defaults(handler=cmd_design)

    p = sub.add_parser("pair", help="assemble randomized presentation pairs")
    _schema_arg(p)
    p.add_argument("--design", default=None, help="design CSV (default design.csv)")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", default=None, help="output CSV (default pairs.csv)")
    p.set_defaults(handler=cmd_pair)

    p = sub.add_parser("simulate", help="draw synthetic respondents")
    _schema_arg(p)
    p.add_argument("--design", default=None)
    p.add_argument("--pairs", default=None)
    p.add_argument("--respondents", type=int, default=600)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument(
        "--beta",
        default=None,
        help="JSON file mapping attribute to coefficient "
        "(default: shipped reference estimates)",
    )
    p.add_argument("--out", default=None, help="output CSV (default responses.csv)")
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("estimate", help="fit utilities from responses")
    _schema_arg(p)
    p.add_argument("--design", default=None)
    p.add_argument("--pairs", default=None)
    p.add_argument("--responses", default=None)
    p.add_argument("--out", default=None, help="output JSON (default estimate.json)")
    p.add_argument("--figure", default=None, help="coefficient plot PNG path")
    p.add_argument("--json", action="store_true", help="print the report as JSON")
    p.set_defaults(handler=cmd_estimate)

    p = sub.add_parser("risk", help="evaluate one deployment configuration")
    _schema_arg(p)
    p.add_argument(
        "--level",
        action="append",
        default=[],
        metavar="ATTR=INDEX",
        help="level index per attribute (repeatable); FAR level included",
    )
    p.add_argument("--far", type=float, required=True, help="verification FAR")
    p.add_argument("--frr", type=float, required=True, help="verification FRR")
    p.add_argument("--n", type=int, required=True, help="gallery size")
    p.add_argument("--c-open", type=float, default=0.5)
    p.add_argument("--c-close", type=float, default=0.5)
    _model_args(p)
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=cmd_risk)

    p = sub.add_parser("compare", help="risk grid across use cases and FAR levels")
    _schema_arg(p)
    p.add_argument("--frr", type=float, default=reference.PUBLISHED_FRR)
    p.add_argument("--n", type=int, default=reference.PUBLISHED_GALLERY_SIZE)
    p.add_argument(
        "--use-cases",
        default=None,
        help="JSON file: [{'name':..., 'levels': {...}}]; default shipped presets",
    )
    p.add_argument(
        "--reference-cell",
        default=None,
        metavar="USE_CASE:FAR_LABEL",
        help="flag cells strictly below this cell",
    )
    _model_args(p)
    p.add_argument("--out-prefix", default=None, help="default <dir>/risk_report")
    p.add_argument("--no-figure", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=cmd_compare)

    p = sub.add_parser(
        "reproduce", help="recompute the published grid and report deviations"
    )
    p.add_argument("--frr", type=float, default=reference.PUBLISHED_FRR)
    p.add_argument("--n", type=int, default=reference.PUBLISHED_GALLERY_SIZE)
    p.add_argument("--out-dir", default=None, help="where to write report files")
    p.add_argument("--no-figure", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(handler=cmd_reproduce)

    p = sub.add_parser("serve", help="run the survey + what-if HTTP service")
    p.add_argument("--state-dir", required=True, help="bundle directory for state")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument(
        "--use-reference",
        action="store_true",
        help="initialize the state dir with the shipped design and pairs",
    )
    p.add_argument("--ui-dir", default=None, help="static UI bundle to serve at /")
    p.set_defaults(handler=cmd_serve)

    return parser


def _schema_arg(p):
    p.add_argument(
        "--schema", default=None, help="schema JSON (default: shipped schema)"
    )


def _model_args(p):
    p.add_argument(
        "--alpha-model",
        choices=["coefficient_weighted", "unweighted"],
        default="coefficient_weighted",
    )
    p.add_argument(
        "--coefficients",
        default=None,
        help="JSON file mapping attribute to coefficient "
        "(default: shipped reference estimates)",
    )
    p.add_argument("--mode", choices=["exact", "approximate"], default="approximate")


def _out_dir(args) -> Path:
    base = os.environ.get(OUTPUT_DIR_ENV, ".")
    d = Path(base)
    d.mkdir(parents=True, exist_ok=True)
    return d


def _path(args, name: str, default: str) -> Path:
    value = getattr(args, name, None)
    return Path(value) if value else _out_dir(args) / default


def _load_schema(args):
    if args.schema:
        return storage.read_schema(args.schema)
    return default_schema()


def _load_model(args, schema) -> AlphaModel:
    if args.alpha_model == "unweighted":
        return AlphaModel.unweighted(schema)
    if args.coefficients:
        coefs = json.loads(Path(args.coefficients).read_text(encoding="utf-8"))
    else:
        coefs = reference.REFERENCE_COEFFICIENTS
    return AlphaModel.coefficient_weighted(coefs)


def cmd_design(args) -> int:
    schema = _load_schema(args)
    candidates = full_factorial(schema)
    design = federov_select(
        candidates, schema, n=args.n, restarts=args.restarts, seed=args.seed
    )
    out = _path(args, "out", storage.DESIGN_FILE)
    storage.write_design(design, schema, out)
    print(
        f"wrote {out} ({args.n} cards, det(X'X)={design.criterion_value:.6g})",
        file=sys.stderr,
    )
    return 0


def cmd_pair(args) -> int:
    schema = _load_schema(args)
    design = storage.read_design(_path(args, "design", storage.DESIGN_FILE), schema)
    plan = make_pairs(design, seed=args.seed)
    out = _path(args, "out", storage.PAIRS_FILE)
    storage.write_pairs(plan, out)
    print(f"wrote {out} ({len(plan.pairs)} pairs)", file=sys.stderr)
    return 0


def cmd_simulate(args) -> int:
    schema = _load_schema(args)
    design = storage.read_design(_path(args, "design", storage.DESIGN_FILE), schema)
    plan = storage.read_pairs(_path(args, "pairs", storage.PAIRS_FILE))
    if args.beta:
        beta = TrueUtility(json.loads(Path(args.beta).read_text(encoding="utf-8")))
    else:
        beta = TrueUtility(reference.REFERENCE_COEFFICIENTS)
    records = simulate_responses(
        plan, design, schema, beta, respondents=args.respondents, seed=args.seed
    )
    out = _path(args, "out", storage.RESPONSES_FILE)
    storage.write_responses(records, out)
    print(f"wrote {out} ({len(records)} records)", file=sys.stderr)
    return 0


def cmd_estimate(args) -> int:
    schema = _load_schema(args)
    design = storage.read_design(_path(args, "design", storage.DESIGN_FILE), schema)
    plan = storage.read_pairs(_path(args, "pairs", storage.PAIRS_FILE))
    records = storage.read_responses(_path(args, "responses", storage.RESPONSES_FILE))
    est = fit(records, plan, design, schema)
    out = _path(args, "out", storage.ESTIMATE_FILE)
    storage.write_estimate(est, out)
    if args.figure:
        from .plots import render_estimate

        render_estimate(est, args.figure)
    if args.json:
        print(json.dumps(estimate_to_dict(est), indent=2))
    else:
        print(estimate_table(est))
    return 0


def _parse_levels(pairs) -> dict[str, int]:
    levels = {}
    for entry in pairs:
        name, _, value = entry.partition("=")
        if not name or not value:
            raise ConjointRiskError(f"--level expects ATTR=INDEX, got {entry!r}")
        try:
            levels[name] = int(value)
        except ValueError:
            raise ConjointRiskError(
                f"--level index must be an integer, got {entry!r}"
            ) from None
    return levels


def cmd_risk(args) -> int:
    schema = _load_schema(args)
    model = _load_model(args, schema)
    scenario = RiskScenario(
        levels=_parse_levels(args.level),
        rates=VerifierRates(p_fa=args.far, p_fr=args.frr, n=args.n),
        c_open=args.c_open,
        c_close=args.c_close,
    )
    result = c_identify(scenario, model, schema, mode=args.mode)
    if args.json:
        print(json.dumps(result.to_dict(), indent=2))
    else:
        print(
            f"alpha={result.alpha:.6g} fpir_open={result.fpir_open:.6g} "
            f"fpir_close={result.fpir_close:.6g} c_identify={result.c_identify:.6g}"
        )
    return 0


def _parse_reference_cell(text):
    if text is None:
        return None
    use_case, _, far = text.partition(":")
    if not use_case or not far:
        raise ConjointRiskError(
            f"--reference-cell expects USE_CASE:FAR_LABEL, got {text!r}"
        )
    return (use_case, far)


def cmd_compare(args) -> int:
    schema = _load_schema(args)
    model = _load_model(args, schema)
    if args.use_cases:
        raw = json.loads(Path(args.use_cases).read_text(encoding="utf-8"))
        use_cases = [UseCase(u["name"], u["levels"]) for u in raw]
    else:
        use_cases = list(reference.USE_CASES)
    far_attr = schema.attribute("FAR")
    grid = compare_use_cases(
        use_cases=use_cases,
        far_levels=list(range(len(far_attr.levels))),
        frr=args.frr,
        n=args.n,
        model=model,
        schema=schema,
        mode=args.mode,
        reference=_parse_reference_cell(args.reference_cell),
    )
    prefix = (
        Path(args.out_prefix) if args.out_prefix else _out_dir(args) / "risk_report"
    )
    storage.write_risk_grid(
        grid, prefix.with_suffix(".json"), prefix.with_suffix(".csv")
    )
    written = [prefix.with_suffix(".json"), prefix.with_suffix(".csv")]
    if not args.no_figure:
        from .plots import render_risk_grid

        written.append(render_risk_grid(grid, prefix.with_suffix(".png")))
    if args.json:
        print(json.dumps(report.grid_to_dict(grid), indent=2))
    print("wrote " + ", ".join(str(w) for w in written), file=sys.stderr)
    return 0


def cmd_reproduce(args) -> int:
    rep = report.build_reproduction_report(frr=args.frr, n=args.n)
    out_dir = Path(args.out_dir) if args.out_dir else _out_dir(args)
    out_dir.mkdir(parents=True, exist_ok=True)
    text = report.render_report_text(rep)
    (out_dir / "reproduction_report.txt").write_text(text, encoding="utf-8")
    storage.write_risk_grid(
        rep.grid, out_dir / storage.RISK_JSON_FILE, out_dir / storage.RISK_CSV_FILE
    )
    if not args.no_figure:
        from .plots import render_risk_grid

        render_risk_grid(rep.grid, out_dir / "risk_report.png")
    if args.json:
        print(json.dumps(report.report_to_dict(rep), indent=2))
    else:
        print(text)
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import ServiceState, create_app

    state = ServiceState.open(
        args.state_dir, use_reference=args.use_reference
    )
    app = create_app(state, ui_dir=args.ui_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


if __name__ == "__main__":
    sys.exit(main())
