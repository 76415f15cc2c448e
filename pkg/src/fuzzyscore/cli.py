"""Command line: synth, ingest, label, analyze, fit, score, calibrate, report.

Data go to files (or standard output for ``score`` without ``--out``);
diagnostics go to standard error. Exit status is 0 unless a fatal error
occurred.
"""

from __future__ import annotations

import argparse
import csv
import datetime as dt
import hashlib
import io
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import calibration as cal
from . import modelfile
from .ingestion import (
    availability_date,
    format_number,
    label_cases,
    read_cases,
    read_defaults,
    read_ratings,
    read_statements,
    write_cases,
    write_defaults,
    write_ratings,
    write_statements,
)
from .logit import PUBLISHED_FUZZY_LOGIT
from .metrics import format_tsv
from .pipeline import (
    MODEL_LABELS,
    PUBLISHED_MODEL_GINI,
    PUBLISHED_PREDICTOR_GINI,
    PC_SHARE_THRESHOLD,
    SCORE_COLUMNS,
    analyze,
    calibrate,
    figure_bundle,
    fit_models,
    score_statements,
)
from .ratios import PREDICTOR_FIELDS, PREDICTOR_LABELS, compute_predictors
from .synthetic import generate_synthetic_dataset, synthetic_ratings

logger = logging.getLogger("fuzzyscore")


def _on_off(text: str) -> bool:
    value = text.strip().lower()
    if value in ("on", "true", "yes", "1"):
        return True
    if value in ("off", "false", "no", "0"):
        return False
    raise argparse.ArgumentTypeError(f"expected on|off, got {text!r}")


def _pct(x: Optional[float]) -> str:
    return "n/a" if x is None else f"{100 * x:.1f}%"


def _digest(paths: Sequence[Path]) -> str:
    h = hashlib.sha256()
    for p in paths:
        h.update(p.name.encode())
        h.update(b"\0")
        h.update(p.read_bytes())
    return h.hexdigest()


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_tsv(path: Path, header: Sequence[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _load_cases(args, annualize: bool):
    """Labeled cases from --cases, or built from --statements and --defaults."""
    if getattr(args, "cases", None):
        return read_cases(args.cases), None, None, [Path(args.cases)]
    if not (args.statements and args.defaults):
        raise SystemExit("error: give --cases, or both --statements and --defaults")
    statements = read_statements(args.statements)
    defaults = read_defaults(args.defaults)
    cases = label_cases(statements, defaults, annualize=annualize)
    return cases, statements, defaults, [Path(args.statements), Path(args.defaults)]


def _rating_table(args):
    return cal.load_rating_table(args.rating_table) if getattr(args, "rating_table", None) else None


# -- commands -------------------------------------------------------------------

def cmd_synth(args) -> int:
    out = _out_dir(args)
    statements, defaults = generate_synthetic_dataset(args.seed, args.n_companies, PUBLISHED_FUZZY_LOGIT)
    ratings = synthetic_ratings(args.seed, statements, PUBLISHED_FUZZY_LOGIT.fuzzy, coverage=args.coverage)
    write_statements(statements, out / "statements.csv")
    write_defaults(defaults, out / "defaults.csv")
    write_ratings(ratings, out / "ratings.csv")
    logger.info("synth: %d statements, %d default events, %d ratings -> %s",
                len(statements), len(defaults), len(ratings), out)
    return 0


def cmd_ingest(args) -> int:
    out = _out_dir(args)
    statements = read_statements(args.statements)
    header = ["company_id", "period_end", "period_type", "availability_date", "status"] + list(PREDICTOR_FIELDS)
    rows, excluded = [], 0
    for s in sorted(statements, key=lambda s: s.key):
        p = compute_predictors(s, annualize=args.annualize)
        status = "EXCLUDED" if p.missing() or not (s.assets and s.assets > 0 and s.sales and s.sales > 0) else "OK"
        excluded += status == "EXCLUDED"
        rows.append([s.company_id, s.period_end.isoformat(), s.period_type.value,
                     availability_date(s.period_end, s.period_type).isoformat(), status]
                    + [format_number(p.get(f)) for f in PREDICTOR_FIELDS])
    _write_tsv(out / "predictors.tsv", header, rows)
    if args.defaults:
        logger.info("ingest: %d default events parsed", len(read_defaults(args.defaults)))
    if args.ratings:
        table = _rating_table(args)
        ratings = read_ratings(args.ratings)
        for r in ratings:
            cal.reduce_external_rating(r.agency, r.grade, table)
        logger.info("ingest: %d ratings parsed", len(ratings))
    logger.info("ingest: %d statements, %d excluded for missing or degenerate inputs", len(statements), excluded)
    return 0


def cmd_label(args) -> int:
    out = _out_dir(args)
    cases, *_ = _load_cases(args, args.annualize)
    write_cases(cases, out / "cases.csv")
    n_bad = sum(c.is_bad for c in cases)
    logger.info("label: %d cases, %d BAD, %d companies", len(cases), n_bad, len({c.company_id for c in cases}))
    return 0


def cmd_analyze(args) -> int:
    out = _out_dir(args)
    cases, statements, defaults, _ = _load_cases(args, args.annualize)
    report = analyze(cases, statements, defaults)
    rows = []
    for r in report.power:
        setting = "" if r.annualize is None else ("on" if r.annualize else "off")
        rows.append([setting, r.variable, r.n_cases, r.n_bad, "" if r.gini is None else f"{r.gini:.10g}", r.note])
    _write_tsv(out / "predictor_power.tsv", ["annualize", "variable", "n_cases", "n_bad", "gini", "note"], rows)
    if report.corr is not None:
        _write_tsv(out / "correlation.tsv", ["variable"] + list(report.fields),
                   [[f] + [f"{x:.10g}" for x in row] for f, row in zip(report.fields, report.corr)])
    _write_tsv(out / "first_pc.tsv", ["first_pc_share", "threshold", "verdict"],
               [["" if report.first_pc_share is None else f"{report.first_pc_share:.10g}",
                 PC_SHARE_THRESHOLD, report.verdict]])

    lines = ["Predictive power (in-sample Gini AR)"]
    primary = [r for r in report.power if r.annualize in (None, args.annualize)]
    for r in sorted(primary, key=lambda r: -(r.gini if r.gini is not None else -9)):
        ref = PUBLISHED_PREDICTOR_GINI.get(r.variable)
        lines.append(f"  {PREDICTOR_LABELS[r.variable]:<34} {_pct(r.gini):>7}   n={r.n_cases:<6} "
                     f"published {_pct(ref) if ref is not None else '-':>6}  {r.note}".rstrip())
    if report.corr is not None:
        lines.append("Correlation matrix")
        for f, row in zip(report.fields, report.corr):
            lines.append(f"  {f:<18} " + " ".join(f"{x:8.4f}" for x in row))
        lines.append(f"First principal component: {_pct(report.first_pc_share)} of variance "
                     f"[{report.verdict}: threshold {_pct(PC_SHARE_THRESHOLD)}]")
    else:
        lines.append(f"Correlation matrix unavailable: {report.note}")
    print("\n".join(lines))
    return 0


def cmd_fit(args) -> int:
    out = _out_dir(args)
    cases, _, _, inputs = _load_cases(args, args.annualize)
    provenance = {
        "input_digest": _digest(inputs),
        "fit_timestamp": dt.datetime.now(dt.timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ"),
        "seed": args.seed,
    }
    model, report = fit_models(cases, args.use_paper_anchors, args.use_paper_coefficients,
                               annualize=args.annualize, provenance=provenance)
    modelfile.save(model, out / "model.json")
    _write_tsv(out / "cutoffs.tsv", ["predictor", "cutoff", "type1", "type2", "total", "published_cutoff"],
               [[r.predictor, f"{r.cutoff:.10g}", f"{r.type1:.10g}", f"{r.type2:.10g}", f"{r.total:.10g}",
                 f"{r.published_cutoff:.10g}"] for r in report.cutoffs])
    _write_tsv(out / "model_comparison.tsv", ["model", "gini", "published_gini"],
               [[name, f"{g:.10g}", PUBLISHED_MODEL_GINI[name]] for name, g in report.gini.items()])

    lines = ["Best cut-offs (score > cut-off => good)"]
    lines.append(f"  {'variable':<28}{'cut-off':>10}{'type I':>9}{'type II':>9}{'total':>8}{'published':>11}")
    for r in report.cutoffs:
        lines.append(f"  {PREDICTOR_LABELS[r.predictor]:<28}{r.cutoff:>10.4g}{_pct(r.type1):>9}"
                     f"{_pct(r.type2):>9}{_pct(r.total):>8}{r.published_cutoff:>11.4g}")
    t1, t2 = report.s_score_errors
    lines.append(f"  {'S-Score':<28}{report.s_score_cut:>10.4g}{_pct(t1):>9}{_pct(t2):>9}{_pct(t1 + t2):>8}")
    lines.append("In-sample Gini AR")
    for name, g in report.gini.items():
        lines.append(f"  {MODEL_LABELS[name]:<10} {_pct(g):>7}   published {_pct(PUBLISHED_MODEL_GINI[name])}")
    for label, m in (("Logit", model.logit_raw), ("Logit F", model.logit_fuzzy)):
        if m.fit is not None:
            lines.append(f"{label}: loglik {m.fit.log_likelihood:.4f}, {m.fit.iterations} iterations, "
                         f"|grad| {m.fit.gradient_norm:.2e}{', SEPARATED' if m.fit.separated else ''}")
    print("\n".join(lines))
    return 0


def _score_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SCORE_COLUMNS)
    for r in rows:
        w.writerow([r.company_id, r.period_end, r.period_type, r.status,
                    "" if r.s_score is None else r.s_score, format_number(r.fs_score),
                    format_number(r.pd_logit), format_number(r.pd_logit_f), r.grade or "", r.missing])
    return buf.getvalue()


def _model(args) -> modelfile.ModelFile:
    if args.model:
        return modelfile.load(args.model)
    logger.info("%s: no --model given; using the published operating model", args.command)
    return modelfile.published_model()


def cmd_score(args) -> int:
    model = _model(args)
    statements = read_statements(args.statements)
    annualize = model.annualize if args.annualize is None else args.annualize
    rows = score_statements(model, statements, annualize)
    text = _score_csv(rows)
    if args.out:
        (_out_dir(args) / "scores.csv").write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    logger.info("score: %d rows, %d excluded", len(rows), sum(r.status == "EXCLUDED" for r in rows))
    return 0


def cmd_calibrate(args) -> int:
    out = _out_dir(args)
    model = _model(args)
    cases, *_ = _load_cases(args, model.annualize)
    report = calibrate(model, cases, read_ratings(args.ratings), _rating_table(args))
    rows = []
    for grade in cal.STAT_GRADES:
        s = report.stats.get(grade)
        ref = cal.PUBLISHED_GRADE_STATISTICS[grade]
        if s is None:
            rows.append([grade, 0, "", "", ""] + list(ref))
        else:
            rows.append([grade, s.n, f"{s.p25:.10g}", f"{s.median:.10g}", f"{s.p75:.10g}"] + list(ref))
    _write_tsv(out / "grade_statistics.tsv",
               ["grade", "n", "p25", "median", "p75", "published_p25", "published_median", "published_p75"], rows)
    scale_rows = [["published", b.grade, f"{b.left:.10g}", f"{b.center:.10g}", f"{b.right:.10g}"]
                  for b in cal.PUBLISHED_RATING_SPEC.buckets]
    if report.derived is not None:
        scale_rows += [["derived", b.grade, f"{b.left:.10g}", f"{b.center:.10g}", f"{b.right:.10g}"]
                       for b in report.derived.buckets]
    _write_tsv(out / "internal_scale.tsv", ["source", "grade", "left", "center", "right"], scale_rows)

    lines = [f"{'grade':<10}{'n':>6}{'p25':>8}{'median':>8}{'p75':>8}   published"]
    for row in rows:
        grade, n, p25, med, p75 = row[:5]
        fmt = (lambda v: f"{float(v):8.2f}" if v != "" else f"{'-':>8}")
        lines.append(f"{grade:<10}{n:>6}{fmt(p25)}{fmt(med)}{fmt(p75)}   {row[5]}/{row[6]}/{row[7]}")
    if report.derived is not None:
        lines.append("Derived internal boundaries: " + ", ".join(f"{x:.4g}" for x in report.derived.boundaries))
    else:
        logger.warning("calibrate: %s", report.note)
    print("\n".join(lines))
    return 0


def cmd_report(args) -> int:
    out = _out_dir(args)
    model = _model(args)
    cases, *_ = _load_cases(args, model.annualize)
    ratings = None
    if args.ratings:
        ratings = read_ratings(args.ratings)
    else:
        logger.warning("report: no ratings file; fig7 skipped")
    bundle = figure_bundle(model, cases, ratings, _rating_table(args))
    for name, pairs in bundle.items():
        (out / name).write_text(format_tsv(pairs), encoding="utf-8")
    logger.info("report: %d files -> %s", len(bundle), out)
    return 0


# -- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fuzzyscore", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, *flags, annualize_default=True):
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        if "statements" in flags:
            p.add_argument("--statements", type=Path, help="statements.csv")
        if "defaults" in flags:
            p.add_argument("--defaults", type=Path, help="defaults.csv")
        if "cases" in flags:
            p.add_argument("--cases", type=Path, help="labeled cases.csv (instead of --statements/--defaults)")
        if "ratings" in flags:
            p.add_argument("--ratings", type=Path, help="ratings.csv")
            p.add_argument("--rating-table", type=Path, help="override CSV: agency,raw,grade")
        if "model" in flags:
            p.add_argument("--model", type=Path, help="model.json (default: the published operating model)")
        if "annualize" in flags:
            p.add_argument("--annualize", type=_on_off, default=annualize_default, metavar="on|off",
                           help="scale YTD sales by 4/q")
        p.add_argument("--out", type=Path, required=name != "score", help="output directory")
        p.add_argument("--seed", type=int, default=42)
        return p

    p = add("synth", cmd_synth, "write a seeded synthetic dataset")
    p.add_argument("--n-companies", type=int, default=500)
    p.add_argument("--coverage", type=float, default=0.3, help="share of companies with a rating")
    add("ingest", cmd_ingest, "validate inputs and compute ratios", "statements", "defaults", "ratings", "annualize")
    add("label", cmd_label, "label cases GOOD/BAD", "statements", "defaults", "annualize")
    add("analyze", cmd_analyze, "predictor power, correlations, first-PC share",
        "statements", "defaults", "cases", "annualize")
    p = add("fit", cmd_fit, "estimate cut-offs and logits; write model.json",
            "statements", "defaults", "cases", "annualize")
    p.add_argument("--use-paper-anchors", action="store_true", help="published cut-offs and fuzzy anchors")
    p.add_argument("--use-paper-coefficients", action="store_true", help="published logit coefficients")
    add("score", cmd_score, "score statements with a model", "statements", "model", "annualize",
        annualize_default=None)
    add("calibrate", cmd_calibrate, "FS-Score statistics per external grade",
        "statements", "defaults", "cases", "ratings", "model")
    add("report", cmd_report, "write figure data TSVs", "statements", "defaults", "cases", "ratings", "model")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    if args.command in ("score", "ingest") and args.statements is None:
        logger.error("%s needs --statements", args.command)
        return 2
    if args.command == "calibrate" and args.ratings is None:
        logger.error("calibrate needs --ratings")
        return 2
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        logger.error("%s: %s", args.command, exc)
        return 1


if __name__ == "__main__":
    sys.exit(main())
