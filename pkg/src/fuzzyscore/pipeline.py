"""Analyze, fit, score, calibrate and report steps over in-memory data.

The CLI is a thin file-handling layer over these functions.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import calibration as cal
from .ingestion import DefaultEvent, LabeledCase, _usable, label_cases
from .logit import PUBLISHED_FUZZY_LOGIT, PUBLISHED_RAW_LOGIT, Space, fit_logit, logit_predict
from .metrics import (
    UndefinedMetricError,
    correlation_matrix,
    empirical_cdf,
    first_pc_variance_share,
    gini_ar,
    roc_curve,
)
from .modelfile import ModelFile
from .ratios import MODEL_PREDICTORS, PREDICTOR_FIELDS, compute_predictors
from .scoring import (
    PUBLISHED_CUTOFFS,
    PUBLISHED_FUZZY,
    best_cutoff,
    fit_cutoffs,
    fs_score,
    fuzzy_from_cutoffs,
    membership,
    s_score,
)
from .statements import FinancialStatement

logger = logging.getLogger(__name__)

MODEL_NAMES = ("s_score", "fs_score", "logit", "logit_f")
MODEL_LABELS = {"s_score": "S-Score", "fs_score": "FS-Score", "logit": "Logit", "logit_f": "Logit F"}
PUBLISHED_MODEL_GINI = {"s_score": 0.718, "fs_score": 0.727, "logit": 0.705, "logit_f": 0.729}
PUBLISHED_PREDICTOR_GINI = {
    "equity_to_tl": 0.578,
    "ebit_to_interest": 0.558,
    "ln_sales": 0.543,
    "re_to_assets": 0.523,
    "ebit_to_assets": 0.396,
    "sales_to_assets": 0.233,
    "ebit_to_sales": 0.106,
    "z_em": -0.077,
}
PC_SHARE_THRESHOLD = 0.5


# -- analyze ------------------------------------------------------------------

@dataclass
class PowerRow:
    annualize: Optional[bool]
    variable: str
    n_cases: int
    n_bad: int
    gini: Optional[float]
    note: str = ""


@dataclass
class AnalyzeReport:
    power: list[PowerRow]
    fields: tuple[str, ...]
    corr: Optional[np.ndarray]
    first_pc_share: Optional[float]
    note: str = ""

    @property
    def verdict(self) -> str:
        if self.first_pc_share is None:
            return "N/A"
        return "PASS" if self.first_pc_share < PC_SHARE_THRESHOLD else "WARN"


def predictor_power(cases: Sequence[LabeledCase], annualize: Optional[bool] = None) -> list[PowerRow]:
    rows = []
    for f in PREDICTOR_FIELDS:
        pairs = [(c.predictors.get(f), c.is_bad) for c in cases if c.predictors.get(f) is not None]
        n_bad = sum(b for _, b in pairs)
        try:
            g, note = gini_ar([x for x, _ in pairs], [b for _, b in pairs]), ""
        except UndefinedMetricError as exc:
            g, note = None, str(exc)
        rows.append(PowerRow(annualize, f, len(pairs), n_bad, g, note))
    return rows


def analyze(cases: Sequence[LabeledCase], statements: Optional[Sequence[FinancialStatement]] = None,
            defaults: Optional[Sequence[DefaultEvent]] = None, fields: Sequence[str] = MODEL_PREDICTORS
            ) -> AnalyzeReport:
    """Per-variable Gini, correlation of the model predictors, first-PC share.

    When statements and defaults are supplied the Gini table is produced
    under both sales conventions (annualised and year-to-date).
    """
    if statements is not None and defaults is not None:
        power = []
        for ann in (True, False):
            power += predictor_power(label_cases(statements, defaults, annualize=ann), ann)
    else:
        power = predictor_power(cases)
    corr, share, note = None, None, ""
    try:
        corr = correlation_matrix([c.predictors for c in cases], fields)
        share = first_pc_variance_share(corr)
    except UndefinedMetricError as exc:
        note = str(exc)
    return AnalyzeReport(power, tuple(fields), corr, share, note)


# -- model scores ---------------------------------------------------------------

def case_scores(model: ModelFile, cases: Sequence[LabeledCase]) -> dict[str, tuple[list[float], list[bool]]]:
    """Scores oriented so that higher means safer, with BAD flags, per model.

    The logit scores are negated PDs. A RAW logit cannot score a case with
    an infinite ratio; such cases are left out of that model only.
    """
    out = {}
    labels = [c.is_bad for c in cases]
    out["s_score"] = ([float(s_score(c.predictors, model.cutoffs)) for c in cases], labels)
    out["fs_score"] = ([fs_score(c.predictors, model.fuzzy) for c in cases], labels)
    raw_scores, raw_labels = [], []
    for c in cases:
        if all(math.isfinite(c.predictors.get(f)) for f in model.logit_raw.fields):
            raw_scores.append(-logit_predict(model.logit_raw, c.predictors))
            raw_labels.append(c.is_bad)
    out["logit"] = (raw_scores, raw_labels)
    out["logit_f"] = ([-logit_predict(model.logit_fuzzy, c.predictors) for c in cases], labels)
    return out


def model_ginis(model: ModelFile, cases: Sequence[LabeledCase]) -> dict[str, float]:
    return {name: gini_ar(s, y) for name, (s, y) in case_scores(model, cases).items()}


# -- fit ------------------------------------------------------------------------

@dataclass
class CutoffRow:
    predictor: str
    cutoff: float
    type1: float
    type2: float
    published_cutoff: float

    @property
    def total(self) -> float:
        return self.type1 + self.type2


@dataclass
class FitReport:
    cutoffs: list[CutoffRow]
    s_score_errors: tuple[float, float]
    s_score_cut: float
    gini: dict[str, float] = field(default_factory=dict)


def fit_models(cases: Sequence[LabeledCase], use_paper_anchors: bool = False,
               use_paper_coefficients: bool = False, annualize: bool = True,
               provenance: Optional[dict] = None) -> tuple[ModelFile, FitReport]:
    """Estimate every component on ``cases`` and compare in-sample Gini.

    Cut-offs are always estimated and reported. They drive the S-Score and
    the fuzzy lower anchors unless ``use_paper_anchors`` pins both to the
    published table. ``use_paper_coefficients`` embeds both published
    logits unchanged (the fuzzy one keeps the anchors it was estimated
    with) instead of refitting.
    """
    vectors = [c.predictors for c in cases]
    labels = [c.is_bad for c in cases]
    fitted, errors = fit_cutoffs(vectors, labels)
    published_c = PUBLISHED_CUTOFFS.as_dict()
    rows = [CutoffRow(f, c, errors[f].type1, errors[f].type2, published_c[f]) for f, c in fitted.entries]

    if use_paper_anchors:
        cutoffs, fuzzy = PUBLISHED_CUTOFFS, PUBLISHED_FUZZY
    else:
        cutoffs, fuzzy = fitted, fuzzy_from_cutoffs(fitted, PUBLISHED_FUZZY)

    # the S-Score itself is cut like a single predictor
    s_cut, s_err = best_cutoff([float(s_score(p, cutoffs)) for p in vectors], labels)

    if use_paper_coefficients:
        raw, fz = PUBLISHED_RAW_LOGIT, PUBLISHED_FUZZY_LOGIT
    else:
        raw = fit_logit(cases, Space.RAW)
        fz = fit_logit(cases, Space.FUZZY, fuzzy=fuzzy)

    model = ModelFile(cutoffs, fuzzy, raw, fz, cal.PUBLISHED_RATING_SPEC, annualize=annualize,
                      provenance=dict(provenance or {}))
    ginis = model_ginis(model, cases)
    model = ModelFile(cutoffs, fuzzy, raw, fz, cal.PUBLISHED_RATING_SPEC, annualize=annualize,
                      provenance=dict(provenance or {}), in_sample_gini=ginis)
    return model, FitReport(rows, (s_err.type1, s_err.type2), s_cut, ginis)


# -- score ----------------------------------------------------------------------

SCORE_COLUMNS = ("company_id", "period_end", "period_type", "status", "s_score", "fs_score",
                 "pd_logit", "pd_logit_f", "grade", "missing")


@dataclass
class ScoreRow:
    company_id: str
    period_end: str
    period_type: str
    status: str
    s_score: Optional[int] = None
    fs_score: Optional[float] = None
    pd_logit: Optional[float] = None
    pd_logit_f: Optional[float] = None
    grade: Optional[str] = None
    missing: str = ""


def score_statements(model: ModelFile, statements: Sequence[FinancialStatement],
                     annualize: Optional[bool] = None) -> list[ScoreRow]:
    """Score every statement; unusable ones come back with status EXCLUDED."""
    annualize = model.annualize if annualize is None else annualize
    rows = []
    for stmt in sorted(statements, key=lambda s: s.key):
        p = compute_predictors(stmt, annualize=annualize)
        base = (stmt.company_id, stmt.period_end.isoformat(), stmt.period_type.value)
        if not _usable(stmt, p):
            missing = p.missing()
            for f, v in (("assets", stmt.assets), ("sales", stmt.sales)):
                if v is None or v <= 0:
                    missing.append(f)
            rows.append(ScoreRow(*base, status="EXCLUDED", missing=";".join(dict.fromkeys(missing))))
            continue
        fs = fs_score(p, model.fuzzy)
        raw_ok = all(math.isfinite(p.get(f)) for f in model.logit_raw.fields)
        rows.append(ScoreRow(
            *base, status="OK",
            s_score=s_score(p, model.cutoffs),
            fs_score=fs,
            pd_logit=logit_predict(model.logit_raw, p) if raw_ok else None,
            pd_logit_f=logit_predict(model.logit_fuzzy, p),
            grade=cal.map_fs_to_grade(fs, model.rating),
        ))
    return rows


# -- calibrate ------------------------------------------------------------------

@dataclass
class CalibrationReport:
    stats: dict[str, cal.GradeStats]
    derived: Optional[cal.InternalRatingSpec]
    note: str = ""


def internal_centers(groups: dict[str, Sequence[float]]) -> list[tuple[str, float]]:
    """Bucket centers from observed medians, with A and BBB pooled into fsBBB."""
    centers = []
    top = list(groups.get("A", [])) + list(groups.get("BBB", []))
    if top:
        centers.append(("fsBBB", float(np.median(top))))
    for grade, name in (("BB", "fsBB"), ("B", "fsB"), ("CCC/C", "fsCCC/C"), (cal.DEFAULTED, "fsD")):
        if groups.get(grade):
            centers.append((name, float(np.median(groups[grade]))))
    return centers


def calibrate(model: ModelFile, cases: Sequence[LabeledCase], ratings, table=None) -> CalibrationReport:
    fs = [fs_score(c.predictors, model.fuzzy) for c in cases]
    groups = cal.fs_by_grade(cases, fs, ratings, table)
    stats = cal.grade_statistics(groups)
    derived, note = None, ""
    try:
        derived = cal.derive_cutoffs(internal_centers(groups))
    except ValueError as exc:
        note = f"no derived scale: {exc}"
    return CalibrationReport(stats, derived, note)


# -- report ---------------------------------------------------------------------

def _safe(name: str) -> str:
    return name.replace("/", "-")


def membership_grid(a: float, b: float, lo: float, hi: float, n: int = 201) -> list[tuple[float, float]]:
    """Membership over [lo, hi] on a grid that contains a and b exactly."""
    lo, hi = min(lo, a - (b - a)), max(hi, b + (b - a))
    xs = np.unique(np.concatenate([np.linspace(lo, hi, n), [a, b]]))
    return [(float(x), membership(float(x), a, b)) for x in xs]


def figure_bundle(model: ModelFile, cases: Sequence[LabeledCase], ratings=None, table=None
                  ) -> dict[str, list[tuple[float, float]]]:
    """Figure data keyed by output file name.

    fig1: ROC per model predictor. fig3: predictor ECDFs. fig4: conditional
    CDFs (good/bad) and membership overlays. fig5: model score ECDFs.
    fig6: ROC per model. fig7: FS-Score ECDF per external grade, only when
    ratings are given.
    """
    out: dict[str, list[tuple[float, float]]] = {}
    labels = [c.is_bad for c in cases]
    for f in MODEL_PREDICTORS:
        values = [c.predictors.get(f) for c in cases]
        out[f"fig1_roc_{f}.tsv"] = roc_curve(values, labels).points
        out[f"fig3_ecdf_{f}.tsv"] = empirical_cdf(values)
        good = [v for v, bad in zip(values, labels) if not bad]
        bad = [v for v, b in zip(values, labels) if b]
        out[f"fig4_cdf_{f}_good.tsv"] = empirical_cdf(good)
        out[f"fig4_cdf_{f}_bad.tsv"] = empirical_cdf(bad)
        finite = [v for v in values if math.isfinite(v)]
        a, b = model.fuzzy.anchors(f)
        lo, hi = (np.percentile(finite, [1, 99]) if finite else (a, b))
        out[f"fig4_membership_{f}.tsv"] = membership_grid(a, b, float(lo), float(hi))
    for name, (scores, y) in case_scores(model, cases).items():
        if name.startswith("logit"):
            # distribution of the PD itself, not the negated score
            out[f"fig5_ecdf_{name}.tsv"] = empirical_cdf([-s for s in scores])
        else:
            out[f"fig5_ecdf_{name}.tsv"] = empirical_cdf(scores)
        out[f"fig6_roc_{name}.tsv"] = roc_curve(scores, y).points
    if ratings is not None:
        fs = [fs_score(c.predictors, model.fuzzy) for c in cases]
        for grade, values in cal.fs_by_grade(cases, fs, ratings, table).items():
            out[f"fig7_ecdf_{_safe(grade)}.tsv"] = empirical_cdf(values)
    return out
