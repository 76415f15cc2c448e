"""JSON model file holding every fitted or published component.

Numbers are written as decimal strings with 17 significant digits, which
round-trips any double exactly (including ``inf`` for an unbounded top
rating bucket).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

from .calibration import PUBLISHED_RATING_SPEC, Bucket, InternalRatingSpec
from .logit import PUBLISHED_FUZZY_LOGIT, PUBLISHED_RAW_LOGIT, FitInfo, LogitModel, Space
from .scoring import PUBLISHED_CUTOFFS, PUBLISHED_FUZZY, CutoffSpec, FuzzySpec

VERSION = "fuzzyscore-model/1"


def _num(x: float) -> str:
    return format(float(x), ".17g")


@dataclass(frozen=True)
class ModelFile:
    cutoffs: CutoffSpec
    fuzzy: FuzzySpec
    logit_raw: LogitModel
    logit_fuzzy: LogitModel
    rating: InternalRatingSpec
    annualize: bool = True
    # input_digest, fit_timestamp, seed, and free-form notes
    provenance: dict = field(default_factory=dict)
    in_sample_gini: dict = field(default_factory=dict)
    version: str = VERSION

    def __post_init__(self):
        if self.version != VERSION:
            raise ValueError(f"unsupported model file version {self.version!r}")
        if Space(self.logit_raw.space) is not Space.RAW:
            raise ValueError("logit_raw must be a RAW-space model")
        if Space(self.logit_fuzzy.space) is not Space.FUZZY:
            raise ValueError("logit_fuzzy must be a FUZZY-space model")


def published_model() -> ModelFile:
    """The published operating model: cut-offs, anchors, both logits, rating table."""
    return ModelFile(PUBLISHED_CUTOFFS, PUBLISHED_FUZZY, PUBLISHED_RAW_LOGIT, PUBLISHED_FUZZY_LOGIT,
                     PUBLISHED_RATING_SPEC, provenance={"source": "published"})


# -- serialise ----------------------------------------------------------------

def _fuzzy_doc(spec: FuzzySpec) -> list:
    return [{"predictor": f, "a": _num(a), "b": _num(b)} for f, a, b in spec.entries]


def _fit_doc(info: Optional[FitInfo]) -> Optional[dict]:
    if info is None:
        return None
    return {
        "log_likelihood": _num(info.log_likelihood),
        "iterations": info.iterations,
        "gradient_norm": _num(info.gradient_norm),
        "converged": info.converged,
        "separated": info.separated,
        "n_cases": info.n_cases,
        "n_bad": info.n_bad,
    }


def _logit_doc(m: LogitModel) -> dict:
    doc: dict[str, Any] = {
        "space": m.space.value,
        "intercept": _num(m.intercept),
        "coefficients": [{"predictor": f, "b": _num(b)} for f, b in m.coefficients],
    }
    if m.fuzzy is not None:
        doc["fuzzy"] = _fuzzy_doc(m.fuzzy)
    doc["fit"] = _fit_doc(m.fit)
    return doc


def to_document(model: ModelFile) -> dict:
    return {
        "version": model.version,
        "annualize": model.annualize,
        "cutoffs": [{"predictor": f, "c": _num(c)} for f, c in model.cutoffs.entries],
        "fuzzy": _fuzzy_doc(model.fuzzy),
        "logit_raw": _logit_doc(model.logit_raw),
        "logit_fuzzy": _logit_doc(model.logit_fuzzy),
        "rating": [
            {"grade": b.grade, "left": _num(b.left), "center": _num(b.center), "right": _num(b.right)}
            for b in model.rating.buckets
        ],
        "in_sample_gini": {k: _num(v) for k, v in model.in_sample_gini.items()},
        "provenance": dict(model.provenance),
    }


def dumps(model: ModelFile) -> str:
    return json.dumps(to_document(model), indent=2) + "\n"


def save(model: ModelFile, path: str | Path) -> None:
    Path(path).write_text(dumps(model), encoding="utf-8")


# -- parse --------------------------------------------------------------------

def _fuzzy_from(doc) -> FuzzySpec:
    return FuzzySpec(tuple((e["predictor"], float(e["a"]), float(e["b"])) for e in doc))


def _fit_from(doc) -> Optional[FitInfo]:
    if doc is None:
        return None
    return FitInfo(float(doc["log_likelihood"]), int(doc["iterations"]), float(doc["gradient_norm"]),
                   bool(doc["converged"]), bool(doc["separated"]), int(doc["n_cases"]), int(doc["n_bad"]))


def _logit_from(doc) -> LogitModel:
    fuzzy = _fuzzy_from(doc["fuzzy"]) if "fuzzy" in doc else None
    return LogitModel(Space(doc["space"]), float(doc["intercept"]),
                      tuple((e["predictor"], float(e["b"])) for e in doc["coefficients"]),
                      fuzzy=fuzzy, fit=_fit_from(doc.get("fit")))


def from_document(doc: dict) -> ModelFile:
    if not isinstance(doc, dict) or "version" not in doc:
        raise ValueError("not a model file: version tag missing")
    if doc["version"] != VERSION:
        raise ValueError(f"unsupported model file version {doc['version']!r}")
    try:
        return ModelFile(
            cutoffs=CutoffSpec(tuple((e["predictor"], float(e["c"])) for e in doc["cutoffs"])),
            fuzzy=_fuzzy_from(doc["fuzzy"]),
            logit_raw=_logit_from(doc["logit_raw"]),
            logit_fuzzy=_logit_from(doc["logit_fuzzy"]),
            rating=InternalRatingSpec(tuple(
                Bucket(e["grade"], float(e["left"]), float(e["center"]), float(e["right"])) for e in doc["rating"]
            )),
            annualize=bool(doc.get("annualize", True)),
            provenance=dict(doc.get("provenance", {})),
            in_sample_gini={k: float(v) for k, v in doc.get("in_sample_gini", {}).items()},
            version=doc["version"],
        )
    except KeyError as exc:
        raise ValueError(f"model file is missing field {exc}") from None


def loads(text: str) -> ModelFile:
    return from_document(json.loads(text))


def load(path: str | Path) -> ModelFile:
    return loads(Path(path).read_text(encoding="utf-8"))
