"""Cut-off score (S-Score) and fuzzy score (FS-Score).

The S-Score counts how many model predictors strictly exceed their
cut-off. The FS-Score replaces each indicator with a linear membership
grade rising from 0 at ``a`` to 1 at ``b``, which makes the score
continuous on [0, 4].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .metrics import ErrorPair, _split
from .ratios import MODEL_PREDICTORS, PredictorVector


@dataclass(frozen=True)
class CutoffSpec:
    entries: tuple[tuple[str, float], ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple((str(f), float(c)) for f, c in self.entries))
        _check_predictor_set([f for f, _ in self.entries], "CutoffSpec")
        for f, c in self.entries:
            if math.isnan(c):
                raise ValueError(f"CutoffSpec: cut-off for {f} is NaN")

    def as_dict(self) -> dict[str, float]:
        return dict(self.entries)


@dataclass(frozen=True)
class FuzzySpec:
    entries: tuple[tuple[str, float, float], ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple((str(f), float(a), float(b)) for f, a, b in self.entries))
        _check_predictor_set([f for f, _, _ in self.entries], "FuzzySpec")
        for f, a, b in self.entries:
            if not (math.isfinite(a) and math.isfinite(b)) or a >= b:
                raise ValueError(f"FuzzySpec: need finite a < b for {f}, got a={a}, b={b}")

    def anchors(self, field: str) -> tuple[float, float]:
        for f, a, b in self.entries:
            if f == field:
                return a, b
        raise KeyError(field)

    def memberships(self, p: PredictorVector) -> list[float]:
        return [membership(_require(p, f), a, b) for f, a, b in self.entries]


def _check_predictor_set(names: Sequence[str], what: str) -> None:
    if sorted(names) != sorted(MODEL_PREDICTORS) or len(set(names)) != len(names):
        raise ValueError(f"{what} must list each of {', '.join(MODEL_PREDICTORS)} exactly once, got {list(names)}")


def _require(p: PredictorVector, field: str) -> float:
    x = p.get(field)
    if x is None:
        raise ValueError(f"predictor {field} is missing")
    if math.isnan(x):
        raise ValueError(f"predictor {field} is NaN")
    return x


PUBLISHED_CUTOFFS = CutoffSpec((
    ("ebit_to_interest", 2.0),
    ("ln_sales", 16.0),
    ("re_to_assets", 0.04),
    ("equity_to_tl", 0.5),
))

PUBLISHED_FUZZY = FuzzySpec((
    ("ebit_to_interest", 2.0, 7.0),
    ("ln_sales", 16.0, 18.0),
    ("re_to_assets", 0.04, 0.2),
    ("equity_to_tl", 0.5, 2.0),
))


def membership(x: float, a: float, b: float) -> float:
    """Linear membership grade: 0 below ``a``, 1 from ``b`` on.

    Evaluated about the midpoint so that ``membership((a + b) / 2, a, b)``
    is exactly 0.5 in floating point.
    """
    if not a < b:
        raise ValueError(f"membership needs a < b, got a={a}, b={b}")
    if math.isnan(x):
        raise ValueError("membership of NaN")
    if x < a:
        return 0.0
    if x >= b:
        return 1.0
    if x == a:
        return 0.0
    g = 0.5 + (x - (a + b) / 2) / (b - a)
    return min(max(g, 0.0), 1.0)


def s_score(p: PredictorVector, spec: CutoffSpec = PUBLISHED_CUTOFFS) -> int:
    return sum(1 for f, c in spec.entries if _require(p, f) > c)


def fs_score(p: PredictorVector, spec: FuzzySpec = PUBLISHED_FUZZY) -> float:
    return float(sum(spec.memberships(p)))


def fuzzify(vectors: Iterable[PredictorVector], spec: FuzzySpec = PUBLISHED_FUZZY) -> np.ndarray:
    """Membership matrix, one row per vector, columns in spec order."""
    return np.array([spec.memberships(p) for p in vectors], dtype=float).reshape(-1, len(spec.entries))


def cutoff_candidates(values) -> np.ndarray:
    """Thresholds worth testing for the rule value > c => GOOD.

    Midpoints between consecutive distinct values, plus one below the
    minimum and one above the maximum (half the neighbouring gap away, or
    0.5 when there is no finite neighbour). Where a neighbour is infinite
    the lower value itself serves as the threshold.
    """
    u = np.unique(np.asarray(values, dtype=float))
    if u.size == 0:
        raise ValueError("no values")
    cands = []
    if np.isfinite(u[0]):
        gap = u[1] - u[0] if u.size > 1 and np.isfinite(u[1]) else 1.0
        cands.append(u[0] - gap / 2)
    for lo, hi in zip(u[:-1], u[1:]):
        cands.append((lo + hi) / 2 if np.isfinite(lo) and np.isfinite(hi) else lo)
    if np.isfinite(u[-1]):
        gap = u[-1] - u[-2] if u.size > 1 and np.isfinite(u[-2]) else 1.0
        cands.append(u[-1] + gap / 2)
    else:
        cands.append(u[-1])
    return np.asarray(cands, dtype=float)


def best_cutoff(values, labels) -> tuple[float, ErrorPair]:
    """Cut-off minimising type I + type II error; ties go to the smallest cut-off."""
    bad, good = _split(values, labels)
    cands = cutoff_candidates(np.concatenate([bad, good]))
    bad_sorted, good_sorted = np.sort(bad), np.sort(good)
    missed = bad.size - np.searchsorted(bad_sorted, cands, side="right")
    alarms = np.searchsorted(good_sorted, cands, side="right")
    # total error scaled by n_bad * n_good, compared exactly in integers
    scaled = missed.astype(np.int64) * good.size + alarms.astype(np.int64) * bad.size
    best = int(np.flatnonzero(scaled == scaled.min()).min())
    return float(cands[best]), ErrorPair(int(missed[best]) / bad.size, int(alarms[best]) / good.size)


def fit_cutoffs(vectors: Sequence[PredictorVector], labels, fields: Sequence[str] = MODEL_PREDICTORS
                ) -> tuple[CutoffSpec, dict[str, ErrorPair]]:
    """Best cut-off for each model predictor, fitted independently."""
    entries, errors = [], {}
    for f in fields:
        c, err = best_cutoff([_require(p, f) for p in vectors], labels)
        entries.append((f, c))
        errors[f] = err
    return CutoffSpec(tuple(entries)), errors


def fuzzy_from_cutoffs(cutoffs: CutoffSpec, template: FuzzySpec = PUBLISHED_FUZZY) -> FuzzySpec:
    """Lower anchors from fitted cut-offs, upper anchors from ``template``.

    When a fitted cut-off reaches the template's upper anchor the template's
    width is kept instead.
    """
    entries = []
    for f, c in cutoffs.entries:
        ta, tb = template.anchors(f)
        if not math.isfinite(c):
            a, b = ta, tb
        else:
            a, b = c, (tb if c < tb else c + (tb - ta))
        entries.append((f, a, b))
    return FuzzySpec(tuple(entries))
