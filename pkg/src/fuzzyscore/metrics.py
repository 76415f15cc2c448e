"""Discrimination and dependence measures.

Orientation is fixed throughout: scores grow with creditworthiness and BAD
is the positive class. A case is classified GOOD when ``score > cutoff``.
Type I error is the share of BAD cases classified GOOD (missed defaults),
type II the share of GOOD cases classified BAD (false alarms).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class UndefinedMetricError(ValueError):
    """The metric has no value for this input (e.g. only one class)."""


@dataclass(frozen=True)
class ErrorPair:
    type1: float
    type2: float

    @property
    def total(self) -> float:
        return self.type1 + self.type2


@dataclass(frozen=True)
class RocCurve:
    """(false positive rate, true positive rate) pairs from (0, 0) to (1, 1)."""

    fpr: tuple[float, ...]
    tpr: tuple[float, ...]

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.fpr, self.tpr))

    def auc(self) -> float:
        f, t = np.asarray(self.fpr), np.asarray(self.tpr)
        return float(np.sum(np.diff(f) * (t[1:] + t[:-1]) / 2.0))


def _split(scores, labels) -> tuple[np.ndarray, np.ndarray]:
    """Return (bad scores, good scores). ``labels`` is truthy for BAD."""
    s = np.asarray(scores, dtype=float)
    bad = np.asarray([_is_bad(l) for l in labels], dtype=bool)
    if s.shape != bad.shape or s.ndim != 1:
        raise ValueError(f"scores and labels must be equal-length 1-D sequences ({s.shape} vs {bad.shape})")
    if np.isnan(s).any():
        raise ValueError("scores contain NaN")
    if bad.all() or not bad.any():
        raise UndefinedMetricError("need at least one GOOD and one BAD case")
    return s[bad], s[~bad]


def _is_bad(label) -> bool:
    value = getattr(label, "value", label)
    if isinstance(value, str):
        if value.upper() not in ("BAD", "GOOD"):
            raise ValueError(f"unknown label {label!r}")
        return value.upper() == "BAD"
    return bool(value)


def _roc_counts(bad: np.ndarray, good: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cumulative (good, bad) counts with score <= t, one step per distinct score."""
    thresholds = np.unique(np.concatenate([bad, good]))
    bad_sorted, good_sorted = np.sort(bad), np.sort(good)
    cum_bad = np.searchsorted(bad_sorted, thresholds, side="right")
    cum_good = np.searchsorted(good_sorted, thresholds, side="right")
    return np.concatenate([[0], cum_good]), np.concatenate([[0], cum_bad])


def roc_curve(scores, labels) -> RocCurve:
    """ROC of the rule "score <= t means BAD", swept upward over distinct scores.

    Equal scores share one step, so ties appear as diagonal segments.
    """
    bad, good = _split(scores, labels)
    g, b = _roc_counts(bad, good)
    return RocCurve(tuple((g / good.size).tolist()), tuple((b / bad.size).tolist()))


def _doubled_wins_trapezoid(bad: np.ndarray, good: np.ndarray) -> int:
    """Twice the ROC area in units of 1 / (n_good * n_bad), from integer counts."""
    g, b = _roc_counts(bad, good)
    return int(np.sum(np.diff(g) * (b[1:] + b[:-1])))


def _doubled_wins_pairwise(bad: np.ndarray, good: np.ndarray) -> int:
    """2 * #(bad < good) + #(bad == good) over all bad x good pairs."""
    less = int(np.count_nonzero(bad[:, None] < good[None, :]))
    ties = int(np.count_nonzero(bad[:, None] == good[None, :]))
    return 2 * less + ties


_METHODS = {"trapezoid": _doubled_wins_trapezoid, "pairwise": _doubled_wins_pairwise}


def _doubled_wins(scores, labels, method: str) -> tuple[int, int]:
    if method not in _METHODS:
        raise ValueError(f"unknown method {method!r}")
    bad, good = _split(scores, labels)
    return _METHODS[method](bad, good), bad.size * good.size


def auc_trapezoid(scores, labels) -> float:
    doubled, pairs = _doubled_wins(scores, labels, "trapezoid")
    return doubled / (2 * pairs)


def auc_pairwise(scores, labels) -> float:
    """P(bad score < good score) + P(tie)/2 by enumerating all bad x good pairs."""
    doubled, pairs = _doubled_wins(scores, labels, "pairwise")
    return doubled / (2 * pairs)


def gini_ar(scores, labels, method: str = "trapezoid") -> float:
    """Gini accuracy ratio 2*AUC - 1 in [-1, 1].

    Computed as one integer ratio, so the result is the exact value rounded
    once; in particular both methods agree bit for bit.
    """
    doubled, pairs = _doubled_wins(scores, labels, method)
    return (doubled - pairs) / pairs


def classification_counts(scores, labels, cutoff: float) -> tuple[int, int, int, int]:
    """(missed BAD, n BAD, false-alarm GOOD, n GOOD) for the rule score > cutoff => GOOD."""
    bad, good = _split(scores, labels)
    return (int(np.count_nonzero(bad > cutoff)), bad.size,
            int(np.count_nonzero(good <= cutoff)), good.size)


def classification_errors(scores, labels, cutoff: float) -> ErrorPair:
    missed, n_bad, alarms, n_good = classification_counts(scores, labels, cutoff)
    return ErrorPair(missed / n_bad, alarms / n_good)


def correlation_matrix(vectors: Iterable, fields: Sequence[str]) -> np.ndarray:
    """Pearson correlation of the named predictor fields over complete cases.

    A case is complete when every named field is present and finite.
    """
    fields = list(fields)
    rows = []
    for v in vectors:
        vals = [v.get(f) if hasattr(v, "get") else getattr(v, f) for f in fields]
        if all(x is not None and np.isfinite(x) for x in vals):
            rows.append(vals)
    if len(rows) < 3:
        raise UndefinedMetricError(f"need at least 3 complete cases, got {len(rows)}")
    return pearson_matrix(np.asarray(rows, dtype=float), fields)


def pearson_matrix(data: np.ndarray, names: Sequence[str] | None = None) -> np.ndarray:
    data = np.asarray(data, dtype=float)
    names = list(names) if names is not None else [f"column {j}" for j in range(data.shape[1])]
    centered = data - data.mean(axis=0)
    ss = np.einsum("ij,ij->j", centered, centered)
    for j, name in enumerate(names):
        if ss[j] == 0.0:
            raise UndefinedMetricError(f"field {name!r} has zero variance")
    corr = (centered.T @ centered) / np.sqrt(np.outer(ss, ss))
    corr = (corr + corr.T) / 2.0
    np.fill_diagonal(corr, 1.0)
    return np.clip(corr, -1.0, 1.0)


def first_pc_variance_share(corr, tol: float = 1e-9) -> float:
    """Largest eigenvalue over trace: variance share of the first principal component."""
    c = np.asarray(corr, dtype=float)
    if c.ndim != 2 or c.shape[0] != c.shape[1] or c.shape[0] == 0:
        raise ValueError(f"expected a non-empty square matrix, got shape {c.shape}")
    if not np.allclose(c, c.T, rtol=0.0, atol=tol):
        raise ValueError("matrix is not symmetric")
    eig = np.linalg.eigvalsh(c)
    if eig[0] < -tol:
        raise ValueError(f"matrix is not positive semi-definite (min eigenvalue {eig[0]:.3g})")
    return float(eig[-1] / np.trace(c))


def empirical_cdf(values) -> list[tuple[float, float]]:
    """Right-continuous ECDF as (x, F(x)) at each distinct value."""
    v = np.sort(np.asarray(values, dtype=float))
    if v.size == 0:
        raise ValueError("empirical_cdf of an empty sample")
    if np.isnan(v).any():
        raise ValueError("values contain NaN")
    xs = np.unique(v)
    counts = np.searchsorted(v, xs, side="right")
    return list(zip(xs.tolist(), (counts / v.size).tolist()))


def format_tsv(pairs: Iterable[tuple[float, float]]) -> str:
    """Two-column TSV with 10 significant digits, no header."""
    return "".join(f"{x:.10g}\t{y:.10g}\n" for x, y in pairs)
