"""Binary logit models of the probability that a case is BAD.

Two predictor spaces share one model type: RAW uses the ratios as they
are, FUZZY uses their membership grades. Fitting is plain maximum
likelihood by Newton's method (the log-likelihood is concave), without
regularisation. Separated data are flagged rather than penalised.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from .ratios import MODEL_PREDICTORS, PredictorVector
from .scoring import PUBLISHED_FUZZY, FuzzySpec, membership

logger = logging.getLogger(__name__)

GRADIENT_TOL = 1e-8
MAX_ITER = 100
SEPARATION_BOUND = 30.0
PERFECT_FIT_TOL = 1e-6


class UndefinedModelError(ValueError):
    """The likelihood has no maximiser for this input (e.g. only one class)."""


class Space(str, Enum):
    RAW = "RAW"
    FUZZY = "FUZZY"


@dataclass(frozen=True)
class FitInfo:
    log_likelihood: float
    iterations: int
    gradient_norm: float
    converged: bool
    separated: bool
    n_cases: int
    n_bad: int


@dataclass(frozen=True)
class LogitModel:
    space: Space
    intercept: float
    coefficients: tuple[tuple[str, float], ...]
    fuzzy: Optional[FuzzySpec] = None
    fit: Optional[FitInfo] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "space", Space(self.space))
        object.__setattr__(self, "intercept", float(self.intercept))
        object.__setattr__(self, "coefficients", tuple((str(f), float(b)) for f, b in self.coefficients))
        if not math.isfinite(self.intercept) or not all(math.isfinite(b) for _, b in self.coefficients):
            raise ValueError("logit coefficients must be finite")
        if self.space is Space.FUZZY:
            if self.fuzzy is None:
                raise ValueError("a FUZZY logit needs a FuzzySpec")
            known = {f for f, _, _ in self.fuzzy.entries}
            unknown = [f for f, _ in self.coefficients if f not in known]
            if unknown:
                raise ValueError(f"coefficients for predictors outside the FuzzySpec: {unknown}")

    @property
    def fields(self) -> tuple[str, ...]:
        return tuple(f for f, _ in self.coefficients)

    @property
    def beta(self) -> np.ndarray:
        """Intercept followed by the coefficients."""
        return np.array([self.intercept] + [b for _, b in self.coefficients])

    def design_row(self, p: PredictorVector) -> list[float]:
        out = []
        for f in self.fields:
            x = p.get(f)
            if x is None or math.isnan(x):
                raise ValueError(f"predictor {f} is missing")
            if self.space is Space.FUZZY:
                a, b = self.fuzzy.anchors(f)
                x = membership(x, a, b)
            elif not math.isfinite(x):
                raise ValueError(f"predictor {f} = {x} is not finite; a RAW logit cannot use it")
            out.append(x)
        return out


PUBLISHED_RAW_LOGIT = LogitModel(Space.RAW, 1.9808, (
    ("ebit_to_interest", -0.1131),
    ("ln_sales", -0.2431),
    ("re_to_assets", -3.1491),
    ("equity_to_tl", -2.0711),
))

PUBLISHED_FUZZY_LOGIT = LogitModel(Space.FUZZY, -1.46645, (
    ("ebit_to_interest", -6.21185),
    ("ln_sales", -1.19298),
    ("re_to_assets", -3.1798),
    ("equity_to_tl", -5.09643),
), fuzzy=PUBLISHED_FUZZY)


def logistic(z):
    """exp(z) / (1 + exp(z)) without overflow for either sign of z."""
    z = np.asarray(z, dtype=float)
    ez = np.exp(-np.abs(z))
    out = np.where(z >= 0, 1.0 / (1.0 + ez), ez / (1.0 + ez))
    return float(out) if out.ndim == 0 else out


def logit_predict(model: LogitModel, p: PredictorVector) -> float:
    """Probability that the case is BAD."""
    z = model.intercept + math.fsum(b * x for (_, b), x in zip(model.coefficients, model.design_row(p)))
    return logistic(z)


def design_matrix(model_or_fields, vectors: Sequence[PredictorVector], space: Space = Space.RAW,
                  fuzzy: Optional[FuzzySpec] = None) -> np.ndarray:
    """Predictor matrix (no intercept column) in the given space."""
    if isinstance(model_or_fields, LogitModel):
        template = model_or_fields
    else:
        template = LogitModel(space, 0.0, tuple((f, 0.0) for f in model_or_fields),
                              fuzzy=(fuzzy or PUBLISHED_FUZZY) if Space(space) is Space.FUZZY else None)
    return np.array([template.design_row(p) for p in vectors], dtype=float).reshape(len(vectors), len(template.fields))


# -- likelihood -------------------------------------------------------------

def log_likelihood(beta: np.ndarray, X: np.ndarray, y: np.ndarray) -> float:
    """Bernoulli log-likelihood; X includes the intercept column, y is 1 for BAD."""
    z = X @ beta
    # log p = -log(1 + e^-z), log(1 - p) = -log(1 + e^z)
    return float(-np.sum(y * np.logaddexp(0.0, -z) + (1.0 - y) * np.logaddexp(0.0, z)))


def gradient(beta: np.ndarray, X: np.ndarray, y: np.ndarray) -> np.ndarray:
    return X.T @ (y - logistic(X @ beta))


def hessian(beta: np.ndarray, X: np.ndarray) -> np.ndarray:
    p = logistic(X @ beta)
    w = p * (1.0 - p)
    return -(X.T * w) @ X


def collinear_columns(X: np.ndarray, names: Sequence[str]) -> list[str]:
    """Columns that add nothing to the rank of those before them."""
    dependent, kept = [], []
    for j, name in enumerate(names):
        trial = X[:, kept + [j]]
        if np.linalg.matrix_rank(trial) < len(kept) + 1:
            dependent.append(name)
        else:
            kept.append(j)
    return dependent


def newton_fit(X: np.ndarray, y: np.ndarray, start: Optional[np.ndarray] = None,
               names: Optional[Sequence[str]] = None) -> tuple[np.ndarray, FitInfo]:
    """Maximise the log-likelihood from ``start`` (zeros by default).

    ``X`` must already contain the intercept column. Stops when the
    gradient max-norm drops below GRADIENT_TOL or after MAX_ITER steps.
    Each Newton step is halved until the likelihood does not decrease.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    n, k = X.shape
    names = list(names) if names is not None else [f"x{j}" for j in range(k)]
    n_bad = int(y.sum())
    if n_bad == 0 or n_bad == n:
        raise UndefinedModelError("logit fit needs at least one GOOD and one BAD case")
    if np.linalg.matrix_rank(X) < k:
        dependent = ", ".join(collinear_columns(X, names))
        raise ValueError(f"design matrix is rank deficient; collinear columns: {dependent}")

    beta = np.zeros(k) if start is None else np.asarray(start, dtype=float).copy()
    ll = log_likelihood(beta, X, y)
    g = gradient(beta, X, y)
    it = 0
    while np.max(np.abs(g)) >= GRADIENT_TOL and it < MAX_ITER:
        it += 1
        H = hessian(beta, X)
        try:
            step = np.linalg.solve(-H, g)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(-H, g, rcond=None)[0]
        # allow for rounding noise in the summed likelihood near the optimum
        slack = 1e-12 * (1.0 + abs(ll))
        t = 1.0
        while True:
            cand = beta + t * step
            cand_ll = log_likelihood(cand, X, y)
            if cand_ll >= ll - slack or t < 1e-10:
                break
            t /= 2.0
        if cand_ll < ll - slack:
            # no ascent along the Newton direction; further steps cannot help
            break
        beta, ll = cand, cand_ll
        g = gradient(beta, X, y)
        if np.max(np.abs(beta)) > 1e3:
            break
    gnorm = float(np.max(np.abs(g)))
    # The gradient can vanish before the coefficients pass the bound on
    # separated data, so perfect in-sample prediction counts as well.
    perfect = bool(np.max(np.abs(y - logistic(X @ beta))) < PERFECT_FIT_TOL)
    separated = bool(np.max(np.abs(beta)) > SEPARATION_BOUND) or perfect
    if separated:
        logger.warning("logit fit looks separated: max |coefficient| = %.3g", np.max(np.abs(beta)))
    info = FitInfo(ll, it, gnorm, gnorm < GRADIENT_TOL, separated, n, n_bad)
    return beta, info


def fit_logit(cases, space: Space | str = Space.RAW, fields: Sequence[str] = MODEL_PREDICTORS,
              fuzzy: Optional[FuzzySpec] = None, start: Optional[np.ndarray] = None) -> LogitModel:
    """Maximum-likelihood logit on labeled cases (target 1 = BAD).

    ``fields=()`` fits an intercept-only model. In RAW space, cases with an
    infinite predictor cannot enter the likelihood and are left out with a
    warning.
    """
    space = Space(space)
    fuzzy = (fuzzy or PUBLISHED_FUZZY) if space is Space.FUZZY else None
    fields = tuple(fields)
    if space is Space.RAW:
        kept = [c for c in cases if all(np.isfinite(c.predictors.get(f)) for f in fields)]
        if len(kept) < len(cases):
            logger.warning("RAW logit: %d case(s) with infinite predictors left out", len(cases) - len(kept))
        cases = kept
    X = design_matrix(fields, [c.predictors for c in cases], space, fuzzy)
    X = np.column_stack([np.ones(len(cases)), X])
    y = np.array([1.0 if c.is_bad else 0.0 for c in cases])
    beta, info = newton_fit(X, y, start=start, names=("const",) + fields)
    return LogitModel(space, beta[0], tuple(zip(fields, beta[1:].tolist())), fuzzy=fuzzy, fit=info)
