"""Seeded synthetic statements, defaults and ratings.

Stands in for proprietary statement and default databases. Each company
reports over the seven quarters 1Q2008-3Q2009 (starting in one of the
first five). Its four model ratios come from a one-factor Gaussian
latent structure::

    z_i  = rho * q + sqrt(1 - rho^2) * e_i        q, e_i ~ N(0, 1), rho = 0.62
    z_it = z_i + 0.3 * u_it                       per-period wobble

    EBIT / Interest  = exp(1.2 + 1.1 z) - 1        (right-skewed, > -1)
    LN(Sales)        = 16.8 + 1.2 z                (annualised, thousand RUB)
    RE / Assets      = 0.07 + 0.13 z
    Equity / TL      = exp(-0.2 + 0.9 z)

Line items are back-solved from these ratios (assets = equity + total
liabilities), rounded to whole rubles, and the ratios re-read from the
rounded statement. Defaults follow a discrete-time hazard: at every
usable report the company defaults before its next report with the
probability the supplied fuzzy logit assigns to that report. A fitted
logit on the labeled cases therefore targets the generating coefficients.
"""

from __future__ import annotations

import datetime as dt
import math
from typing import Optional, Sequence

import numpy as np

from .calibration import AGENCIES
from .ingestion import (
    DefaultEvent,
    DefaultKind,
    RatingRecord,
    _usable,
    availability_date,
)
from .logit import LogitModel, Space, logit_predict
from .ratios import compute_predictors
from .scoring import FuzzySpec, fs_score
from .statements import FinancialStatement, PeriodType

PERIODS = (
    (dt.date(2008, 3, 31), PeriodType.Q1),
    (dt.date(2008, 6, 30), PeriodType.Q2),
    (dt.date(2008, 9, 30), PeriodType.Q3),
    (dt.date(2008, 12, 31), PeriodType.ANNUAL),
    (dt.date(2009, 3, 31), PeriodType.Q1),
    (dt.date(2009, 6, 30), PeriodType.Q2),
    (dt.date(2009, 9, 30), PeriodType.Q3),
)

FACTOR_LOADING = 0.62
PERIOD_NOISE = 0.3
MISSING_RATE = 0.02
TECHNICAL_RATE = 0.03

_MISSABLE = ("interest_expense", "sales", "equity", "retained_earnings", "cash", "current_assets")


def draw_ratios(z: np.ndarray) -> dict[str, float]:
    """Model ratios from four standard-normal latent scores."""
    return {
        "ebit_to_interest": math.exp(1.2 + 1.1 * z[0]) - 1.0,
        "ln_sales": 16.8 + 1.2 * z[1],
        "re_to_assets": 0.07 + 0.13 * z[2],
        "equity_to_tl": math.exp(-0.2 + 0.9 * z[3]),
    }


def _statement(rng: np.random.Generator, cid: str, period_end: dt.date, ptype: PeriodType,
               ratios: dict[str, float], firm: dict[str, float], wc_score: float) -> FinancialStatement:
    q = ptype.quarter_index
    sales_annual = math.exp(ratios["ln_sales"])
    sta = firm["sales_to_assets"] * math.exp(0.05 * rng.standard_normal())
    assets = sales_annual / sta
    e_tl = ratios["equity_to_tl"]
    total_liabilities = assets / (1.0 + e_tl)
    equity = assets - total_liabilities
    interest = firm["rate"] * firm["debt_share"] * total_liabilities * q / 4.0
    ebit = ratios["ebit_to_interest"] * interest
    current_assets = assets * firm["ca_share"]
    wc = assets * min(0.05 + 0.08 * wc_score, firm["ca_share"] - 0.05)
    current_liabilities = current_assets - wc
    short_term_debt = current_liabilities * firm["std_share"]
    cash_eq = current_assets * firm["cash_share"]
    cash = cash_eq * firm["cash_core"]
    items = {
        "assets": assets,
        "sales": sales_annual * q / 4.0,
        "ebit": ebit,
        "interest_expense": interest,
        "equity": equity,
        "total_liabilities": total_liabilities,
        "retained_earnings": ratios["re_to_assets"] * assets,
        "working_capital": wc,
        "cash": cash,
        "cash_and_equivalents": cash_eq,
        "short_term_debt": short_term_debt,
        "current_assets": current_assets,
    }
    items = {k: round(v, 3) for k, v in items.items()}
    if rng.random() < MISSING_RATE:
        items[_MISSABLE[rng.integers(len(_MISSABLE))]] = None
    return FinancialStatement(cid, period_end, ptype, **items)


def generate_synthetic_dataset(seed: int, n_companies: int, model: LogitModel,
                               fuzzy: Optional[FuzzySpec] = None
                               ) -> tuple[list[FinancialStatement], list[DefaultEvent]]:
    """Deterministic synthetic (statements, defaults) for ``n_companies`` issuers.

    ``model`` must be a FUZZY logit; ``fuzzy`` overrides its membership anchors.
    """
    if n_companies < 2:
        raise ValueError(f"n_companies must be at least 2, got {n_companies}")
    if model.space is not Space.FUZZY:
        raise ValueError("the generating model must be a FUZZY logit")
    if fuzzy is not None:
        model = LogitModel(Space.FUZZY, model.intercept, model.coefficients, fuzzy=fuzzy)

    rng = np.random.default_rng(seed)
    width = max(5, len(str(n_companies)))
    statements: list[FinancialStatement] = []
    defaults: list[DefaultEvent] = []
    loading = FACTOR_LOADING
    for k in range(n_companies):
        cid = f"C{k + 1:0{width}d}"
        quality = rng.standard_normal()
        base = loading * quality + math.sqrt(1 - loading ** 2) * rng.standard_normal(4)
        firm = {
            "sales_to_assets": math.exp(-0.2 + 0.4 * rng.standard_normal()),
            "rate": rng.uniform(0.03, 0.08),
            "debt_share": rng.uniform(0.4, 0.8),
            "ca_share": rng.uniform(0.25, 0.6),
            "std_share": rng.uniform(0.3, 0.7),
            "cash_share": rng.uniform(0.03, 0.25),
            "cash_core": rng.uniform(0.6, 1.0),
        }
        start = int(rng.integers(0, 5))
        defaulted = False
        for period_end, ptype in PERIODS[start:]:
            z = base + PERIOD_NOISE * rng.standard_normal(4)
            wc_score = loading * quality + math.sqrt(1 - loading ** 2) * rng.standard_normal()
            stmt = _statement(rng, cid, period_end, ptype, draw_ratios(z), firm, wc_score)
            statements.append(stmt)
            u_default, day = rng.random(), int(rng.integers(1, 30))
            if defaulted:
                continue
            p = compute_predictors(stmt, annualize=True)
            if not _usable(stmt, p):
                continue
            if u_default < logit_predict(model, p):
                defaulted = True
                avail = availability_date(period_end, ptype)
                defaults.append(DefaultEvent(cid, avail + dt.timedelta(days=day), DefaultKind.REAL))
        if rng.random() < TECHNICAL_RATE:
            offset = int(rng.integers(0, 600))
            defaults.append(DefaultEvent(cid, dt.date(2008, 4, 1) + dt.timedelta(days=offset), DefaultKind.TECHNICAL))
    defaults.sort(key=lambda e: (e.company_id, e.default_date, e.kind.value))
    return statements, defaults


_SP_NOTCHES = {
    "A": ("AAA", "AA+", "AA", "AA-", "A+", "A", "A-"),
    "BBB": ("BBB+", "BBB", "BBB-"),
    "BB": ("BB+", "BB", "BB-"),
    "B": ("B+", "B", "B-"),
    "CCC/C": ("CCC+", "CCC", "CCC-", "CC", "C"),
}
_MOODYS_NOTCHES = {
    "A": ("Aaa", "Aa1", "Aa2", "Aa3", "A1", "A2", "A3"),
    "BBB": ("Baa1", "Baa2", "Baa3"),
    "BB": ("Ba1", "Ba2", "Ba3"),
    "B": ("B1", "B2", "B3"),
    "CCC/C": ("Caa1", "Caa2", "Caa3", "Ca", "C"),
}


def grade_for_fs(fs: float) -> str:
    """Reduced grade whose B-letter count is nearest to ``fs``."""
    if fs >= 3.4:
        return "A"
    return ("CCC/C", "B", "BB", "BBB")[min(3, max(0, int(math.floor(fs + 0.5))))]


def synthetic_ratings(seed: int, statements: Sequence[FinancialStatement], fuzzy: FuzzySpec,
                      coverage: float = 0.3, noise: float = 0.35) -> list[RatingRecord]:
    """Agency ratings for a random ``coverage`` share of companies.

    Each rated company gets one rating, dated at its first period end, whose
    B-letter count tracks its average FS-Score plus Gaussian noise.
    """
    rng = np.random.default_rng([seed, 7])
    by_company: dict[str, list[FinancialStatement]] = {}
    for s in statements:
        by_company.setdefault(s.company_id, []).append(s)
    out = []
    for cid in sorted(by_company):
        rated = rng.random() < coverage
        agency = AGENCIES[int(rng.integers(len(AGENCIES)))]
        eps = noise * rng.standard_normal()
        pick = rng.random()
        if not rated:
            continue
        scores = []
        for s in by_company[cid]:
            p = compute_predictors(s, annualize=True)
            if _usable(s, p):
                scores.append(fs_score(p, fuzzy))
        if not scores:
            continue
        grade = grade_for_fs(float(np.mean(scores)) + eps)
        notches = (_MOODYS_NOTCHES if agency == "MOODYS" else _SP_NOTCHES)[grade]
        raw = notches[int(pick * len(notches))]
        first = min(s.period_end for s in by_company[cid])
        out.append(RatingRecord(cid, first, agency, raw))
    return out
