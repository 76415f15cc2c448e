"""Candidate financial ratios and the Altman Z''-EM score.

Twelve ratios grouped by size, balance sheet structure, profitability and
liquidity, plus the emerging-markets Z'' score::

    Z''-EM = 3.25 + 6.56 X1 + 3.26 X2 + 6.72 X3 + 1.05 X4

    X1 = working capital / assets
    X2 = retained earnings / assets
    X3 = EBIT / assets
    X4 = book equity / total liabilities

Degenerate inputs never raise. A missing line item or a zero denominator
gives a missing ratio, with one exception: zero interest expense gives an
infinite interest coverage whose sign follows EBIT.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields
from typing import Optional

from .statements import FinancialStatement

Z_EM_CONSTANT = 3.25
Z_EM_WEIGHTS = (6.56, 3.26, 6.72, 1.05)

# The four ratios that enter every scoring model, in model order.
MODEL_PREDICTORS = ("ebit_to_interest", "ln_sales", "re_to_assets", "equity_to_tl")

PREDICTOR_LABELS = {
    "ln_assets": "LN(Assets)",
    "ln_sales": "LN(Sales)",
    "sales_to_assets": "Sales / Assets",
    "wc_to_assets": "Working Capital / Assets",
    "re_to_assets": "Retained Earnings / Assets",
    "equity_to_tl": "Equity / Total Liabilities",
    "ebit_to_sales": "EBIT / Sales",
    "ebit_to_assets": "EBIT / Assets",
    "ebit_to_interest": "EBIT / Interest",
    "cash_to_std": "Cash / ST Debt",
    "casheq_to_std": "Cash and equivalents / ST Debt",
    "ca_to_std": "Current Assets / ST Debt",
    "z_em": "Altman Z''-Score (EM Score)",
}


@dataclass(frozen=True)
class PredictorVector:
    ln_assets: Optional[float] = None
    ln_sales: Optional[float] = None
    sales_to_assets: Optional[float] = None
    wc_to_assets: Optional[float] = None
    re_to_assets: Optional[float] = None
    equity_to_tl: Optional[float] = None
    ebit_to_sales: Optional[float] = None
    ebit_to_assets: Optional[float] = None
    ebit_to_interest: Optional[float] = None
    cash_to_std: Optional[float] = None
    casheq_to_std: Optional[float] = None
    ca_to_std: Optional[float] = None
    z_em: Optional[float] = None

    def get(self, name: str) -> Optional[float]:
        if name not in PREDICTOR_FIELDS:
            raise KeyError(f"unknown predictor {name!r}")
        return getattr(self, name)

    def values(self, names=MODEL_PREDICTORS) -> list[Optional[float]]:
        return [self.get(n) for n in names]

    def missing(self, names=MODEL_PREDICTORS) -> list[str]:
        return [n for n in names if self.get(n) is None]

    def as_dict(self) -> dict[str, Optional[float]]:
        return asdict(self)


PREDICTOR_FIELDS = tuple(f.name for f in fields(PredictorVector))


def _div(num: Optional[float], den: Optional[float]) -> Optional[float]:
    if num is None or den is None or den == 0:
        return None
    return num / den


def _ln(x: Optional[float]) -> Optional[float]:
    if x is None or x <= 0:
        return None
    return math.log(x)


def coverage_ratio(ebit: Optional[float], interest: Optional[float]) -> Optional[float]:
    """EBIT / interest expense on the extended reals."""
    if ebit is None or interest is None:
        return None
    if interest == 0:
        return math.inf if ebit >= 0 else -math.inf
    return ebit / interest


def z_em_from_ratios(wc_to_assets: float, re_to_assets: float, ebit_to_assets: float,
                     equity_to_tl: float) -> float:
    w1, w2, w3, w4 = Z_EM_WEIGHTS
    return Z_EM_CONSTANT + w1 * wc_to_assets + w2 * re_to_assets + w3 * ebit_to_assets + w4 * equity_to_tl


def altman_z_em(stmt: FinancialStatement) -> Optional[float]:
    """Altman Z''-EM score of a statement, or None when it cannot be formed.

    Requires positive assets and total liabilities; anything else (including
    a missing line item) yields None.
    """
    assets, tl = stmt.assets, stmt.total_liabilities
    parts = (stmt.working_capital, stmt.retained_earnings, stmt.ebit, stmt.equity)
    if assets is None or tl is None or any(p is None for p in parts):
        return None
    if assets <= 0 or tl <= 0:
        return None
    wc, re, ebit, equity = parts
    return z_em_from_ratios(wc / assets, re / assets, ebit / assets, equity / tl)


def annualized_sales(stmt: FinancialStatement) -> Optional[float]:
    """Year-to-date sales scaled by 4/q to a full-year run rate."""
    if stmt.sales is None:
        return None
    return stmt.sales * 4.0 / stmt.period_type.quarter_index


def compute_predictors(stmt: FinancialStatement, annualize: bool = True) -> PredictorVector:
    assets = stmt.assets
    sales = annualized_sales(stmt) if annualize else stmt.sales
    std = stmt.short_term_debt
    return PredictorVector(
        ln_assets=_ln(assets),
        ln_sales=_ln(sales),
        sales_to_assets=_div(sales, assets),
        wc_to_assets=_div(stmt.working_capital, assets),
        re_to_assets=_div(stmt.retained_earnings, assets),
        equity_to_tl=_div(stmt.equity, stmt.total_liabilities),
        # margin is scale-free in the period, so no annualization here
        ebit_to_sales=_div(stmt.ebit, stmt.sales),
        ebit_to_assets=_div(stmt.ebit, assets),
        ebit_to_interest=coverage_ratio(stmt.ebit, stmt.interest_expense),
        cash_to_std=_div(stmt.cash, std),
        casheq_to_std=_div(stmt.cash_and_equivalents, std),
        ca_to_std=_div(stmt.current_assets, std),
        z_em=altman_z_em(stmt),
    )
