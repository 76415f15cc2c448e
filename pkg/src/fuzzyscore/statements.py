"""Financial statement records as they arrive from the statements file."""

from __future__ import annotations

import calendar
import datetime as dt
from dataclasses import dataclass, fields
from enum import Enum
from typing import Optional


class PeriodType(str, Enum):
    Q1 = "Q1"
    Q2 = "Q2"
    Q3 = "Q3"
    ANNUAL = "ANNUAL"

    @property
    def quarter_index(self) -> int:
        """Number of quarters covered by a year-to-date report of this type."""
        return {"Q1": 1, "Q2": 2, "Q3": 3, "ANNUAL": 4}[self.value]

    @classmethod
    def for_period_end(cls, period_end: dt.date) -> "PeriodType":
        return {3: cls.Q1, 6: cls.Q2, 9: cls.Q3, 12: cls.ANNUAL}[period_end.month]


# Line items in thousand RUB, in statements.csv column order.
MONEY_FIELDS = (
    "assets",
    "sales",
    "ebit",
    "interest_expense",
    "equity",
    "total_liabilities",
    "retained_earnings",
    "working_capital",
    "cash",
    "cash_and_equivalents",
    "short_term_debt",
    "current_assets",
)


def is_quarter_end(day: dt.date) -> bool:
    return day.month in (3, 6, 9, 12) and day.day == calendar.monthrange(day.year, day.month)[1]


@dataclass(frozen=True)
class FinancialStatement:
    """One reporting period of RAS line items for one company.

    Sales are year-to-date, as filed. ``None`` marks a missing cell.
    """

    company_id: str
    period_end: dt.date
    period_type: PeriodType
    assets: Optional[float] = None
    sales: Optional[float] = None
    ebit: Optional[float] = None
    interest_expense: Optional[float] = None
    equity: Optional[float] = None
    total_liabilities: Optional[float] = None
    retained_earnings: Optional[float] = None
    working_capital: Optional[float] = None
    cash: Optional[float] = None
    cash_and_equivalents: Optional[float] = None
    short_term_debt: Optional[float] = None
    current_assets: Optional[float] = None

    def __post_init__(self):
        if not is_quarter_end(self.period_end):
            raise ValueError(f"{self.company_id}: period_end {self.period_end} is not a quarter end")

    @property
    def key(self) -> tuple[str, dt.date]:
        return (self.company_id, self.period_end)

    def scaled(self, k: float) -> "FinancialStatement":
        """Copy with every money field multiplied by ``k``."""
        values = {
            f.name: (getattr(self, f.name) * k if getattr(self, f.name) is not None else None)
            for f in fields(self)
            if f.name in MONEY_FIELDS
        }
        return FinancialStatement(self.company_id, self.period_end, self.period_type, **values)
