"""Statement, default and rating files, and assembly of labeled cases.

A report becomes public 30 calendar days after a quarter end (Q1-Q3) or
90 days after the year end. A company's first real default marks the
latest report public by then as BAD; earlier reports stay GOOD, later ones
are dropped. Technical defaults (cures) never mark anything.
"""

from __future__ import annotations

import csv
import datetime as dt
import logging
import math
from collections import defaultdict
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .ratios import MODEL_PREDICTORS, PREDICTOR_FIELDS, PredictorVector, compute_predictors
from .statements import MONEY_FIELDS, FinancialStatement, PeriodType, is_quarter_end

logger = logging.getLogger(__name__)

QUARTERLY_LAG_DAYS = 30
ANNUAL_LAG_DAYS = 90

STATEMENT_COLUMNS = ("company_id", "period_end", "period_type") + MONEY_FIELDS
DEFAULT_COLUMNS = ("company_id", "default_date", "kind")
RATING_COLUMNS = ("company_id", "as_of", "agency", "grade")
CASE_COLUMNS = ("company_id", "period_end", "period_type", "availability_date", "label") + PREDICTOR_FIELDS


class DefaultKind(str, Enum):
    REAL = "REAL"
    TECHNICAL = "TECHNICAL"


class Label(str, Enum):
    GOOD = "GOOD"
    BAD = "BAD"


class DuplicateRowError(ValueError):
    """Raised when the same (company, period_end) appears more than once."""

    def __init__(self, duplicates: Sequence[tuple[str, dt.date, Sequence[int]]]):
        self.duplicates = list(duplicates)
        parts = [f"{cid} {pe.isoformat()} (rows {', '.join(map(str, rows))})" for cid, pe, rows in self.duplicates]
        super().__init__("duplicate statement rows: " + "; ".join(parts))


@dataclass(frozen=True)
class DefaultEvent:
    company_id: str
    default_date: dt.date
    kind: DefaultKind = DefaultKind.REAL


@dataclass(frozen=True)
class RatingRecord:
    company_id: str
    as_of: dt.date
    agency: str
    grade: str


@dataclass(frozen=True)
class LabeledCase:
    company_id: str
    period_end: dt.date
    period_type: PeriodType
    availability_date: dt.date
    predictors: PredictorVector
    label: Label

    @property
    def is_bad(self) -> bool:
        return self.label is Label.BAD


def availability_date(period_end: dt.date, period_type: PeriodType | str) -> dt.date:
    """Date a report is treated as publicly available."""
    period_type = PeriodType(period_type)
    lag = ANNUAL_LAG_DAYS if period_type is PeriodType.ANNUAL else QUARTERLY_LAG_DAYS
    return period_end + dt.timedelta(days=lag)


def _usable(stmt: FinancialStatement, predictors: PredictorVector) -> bool:
    if stmt.assets is None or stmt.assets <= 0 or stmt.sales is None or stmt.sales <= 0:
        return False
    return not predictors.missing(MODEL_PREDICTORS)


def check_duplicates(statements: Iterable[FinancialStatement], row_numbers: Optional[Sequence[int]] = None) -> None:
    seen: dict[tuple[str, dt.date], list[int]] = defaultdict(list)
    for i, stmt in enumerate(statements):
        seen[stmt.key].append(row_numbers[i] if row_numbers is not None else i + 1)
    dups = [(cid, pe, rows) for (cid, pe), rows in sorted(seen.items()) if len(rows) > 1]
    if dups:
        raise DuplicateRowError(dups)


def first_real_defaults(defaults: Iterable[DefaultEvent]) -> dict[str, dt.date]:
    first: dict[str, dt.date] = {}
    for ev in defaults:
        if DefaultKind(ev.kind) is not DefaultKind.REAL:
            continue
        if ev.company_id not in first or ev.default_date < first[ev.company_id]:
            first[ev.company_id] = ev.default_date
    return first


def label_cases(
    statements: Sequence[FinancialStatement],
    defaults: Sequence[DefaultEvent],
    annualize: bool = True,
) -> list[LabeledCase]:
    """Turn statements and default events into labeled cases.

    Output is sorted by (company_id, period_end) regardless of input order.
    Statements whose model predictors cannot be computed are dropped before
    labeling, so the BAD case is the latest *usable* report public at the
    default date.
    """
    check_duplicates(statements)
    by_company: dict[str, list[FinancialStatement]] = defaultdict(list)
    for stmt in statements:
        by_company[stmt.company_id].append(stmt)

    first_default = first_real_defaults(defaults)
    for cid in sorted(set(first_default) - set(by_company)):
        logger.warning("default event for unknown company %s ignored", cid)

    cases: list[LabeledCase] = []
    for cid in sorted(by_company):
        usable = []
        for stmt in sorted(by_company[cid], key=lambda s: s.period_end):
            p = compute_predictors(stmt, annualize=annualize)
            if _usable(stmt, p):
                usable.append((stmt, availability_date(stmt.period_end, stmt.period_type), p))
        default_date = first_default.get(cid)
        bad_index = None
        if default_date is not None:
            public = [i for i, (_, avail, _) in enumerate(usable) if avail <= default_date]
            # latest availability date wins; period_end breaks the (rare) tie
            bad_index = max(public, key=lambda i: (usable[i][1], usable[i][0].period_end)) if public else None
        for i, (stmt, avail, p) in enumerate(usable):
            if default_date is not None and avail > default_date:
                continue
            label = Label.BAD if i == bad_index else Label.GOOD
            cases.append(LabeledCase(cid, stmt.period_end, stmt.period_type, avail, p, label))
    return cases


# -- file I/O ---------------------------------------------------------------

def _parse_date(text: str, where: str) -> dt.date:
    try:
        return dt.date.fromisoformat(text.strip())
    except ValueError:
        raise ValueError(f"{where}: bad date {text!r} (expected YYYY-MM-DD)") from None


def _parse_number(text: str, where: str) -> Optional[float]:
    text = text.strip()
    if text == "":
        return None
    try:
        value = float(text)
    except ValueError:
        raise ValueError(f"{where}: bad number {text!r}") from None
    if math.isnan(value):
        return None
    return value


def _reader(path: Path, required: Sequence[str]):
    fh = open(path, newline="", encoding="utf-8")
    reader = csv.DictReader(fh)
    header = reader.fieldnames or []
    missing = [c for c in required if c not in header]
    if missing:
        fh.close()
        raise ValueError(f"{path}: missing columns {', '.join(missing)}")
    return fh, reader


def read_statements(path: str | Path) -> list[FinancialStatement]:
    """Parse statements.csv. Duplicate (company, period_end) rows are an error."""
    path = Path(path)
    fh, reader = _reader(path, STATEMENT_COLUMNS)
    out: list[FinancialStatement] = []
    rows: list[int] = []
    with fh:
        for lineno, row in enumerate(reader, start=2):
            where = f"{path.name}:{lineno}"
            period_end = _parse_date(row["period_end"], where)
            if not is_quarter_end(period_end):
                raise ValueError(f"{where}: period_end {period_end} is not a quarter end")
            try:
                period_type = PeriodType(row["period_type"].strip().upper())
            except ValueError:
                raise ValueError(f"{where}: bad period_type {row['period_type']!r}") from None
            if PeriodType.for_period_end(period_end) is not period_type:
                raise ValueError(f"{where}: period_type {period_type.value} does not match {period_end}")
            money = {f: _parse_number(row[f], where) for f in MONEY_FIELDS}
            out.append(FinancialStatement(row["company_id"].strip(), period_end, period_type, **money))
            rows.append(lineno)
    check_duplicates(out, rows)
    return out


def read_defaults(path: str | Path) -> list[DefaultEvent]:
    path = Path(path)
    fh, reader = _reader(path, DEFAULT_COLUMNS)
    out = []
    with fh:
        for lineno, row in enumerate(reader, start=2):
            where = f"{path.name}:{lineno}"
            try:
                kind = DefaultKind(row["kind"].strip().upper())
            except ValueError:
                raise ValueError(f"{where}: bad kind {row['kind']!r} (REAL|TECHNICAL)") from None
            out.append(DefaultEvent(row["company_id"].strip(), _parse_date(row["default_date"], where), kind))
    return out


def read_ratings(path: str | Path) -> list[RatingRecord]:
    path = Path(path)
    fh, reader = _reader(path, RATING_COLUMNS)
    out = []
    with fh:
        for lineno, row in enumerate(reader, start=2):
            where = f"{path.name}:{lineno}"
            out.append(RatingRecord(row["company_id"].strip(), _parse_date(row["as_of"], where),
                                    row["agency"].strip().upper(), row["grade"].strip()))
    return out


def format_number(x: Optional[float]) -> str:
    """Shortest round-tripping text for a float; empty for missing."""
    if x is None:
        return ""
    return repr(float(x))


def write_statements(statements: Iterable[FinancialStatement], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(STATEMENT_COLUMNS)
        for s in statements:
            w.writerow([s.company_id, s.period_end.isoformat(), s.period_type.value]
                       + [format_number(getattr(s, f)) for f in MONEY_FIELDS])


def write_defaults(defaults: Iterable[DefaultEvent], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(DEFAULT_COLUMNS)
        for ev in defaults:
            w.writerow([ev.company_id, ev.default_date.isoformat(), DefaultKind(ev.kind).value])


def write_ratings(ratings: Iterable[RatingRecord], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RATING_COLUMNS)
        for r in ratings:
            w.writerow([r.company_id, r.as_of.isoformat(), r.agency, r.grade])


def write_cases(cases: Iterable[LabeledCase], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CASE_COLUMNS)
        for c in cases:
            w.writerow([c.company_id, c.period_end.isoformat(), c.period_type.value,
                        c.availability_date.isoformat(), c.label.value]
                       + [format_number(c.predictors.get(f)) for f in PREDICTOR_FIELDS])


def read_cases(path: str | Path) -> list[LabeledCase]:
    path = Path(path)
    fh, reader = _reader(path, CASE_COLUMNS)
    out = []
    with fh:
        for lineno, row in enumerate(reader, start=2):
            where = f"{path.name}:{lineno}"
            p = PredictorVector(**{f: _parse_number(row[f], where) for f in PREDICTOR_FIELDS})
            out.append(LabeledCase(
                row["company_id"], _parse_date(row["period_end"], where), PeriodType(row["period_type"]),
                _parse_date(row["availability_date"], where), p, Label(row["label"]),
            ))
    return out
