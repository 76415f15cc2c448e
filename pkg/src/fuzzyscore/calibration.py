"""Mapping FS-Scores onto a five-grade rating scale.

External agency ratings are reduced to A, BBB, BB, B and CCC/C. The
FS-Score roughly counts the B letters of the matching external grade, so
internal grades are buckets on [0, 4] centred near 3, 2, 1, 0.15 and 0.
"""

from __future__ import annotations

import csv
import math
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional, Sequence

import numpy as np

GRADES = ("A", "BBB", "BB", "B", "CCC/C")
DEFAULTED = "Defaulted"
STAT_GRADES = GRADES + (DEFAULTED,)
AGENCIES = ("SP", "MOODYS", "FITCH")


class UndefinedStatisticsError(ValueError):
    pass


# -- external rating reduction ----------------------------------------------

_SP_BASE = {
    "AAA": "A", "AA": "A", "A": "A",
    "BBB": "BBB", "BB": "BB", "B": "B",
    "CCC": "CCC/C", "CC": "CCC/C", "C": "CCC/C",
    "D": DEFAULTED, "SD": DEFAULTED, "RD": DEFAULTED,
}
_MOODYS_BASE = {
    "AAA": "A", "AA": "A", "A": "A",
    "BAA": "BBB", "BA": "BB", "B": "B",
    "CAA": "CCC/C", "CA": "CCC/C", "C": "CCC/C",
}
_SP_RE = re.compile(r"^(AAA|AA|A|BBB|BB|B|CCC|CC|C|SD|RD|D)[+-]?$")
_MOODYS_RE = re.compile(r"^(AAA|AA|A|BAA|BA|B|CAA|CA|C)[123]?$")


def reduce_external_rating(agency: str, raw: str, table: Optional[Mapping[tuple[str, str], str]] = None) -> str:
    """Five-grade class of an agency long-term issuer rating.

    ``table`` maps (agency, raw string) to a grade and is consulted first.
    An already reduced grade is returned unchanged for any agency.
    """
    agency = agency.strip().upper().replace("&", "").replace("'", "")
    if agency not in AGENCIES:
        raise ValueError(f"unknown agency {agency!r}; expected one of {', '.join(AGENCIES)}")
    text = raw.strip()
    if table is not None and (agency, text) in table:
        return table[(agency, text)]
    if text in STAT_GRADES:
        return text
    key = text.upper().replace(" ", "")
    if key == "CCC/C":
        return "CCC/C"
    if agency in ("SP", "FITCH"):
        m = _SP_RE.match(key)
        if m:
            return _SP_BASE[m.group(1)]
    else:
        m = _MOODYS_RE.match(key)
        if m:
            return _MOODYS_BASE[m.group(1)]
    raise ValueError(f"unrecognised {agency} rating {raw!r}")


def load_rating_table(path: str | Path) -> dict[tuple[str, str], str]:
    """Override table from a CSV with columns agency, raw, grade."""
    out = {}
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            grade = row["grade"].strip()
            if grade not in STAT_GRADES:
                raise ValueError(f"{path}: unknown grade {grade!r}")
            out[(row["agency"].strip().upper(), row["raw"].strip())] = grade
    return out


def current_grades(ratings, table=None) -> dict[str, list[tuple]]:
    """Per company, (as_of, reduced grade) sorted by date.

    Several agencies rating on the same day resolve to the riskiest grade.
    """
    by_company: dict[str, dict] = {}
    for r in ratings:
        grade = reduce_external_rating(r.agency, r.grade, table)
        day = by_company.setdefault(r.company_id, {})
        if r.as_of not in day or STAT_GRADES.index(grade) > STAT_GRADES.index(day[r.as_of]):
            day[r.as_of] = grade
    return {cid: sorted(days.items()) for cid, days in by_company.items()}


def rating_at(history: Sequence[tuple], when) -> Optional[str]:
    """Grade in force on ``when``: the latest one dated on or before it."""
    grade = None
    for as_of, g in history:
        if as_of > when:
            break
        grade = g
    return grade


def fs_by_grade(cases, fs_values: Sequence[float], ratings, table=None) -> dict[str, list[float]]:
    """Group FS-Scores by the external grade known when each report went public.

    BAD cases go to the Defaulted bucket; unrated GOOD cases are skipped.
    """
    histories = current_grades(ratings, table)
    out: dict[str, list[float]] = {g: [] for g in STAT_GRADES}
    for case, fs in zip(cases, fs_values):
        if case.is_bad:
            out[DEFAULTED].append(fs)
            continue
        grade = rating_at(histories.get(case.company_id, ()), case.availability_date)
        if grade is not None and grade != DEFAULTED:
            out[grade].append(fs)
    return {g: v for g, v in out.items() if v}


# -- statistics ---------------------------------------------------------------

@dataclass(frozen=True)
class GradeStats:
    grade: str
    n: int
    p25: float
    median: float
    p75: float


def grade_statistics(fs_values_by_grade: Mapping[str, Sequence[float]]) -> dict[str, GradeStats]:
    """Quartiles per grade, linear interpolation between order statistics."""
    out = {}
    for grade, values in fs_values_by_grade.items():
        v = np.asarray(values, dtype=float)
        if v.size == 0:
            raise UndefinedStatisticsError(f"no FS-Score observations for grade {grade}")
        p25, med, p75 = np.percentile(v, [25, 50, 75], method="linear")
        out[grade] = GradeStats(grade, int(v.size), float(p25), float(med), float(p75))
    return out


# Reference values as published (FS-Score quartiles by external grade).
PUBLISHED_GRADE_STATISTICS = {
    "A": (2.0, 3.06, 3.81),
    "BBB": (2.01, 3.05, 3.27),
    "BB": (1.0, 2.11, 3.1),
    "B": (0.11, 1.05, 1.56),
    "CCC/C": (0.0, 0.15, 0.44),
    DEFAULTED: (0.0, 0.0, 0.15),
}


# -- internal rating scale ----------------------------------------------------

@dataclass(frozen=True)
class Bucket:
    grade: str
    left: float
    center: float
    right: float


@dataclass(frozen=True)
class InternalRatingSpec:
    """Buckets ordered from safest to riskiest.

    Each bucket covers [left, right); the top bucket also takes everything
    above its left cut-off, whatever its recorded right cut-off.
    """

    buckets: tuple[Bucket, ...]

    def __post_init__(self):
        b = tuple(Bucket(str(x.grade), float(x.left), float(x.center), float(x.right)) for x in self.buckets)
        object.__setattr__(self, "buckets", b)
        if not b:
            raise ValueError("InternalRatingSpec needs at least one bucket")
        if b[-1].left != 0.0:
            raise ValueError(f"bottom bucket must start at 0, got {b[-1].left}")
        for x in b:
            if not (x.left <= x.center <= x.right) or x.left >= x.right:
                raise ValueError(f"bucket {x.grade}: need left <= center <= right and left < right, got {x}")
        for upper, lower in zip(b[:-1], b[1:]):
            if lower.right != upper.left:
                raise ValueError(f"buckets {lower.grade} and {upper.grade} are not contiguous")
        if len({x.grade for x in b}) != len(b):
            raise ValueError("duplicate grade names")

    @property
    def grades(self) -> tuple[str, ...]:
        return tuple(x.grade for x in self.buckets)

    @property
    def boundaries(self) -> tuple[float, ...]:
        """Interior cut-offs from safest to riskiest."""
        return tuple(x.left for x in self.buckets[:-1])


PUBLISHED_RATING_SPEC = InternalRatingSpec((
    Bucket("fsBBB", 2.5, 3.0, 3.5),
    Bucket("fsBB", 1.5, 2.0, 2.5),
    Bucket("fsB", 0.4, 1.0, 1.5),
    Bucket("fsCCC/C", 0.075, 0.15, 0.4),
    Bucket("fsD", 0.0, 0.0, 0.075),
))


def derive_cutoffs(centers: Sequence[tuple[str, float]]) -> InternalRatingSpec:
    """Buckets whose boundaries sit halfway between adjacent centers."""
    centers = [(str(g), float(c)) for g, c in centers]
    if not centers:
        raise ValueError("no centers")
    values = [c for _, c in centers]
    if any(hi <= lo for hi, lo in zip(values[:-1], values[1:])):
        raise ValueError(f"centers must be strictly decreasing from safest to riskiest, got {values}")
    if values[-1] < 0:
        raise ValueError("centers must be non-negative")
    bounds = [(hi + lo) / 2 for hi, lo in zip(values[:-1], values[1:])]
    lefts = bounds + [0.0]
    rights = [math.inf] + bounds
    return InternalRatingSpec(tuple(Bucket(g, l, c, r) for (g, c), l, r in zip(centers, lefts, rights)))


def map_fs_to_grade(fs: float, spec: InternalRatingSpec = PUBLISHED_RATING_SPEC) -> str:
    if math.isnan(fs) or not 0.0 <= fs <= 4.0:
        raise ValueError(f"FS-Score {fs} outside [0, 4]")
    for bucket in spec.buckets:
        if fs >= bucket.left:
            return bucket.grade
    raise AssertionError("unreachable: bottom bucket starts at 0")


def grade_rank(grade: str, spec: InternalRatingSpec = PUBLISHED_RATING_SPEC) -> int:
    """0 for the safest grade, increasing with risk."""
    return spec.grades.index(grade)
