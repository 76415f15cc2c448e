"""Small builders shared by the test modules."""

import datetime as dt

from fuzzyscore.ratios import PredictorVector
from fuzzyscore.statements import FinancialStatement, PeriodType


def model_vector(eti, ln_sales, re_ta, e_tl):
    return PredictorVector(ebit_to_interest=eti, ln_sales=ln_sales, re_to_assets=re_ta, equity_to_tl=e_tl)


def statement(cid="X", period_end=dt.date(2008, 12, 31), **items):
    base = dict(assets=1000.0, sales=2000.0, ebit=100.0, interest_expense=20.0, equity=500.0,
                total_liabilities=500.0, retained_earnings=100.0, working_capital=50.0, cash=10.0,
                cash_and_equivalents=20.0, short_term_debt=100.0, current_assets=300.0)
    base.update(items)
    return FinancialStatement(cid, period_end, PeriodType.for_period_end(period_end), **base)


RECOVERY_TRUTH = (-1.0, (("ebit_to_interest", -0.8), ("ln_sales", -0.5), ("re_to_assets", 0.6),
                         ("equity_to_tl", -1.0)))


def recovery_cases(seed, n, truth=RECOVERY_TRUTH):
    """Labeled cases whose BAD flag is a Bernoulli draw from a known RAW logit.

    Predictors are independent standard normals, so every coefficient is
    well identified at moderate sample sizes.
    """
    import numpy as np

    from fuzzyscore.ingestion import LabeledCase, Label
    from fuzzyscore.logit import logistic

    rng = np.random.default_rng(seed)
    intercept, coefs = truth
    X = rng.standard_normal((n, len(coefs)))
    p = logistic(intercept + X @ np.array([b for _, b in coefs]))
    bad = rng.random(n) < p
    day = dt.date(2008, 12, 31)
    return [
        LabeledCase(f"R{i:05d}", day, PeriodType.ANNUAL, day, PredictorVector(**dict(zip((f for f, _ in coefs), x))),
                    Label.BAD if b else Label.GOOD)
        for i, (x, b) in enumerate(zip(X.tolist(), bad))
    ]
