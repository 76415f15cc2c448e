import datetime as dt
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fuzzyscore.ratios import (
    PREDICTOR_FIELDS,
    altman_z_em,
    compute_predictors,
    z_em_from_ratios,
)
from helpers import statement


class TestComputePredictors:
    def test_ln_sales_at_e16(self):
        # oracle: e^16 = 8886110.52..., so 8,886,111 sits just above it
        assert math.exp(16) == pytest.approx(8886110.520507872)
        p = compute_predictors(statement(sales=8_886_111.0))
        assert p.ln_sales == pytest.approx(16.0, abs=1e-4)
        assert p.ln_sales > 16.0

    def test_equity_to_liabilities(self):
        p = compute_predictors(statement(equity=1000.0, total_liabilities=2000.0))
        assert p.equity_to_tl == 0.5

    @pytest.mark.parametrize("ebit, expected", [(5.0, math.inf), (0.0, math.inf), (-5.0, -math.inf)])
    def test_zero_interest_coverage(self, ebit, expected):
        p = compute_predictors(statement(ebit=ebit, interest_expense=0.0))
        assert p.ebit_to_interest == expected

    def test_every_ratio_by_name(self):
        s = statement()
        p = compute_predictors(s, annualize=False)
        assert p.ln_assets == math.log(1000)
        assert p.ln_sales == math.log(2000)
        assert p.sales_to_assets == 2.0
        assert p.wc_to_assets == 0.05
        assert p.re_to_assets == 0.1
        assert p.equity_to_tl == 1.0
        assert p.ebit_to_sales == 0.05
        assert p.ebit_to_assets == 0.1
        assert p.ebit_to_interest == 5.0
        assert p.cash_to_std == 0.1
        assert p.casheq_to_std == 0.2
        assert p.ca_to_std == 3.0
        assert p.z_em == pytest.approx(3.25 + 6.56 * 0.05 + 3.26 * 0.1 + 6.72 * 0.1 + 1.05 * 1.0)

    @pytest.mark.parametrize("period_end, factor", [
        (dt.date(2009, 3, 31), 4.0),
        (dt.date(2009, 6, 30), 2.0),
        (dt.date(2009, 9, 30), 4.0 / 3.0),
        (dt.date(2009, 12, 31), 1.0),
    ])
    def test_annualization(self, period_end, factor):
        s = statement(period_end=period_end, sales=300.0)
        on, off = compute_predictors(s, annualize=True), compute_predictors(s, annualize=False)
        assert on.ln_sales == pytest.approx(math.log(300.0 * factor), abs=1e-12)
        assert off.ln_sales == pytest.approx(math.log(300.0), abs=1e-12)
        assert on.sales_to_assets == pytest.approx(0.3 * factor)
        # the margin does not depend on the sales convention
        assert on.ebit_to_sales == off.ebit_to_sales

    def test_missing_inputs_propagate(self):
        p = compute_predictors(statement(sales=None, short_term_debt=0.0, total_liabilities=0.0))
        assert p.ln_sales is None and p.sales_to_assets is None and p.ebit_to_sales is None
        assert p.cash_to_std is None and p.casheq_to_std is None and p.ca_to_std is None
        # a liability-free issuer is outside the model population
        assert p.equity_to_tl is None
        assert p.ln_assets is not None

    @pytest.mark.parametrize("value", [0.0, -10.0])
    def test_logs_need_positive_values(self, value):
        p = compute_predictors(statement(assets=value, sales=value))
        assert p.ln_assets is None and p.ln_sales is None

    @settings(max_examples=60, deadline=None)
    @given(k=st.floats(min_value=1e-3, max_value=1e3))
    def test_scale_covariance(self, k):
        s = statement(ebit=-37.5, retained_earnings=-12.0)
        base, scaled = compute_predictors(s), compute_predictors(s.scaled(k))
        for f in PREDICTOR_FIELDS:
            b, v = base.get(f), scaled.get(f)
            if f in ("ln_assets", "ln_sales"):
                assert v - b == pytest.approx(math.log(k), abs=1e-9)
            else:
                assert v == pytest.approx(b, rel=1e-12, abs=1e-12)


class TestAltmanZEm:
    def test_constant_only(self):
        assert z_em_from_ratios(0, 0, 0, 0) == 3.25
        s = statement(working_capital=0.0, retained_earnings=0.0, ebit=0.0, equity=0.0)
        assert altman_z_em(s) == 3.25

    def test_hand_evaluation(self):
        # 3.25 + 0.656 + 0.326 + 0.672 + 1.05
        s = statement(assets=1000.0, working_capital=100.0, retained_earnings=100.0, ebit=100.0,
                      equity=400.0, total_liabilities=400.0)
        assert altman_z_em(s) == pytest.approx(5.954, abs=1e-12)

    def test_negative_ratios(self):
        # 3.25 - 3.28 - 1.63 - 3.36 + 0
        s = statement(assets=1000.0, working_capital=-500.0, retained_earnings=-500.0, ebit=-500.0,
                      equity=0.0, total_liabilities=1500.0)
        assert altman_z_em(s) == pytest.approx(-5.02, abs=1e-12)

    def test_missing_and_degenerate(self):
        assert altman_z_em(statement(working_capital=None)) is None
        assert altman_z_em(statement(total_liabilities=0.0)) is None
        assert altman_z_em(statement(assets=-1.0)) is None

    @pytest.mark.parametrize("index, weight", [(0, 6.56), (1, 3.26), (2, 6.72), (3, 1.05)])
    def test_linear_in_each_ratio(self, index, weight):
        x = [0.1, -0.2, 0.05, 0.8]
        h = 1e-5
        up, down = list(x), list(x)
        up[index] += h
        down[index] -= h
        slope = (z_em_from_ratios(*up) - z_em_from_ratios(*down)) / (2 * h)
        assert slope == pytest.approx(weight, rel=1e-8)
