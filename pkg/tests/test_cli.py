"""Command-line tests, including golden files for analyze and report.

Set FUZZYSCORE_UPDATE_GOLDEN=1 to rewrite the golden files after an
intended output change.
"""

import csv
import datetime as dt
import io
import json
import math
import os
import shutil
from pathlib import Path

import numpy as np
import pytest

from fuzzyscore.cli import main
from fuzzyscore.ingestion import Label, LabeledCase, write_cases, write_statements
from fuzzyscore.modelfile import load
from fuzzyscore.ratios import MODEL_PREDICTORS
from fuzzyscore.scoring import PUBLISHED_CUTOFFS, PUBLISHED_FUZZY
from fuzzyscore.statements import PeriodType
from helpers import model_vector, statement

GOLDEN = Path(__file__).parent / "golden"
UPDATE = os.environ.get("FUZZYSCORE_UPDATE_GOLDEN") == "1"


def run(*argv):
    return main([str(a) for a in argv])


def check_golden(produced: Path, name: str):
    target = GOLDEN / name
    if UPDATE:
        target.parent.mkdir(parents=True, exist_ok=True)
        shutil.copyfile(produced, target)
    assert produced.read_bytes() == target.read_bytes(), f"{name} differs from golden copy"


@pytest.fixture(scope="module")
def small(tmp_path_factory):
    """A 300-company seeded dataset pushed through synth, label and fit."""
    d = tmp_path_factory.mktemp("small")
    assert run("synth", "--seed", 7, "--n-companies", 300, "--out", d) == 0
    assert run("label", "--statements", d / "statements.csv", "--defaults", d / "defaults.csv", "--out", d) == 0
    assert run("fit", "--cases", d / "cases.csv", "--out", d) == 0
    return d


@pytest.fixture(scope="module")
def large(tmp_path_factory):
    d = tmp_path_factory.mktemp("large")
    assert run("synth", "--seed", 42, "--n-companies", 5000, "--out", d) == 0
    assert run("analyze", "--statements", d / "statements.csv", "--defaults", d / "defaults.csv",
               "--out", d) == 0
    return d


def write_toy_cases(path, rows):
    """rows: (company, ebit_to_interest, ln_sales, re_to_assets, equity_to_tl, is_bad)."""
    day = dt.date(2008, 12, 31)
    write_cases([LabeledCase(c, day, PeriodType.ANNUAL, dt.date(2009, 3, 31), model_vector(e, l, r, q),
                             Label.BAD if bad else Label.GOOD) for c, e, l, r, q, bad in rows], path)


def read_tsv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh, delimiter="\t"))


class TestAnalyze:
    @pytest.mark.parametrize("name", ["predictor_power.tsv", "correlation.tsv", "first_pc.tsv"])
    def test_golden(self, large, name):
        check_golden(large / name, f"analyze_seed42_n5000/{name}")

    def test_model_predictors_above_40(self, large):
        rows = [r for r in read_tsv(large / "predictor_power.tsv") if r["annualize"] == "on"]
        gini = {r["variable"]: float(r["gini"]) for r in rows if r["gini"]}
        assert len(rows) == 13
        for f in MODEL_PREDICTORS:
            assert gini[f] > 0.40, f

    def test_perfect_ratio_and_identity_pc(self, tmp_path, capsys):
        cases = tmp_path / "cases.csv"
        # Walsh patterns over three bits: the four predictor columns are
        # mutually uncorrelated, and ebit_to_interest ranks every BAD case
        # below every GOOD one
        rows = []
        for i in range(8):
            b0, b1, b2 = i & 1, (i >> 1) & 1, (i >> 2) & 1
            cols = [1 - 2 * b for b in (b0, b1, b2, b0 ^ b1)]
            rows.append((f"C{i}", *cols, cols[0] < 0))
        write_toy_cases(cases, rows)
        assert run("analyze", "--cases", cases, "--out", tmp_path) == 0
        power = {r["variable"]: r for r in read_tsv(tmp_path / "predictor_power.tsv")}
        assert float(power["ebit_to_interest"]["gini"]) == 1.0
        assert "100.0%" in capsys.readouterr().out
        pc = read_tsv(tmp_path / "first_pc.tsv")[0]
        assert pc["verdict"] == "PASS"


class TestFit:
    def test_outputs(self, small):
        model = load(small / "model.json")
        # 300 companies give few defaults, so only the fit record is checked
        assert model.logit_raw.fit is not None and model.logit_fuzzy.fit is not None
        comp = {r["model"]: float(r["gini"]) for r in read_tsv(small / "model_comparison.tsv")}
        assert set(comp) == {"s_score", "fs_score", "logit", "logit_f"}
        assert comp == pytest.approx(model.in_sample_gini, abs=1e-9)

    def test_use_paper_anchors_flag(self, small, tmp_path):
        assert run("fit", "--cases", small / "cases.csv", "--use-paper-anchors", "--out", tmp_path) == 0
        model = load(tmp_path / "model.json")
        assert model.fuzzy == PUBLISHED_FUZZY and model.cutoffs == PUBLISHED_CUTOFFS

    def test_use_paper_coefficients_flag(self, small, tmp_path):
        from fuzzyscore.logit import PUBLISHED_FUZZY_LOGIT, PUBLISHED_RAW_LOGIT

        assert run("fit", "--cases", small / "cases.csv", "--use-paper-coefficients", "--out", tmp_path) == 0
        model = load(tmp_path / "model.json")
        assert model.logit_raw == PUBLISHED_RAW_LOGIT and model.logit_fuzzy == PUBLISHED_FUZZY_LOGIT

    def test_repeat_identical_except_timestamp(self, small, tmp_path):
        assert run("fit", "--cases", small / "cases.csv", "--out", tmp_path) == 0
        a = json.loads((small / "model.json").read_text())
        b = json.loads((tmp_path / "model.json").read_text())
        for doc in (a, b):
            del doc["provenance"]["fit_timestamp"]
        assert a == b

    def test_single_class_fails_cleanly(self, tmp_path, caplog):
        cases = tmp_path / "cases.csv"
        write_toy_cases(cases, [("A", 1, 16, 0.1, 1, False), ("B", 2, 17, 0.2, 2, False)])
        assert run("fit", "--cases", cases, "--out", tmp_path) == 1
        assert any(r.levelname == "ERROR" and r.message.startswith("fit:") for r in caplog.records)


class TestScore:
    @pytest.fixture
    def scored(self, small, tmp_path, capsys):
        stmts = [
            # every model predictor at or above its upper anchor
            statement("TOP", ebit=160.0, sales=7e7, retained_earnings=250.0, equity=750.0, total_liabilities=250.0),
            # every model predictor below its lower anchor
            statement("LOW", ebit=20.0, sales=1e6, retained_earnings=0.0, equity=200.0, total_liabilities=800.0),
            statement("MISS", interest_expense=None, sales=None),
        ]
        path = tmp_path / "stmts.csv"
        write_statements(stmts, path)
        capsys.readouterr()
        assert run("score", "--model", small / "model.json", "--statements", path) == 0
        out = capsys.readouterr().out
        return {r["company_id"]: r for r in csv.DictReader(io.StringIO(out))}, out

    def test_top_and_bottom(self, scored):
        rows, _ = scored
        assert float(rows["TOP"]["fs_score"]) == 4.0 and rows["TOP"]["grade"] == "fsBBB"
        assert float(rows["LOW"]["fs_score"]) == 0.0 and rows["LOW"]["grade"] == "fsD"

    def test_excluded(self, scored):
        rows, _ = scored
        assert rows["MISS"]["status"] == "EXCLUDED"
        assert "ebit_to_interest" in rows["MISS"]["missing"] and "sales" in rows["MISS"]["missing"]

    def test_column_order(self, scored):
        from fuzzyscore.pipeline import SCORE_COLUMNS

        _, out = scored
        assert tuple(out.splitlines()[0].split(",")) == SCORE_COLUMNS

    def test_to_file(self, small, tmp_path):
        assert run("score", "--model", small / "model.json", "--statements", small / "statements.csv",
                   "--out", tmp_path) == 0
        assert (tmp_path / "scores.csv").read_text().startswith("company_id,")


class TestReport:
    @pytest.fixture(scope="class")
    @classmethod
    def report_dir(cls, small, tmp_path_factory):
        d = tmp_path_factory.mktemp("report")
        assert run("report", "--model", small / "model.json", "--cases", small / "cases.csv",
                   "--ratings", small / "ratings.csv", "--out", d) == 0
        return d

    def test_golden(self, report_dir):
        names = sorted(p.name for p in report_dir.iterdir())
        listing = report_dir / "_files.txt"
        listing.write_text("\n".join(names) + "\n")
        check_golden(listing, "report_seed7_n300/_files.txt")
        for name in names:
            check_golden(report_dir / name, f"report_seed7_n300/{name}")

    def test_roc_endpoints(self, report_dir):
        rocs = [p for p in report_dir.iterdir() if "_roc_" in p.name]
        assert len(rocs) == 4 + 4
        for p in rocs:
            lines = p.read_text().splitlines()
            assert lines[0] == "0\t0" and lines[-1] == "1\t1", p.name

    def test_membership_overlay_anchors(self, small, report_dir):
        for f, a, b in load(small / "model.json").fuzzy.entries:
            # x values are written to 10 significant digits
            text = (report_dir / f"fig4_membership_{f}.tsv").read_text()
            pairs = dict(line.split("\t") for line in text.splitlines())
            assert pairs[f"{a:.10g}"] == "0" and pairs[f"{b:.10g}"] == "1"

    def test_fig7_dominance(self, tmp_path_factory):
        d = tmp_path_factory.mktemp("fig7")
        assert run("synth", "--seed", 3, "--n-companies", 3000, "--coverage", 0.6, "--out", d) == 0
        assert run("fit", "--statements", d / "statements.csv", "--defaults", d / "defaults.csv",
                   "--use-paper-anchors", "--use-paper-coefficients", "--out", d) == 0
        assert run("report", "--model", d / "model.json", "--statements", d / "statements.csv",
                   "--defaults", d / "defaults.csv", "--ratings", d / "ratings.csv", "--out", d) == 0
        samples = {}
        for grade in ("BBB", "BB", "B", "CCC-C"):
            pairs = [tuple(map(float, l.split("\t"))) for l in (d / f"fig7_ecdf_{grade}.tsv").read_text().splitlines()]
            samples[grade] = pairs
        deciles = np.linspace(0.1, 0.9, 9)

        def quantile(pairs, q):
            return next(x for x, f in pairs if f >= q)

        order = ["BBB", "BB", "B", "CCC-C"]
        for safer, riskier in zip(order, order[1:]):
            for q in deciles:
                assert quantile(samples[safer], q) >= quantile(samples[riskier], q), (safer, riskier, q)

    def test_without_ratings_skips_fig7(self, small, tmp_path, caplog):
        assert run("report", "--model", small / "model.json", "--cases", small / "cases.csv", "--out", tmp_path) == 0
        assert not list(tmp_path.glob("fig7_*"))
        assert "fig7 skipped" in caplog.text


class TestOtherCommands:
    def test_ingest(self, small, tmp_path):
        assert run("ingest", "--statements", small / "statements.csv", "--defaults", small / "defaults.csv",
                   "--ratings", small / "ratings.csv", "--out", tmp_path) == 0
        rows = read_tsv(tmp_path / "predictors.tsv")
        assert rows and {"OK", "EXCLUDED"} >= {r["status"] for r in rows}

    def test_annualize_off_changes_ln_sales(self, small, tmp_path):
        on, off = tmp_path / "on", tmp_path / "off"
        assert run("ingest", "--statements", small / "statements.csv", "--out", on) == 0
        assert run("ingest", "--statements", small / "statements.csv", "--annualize", "off", "--out", off) == 0
        q1 = [(a, b) for a, b in zip(read_tsv(on / "predictors.tsv"), read_tsv(off / "predictors.tsv"))
              if a["period_type"] == "Q1" and a["ln_sales"]]
        assert q1 and all(float(a["ln_sales"]) > float(b["ln_sales"]) for a, b in q1)

    def test_calibrate(self, small, tmp_path):
        assert run("calibrate", "--model", small / "model.json", "--cases", small / "cases.csv",
                   "--ratings", small / "ratings.csv", "--out", tmp_path) == 0
        stats = read_tsv(tmp_path / "grade_statistics.tsv")
        assert [r["grade"] for r in stats] == ["A", "BBB", "BB", "B", "CCC/C", "Defaulted"]
        scale = read_tsv(tmp_path / "internal_scale.tsv")
        assert [r["left"] for r in scale if r["source"] == "published"] == ["2.5", "1.5", "0.4", "0.075", "0"]

    def test_missing_required_inputs(self, small, tmp_path):
        assert run("calibrate", "--cases", small / "cases.csv", "--out", tmp_path) == 2

    def test_score_defaults_to_published_model(self, tmp_path, capsys):
        path = tmp_path / "s.csv"
        # coverage 2 and the other predictors at their published cut-offs: S-Score 0
        write_statements([statement("E", ebit=40.0, sales=math.exp(16.0), retained_earnings=40.0,
                                    equity=200.0, total_liabilities=400.0, assets=1000.0)], path)
        capsys.readouterr()
        assert run("score", "--statements", path) == 0
        row = next(csv.DictReader(io.StringIO(capsys.readouterr().out)))
        assert row["status"] == "OK" and row["s_score"] == "0"

    def test_unreadable_input(self, tmp_path):
        assert run("label", "--statements", tmp_path / "nope.csv", "--defaults", tmp_path / "nope.csv",
                   "--out", tmp_path) == 1

    def test_bad_annualize_value(self, tmp_path):
        with pytest.raises(SystemExit):
            run("ingest", "--statements", "x.csv", "--annualize", "maybe", "--out", tmp_path)
