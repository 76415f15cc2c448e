import json
import math

import pytest

from fuzzyscore.calibration import derive_cutoffs
from fuzzyscore.ingestion import label_cases
from fuzzyscore.logit import PUBLISHED_FUZZY_LOGIT, Space, fit_logit
from fuzzyscore.modelfile import VERSION, ModelFile, dumps, load, loads, published_model, save
from fuzzyscore.synthetic import generate_synthetic_dataset


def test_published_round_trip(tmp_path):
    m = published_model()
    path = tmp_path / "m.json"
    save(m, path)
    assert load(path) == m
    assert dumps(load(path)) == dumps(m)


def test_fitted_round_trip_is_lossless():
    cases = label_cases(*generate_synthetic_dataset(4, 600, PUBLISHED_FUZZY_LOGIT))
    base = published_model()
    m = ModelFile(base.cutoffs, base.fuzzy, fit_logit(cases, Space.RAW), fit_logit(cases, Space.FUZZY),
                  derive_cutoffs([("fsBBB", 3), ("fsBB", 2), ("fsB", 1), ("fsCCC/C", 0.15), ("fsD", 0)]),
                  annualize=False, provenance={"seed": 4}, in_sample_gini={"fs_score": 1 / 3})
    back = loads(dumps(m))
    assert back == m
    assert back.logit_raw.beta.tolist() == m.logit_raw.beta.tolist()
    assert back.logit_fuzzy.fit == m.logit_fuzzy.fit
    assert back.rating.buckets[0].right == math.inf
    assert back.in_sample_gini["fs_score"] == 1 / 3


def test_version_checked():
    doc = json.loads(dumps(published_model()))
    doc["version"] = "fuzzyscore-model/0"
    with pytest.raises(ValueError, match="unsupported"):
        loads(json.dumps(doc))
    with pytest.raises(ValueError, match="version"):
        loads("{}")


def test_missing_field():
    doc = json.loads(dumps(published_model()))
    del doc["cutoffs"]
    with pytest.raises(ValueError, match="cutoffs"):
        loads(json.dumps(doc))


def test_space_checked():
    m = published_model()
    with pytest.raises(ValueError, match="RAW"):
        ModelFile(m.cutoffs, m.fuzzy, m.logit_fuzzy, m.logit_fuzzy, m.rating)
    assert json.loads(dumps(m))["version"] == VERSION
