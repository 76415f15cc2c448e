import pytest

from fuzzyscore.ingestion import label_cases
from fuzzyscore.logit import PUBLISHED_FUZZY_LOGIT
from fuzzyscore.synthetic import generate_synthetic_dataset

_acceptance_results = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(name): exit criterion, reported in the terminal summary")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    name = report.user_properties and dict(report.user_properties).get("acceptance")
    if name:
        _acceptance_results.append((name, report.outcome))


def pytest_collection_modifyitems(items):
    for item in items:
        marker = item.get_closest_marker("acceptance")
        if marker is not None:
            item.user_properties.append(("acceptance", marker.args[0]))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance_results:
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")


@pytest.fixture(scope="session")
def model_dataset_5000():
    statements, defaults = generate_synthetic_dataset(42, 5000, PUBLISHED_FUZZY_LOGIT)
    return statements, defaults, label_cases(statements, defaults)
