from __future__ import annotations

import random
from fractions import Fraction

import pytest

from qgauss.hilbert import CovarianceSpec, GramSpace, NotPSDError

Q_SWEEP = tuple(map(Fraction, ("-1/2", "0", "1/2", "9/10")))

_acceptance: dict[int, dict] = {}


def random_gram(rng: random.Random, dim: int = 3, denom: int = 7) -> GramSpace:
    """Random rational Gram matrix ``B^T B`` (always PSD) with small entries."""
    b = [[Fraction(rng.randint(-denom, denom), denom) for _ in range(dim)] for _ in range(dim)]
    gram = [[sum(b[k][i] * b[k][j] for k in range(dim)) for j in range(dim)] for i in range(dim)]
    return GramSpace(tuple(map(tuple, gram)))


def random_triplet(rng: random.Random, denom: int = 10) -> CovarianceSpec:
    """Random standardized PSD triplet covariance with ``<f,h>^2 != 1``."""
    while True:
        fg, gh, fh = (Fraction(rng.randint(1 - denom, denom - 1), denom) for _ in range(3))
        try:
            return CovarianceSpec.triplet(fg, gh, fh)
        except NotPSDError:
            continue


@pytest.fixture
def rng() -> random.Random:
    return random.Random(20010101)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None or (report.when != "call" and not report.failed):
        return
    number, title = marker.args
    entry = _acceptance.setdefault(number, {"title": title, "passed": 0, "failed": []})
    if report.failed:
        entry["failed"].append(item.name)
    elif report.when == "call":
        entry["passed"] += 1


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_acceptance):
        entry = _acceptance[number]
        status = "FAIL" if entry["failed"] else "PASS"
        detail = f"{entry['passed']} passed"
        if entry["failed"]:
            detail += f", {len(entry['failed'])} failed: " + ", ".join(entry["failed"])
        terminalreporter.write_line(f"[{status}] criterion {number}: {entry['title']} ({detail})")
