"""Shared fixtures and the acceptance-criteria summary printed after the run."""

from __future__ import annotations

import numpy as np
import pytest

ACCEPTANCE_RESULTS: dict[str, tuple[str, str]] = {}


def record_acceptance(key: str, passed, detail: str) -> None:
    """``passed`` is True, False, or None for a criterion that was skipped."""
    status = "SKIP" if passed is None else ("PASS" if passed else "FAIL")
    ACCEPTANCE_RESULTS[key] = (status, detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_RESULTS):
        status, detail = ACCEPTANCE_RESULTS[key]
        terminalreporter.write_line(f"{key}: {status}  {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def corpus():
    from sketchmatch.synthetic import make_corpus
    return make_corpus(40, seed=0)
