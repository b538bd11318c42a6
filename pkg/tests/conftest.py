from fractions import Fraction

import numpy as np
import pytest

from ldcodec.scheme import SchemeParams


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def tiny_params():
    """Hand-sized scheme: 5-bit subblocks, 4 per block, 5 blocks."""
    return SchemeParams(100, Fraction(1, 10), Fraction(3, 10), b0=5, w0=1, b1=20, beta=2)


@pytest.fixture(scope="session")
def small_params():
    # what derive_params(4096, 0.05, 0.3) returns, pinned so tests stay fast
    return SchemeParams(4096, Fraction(1, 20), Fraction(3, 10), b0=24, w0=4, b1=2064, beta=8)


_results: dict[int, list] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    crit = item.get_closest_marker("criterion")
    if crit is None or rep.when != "call" and rep.passed:
        return
    number, title = crit.args
    entry = _results.setdefault(number, [title, True, 0.0])
    entry[1] = entry[1] and rep.passed
    entry[2] += rep.duration


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_results):
        title, ok, secs = _results[number]
        verdict = "PASS" if ok else "FAIL"
        terminalreporter.write_line(f"criterion {number:>2}  {verdict}  {title}  ({secs:.1f}s)")
