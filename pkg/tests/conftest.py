import itertools
from collections import defaultdict

import pytest
from hypothesis import strategies as st

from synlab.automaton import Dfa

_criteria = defaultdict(list)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    for mark_name, value in report.user_properties:
        if mark_name == "criterion":
            _criteria[value].append(report.outcome == "passed")


@pytest.hookimpl(tryfirst=True)
def pytest_runtest_setup(item):
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        item.user_properties.append(("criterion", mark.args[0]))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        verdict = "PASS" if all(_criteria[number]) else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d}: {verdict}")


@st.composite
def dfas(draw, max_states=7, max_letters=3, min_states=1):
    n = draw(st.integers(min_states, max_states))
    k = draw(st.integers(1, max_letters))
    rows = draw(st.lists(st.lists(st.integers(0, n - 1), min_size=k, max_size=k), min_size=n, max_size=n))
    return Dfa(n, k, tuple(map(tuple, rows)))


def words_of_length(n_letters, length):
    return itertools.product(range(n_letters), repeat=length)


def brute_force_syn(dfa, start=None, max_len=10):
    """Length of a shortest word collapsing ``start`` (default: all states), by enumeration."""
    start = range(dfa.n_states) if start is None else start
    for length in range(max_len + 1):
        for w in words_of_length(dfa.n_letters, length):
            states = set(start)
            for a in w:
                states = {dfa.delta[q][a] for q in states}
            if len(states) == 1:
                return length
    return None
