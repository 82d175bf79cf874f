from __future__ import annotations

import re

import pytest

from morphgen.demo import demo_corpus, reference_items


@pytest.fixture(scope="session")
def refs():
    """The 13 built-in reference items, keyed by question type value."""
    return {item.qt.value: item for item in reference_items()}


@pytest.fixture(scope="session")
def pool():
    return demo_corpus()


_CRITERION = re.compile(r"test_c(\d+)([a-z]?)")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One verdict line per acceptance criterion at the end of the run."""
    rows = []
    for status, label in (("passed", "PASS"), ("failed", "FAIL"), ("skipped", "SKIP")):
        for report in terminalreporter.stats.get(status, []):
            if "test_acceptance.py" not in str(report.nodeid):
                continue
            name = report.nodeid.rsplit("::", 1)[-1]
            match = _CRITERION.match(name)
            if not match:
                continue
            rows.append((int(match.group(1)), match.group(2), label, name))
    if not rows:
        return
    terminalreporter.write_sep("-", "acceptance criteria")
    for number, part, label, name in sorted(rows):
        slug = name.split("_", 2)[-1].replace("_", " ")
        terminalreporter.write_line(f"criterion {number}{part}: {label} - {slug}")
