from __future__ import annotations

from fractions import Fraction

import pytest

from presque.grid import make_grid


def F(x) -> Fraction:
    return Fraction(str(x))


@pytest.fixture
def grid05():
    return make_grid("0.05")


@pytest.fixture
def grid10():
    return make_grid("0.1")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion."""
    lines = []
    for status in ("passed", "failed", "skipped"):
        for rep in terminalreporter.stats.get(status, []):
            if getattr(rep, "when", "call") != "call" and status != "skipped":
                continue
            keywords = getattr(rep, "keywords", {})
            if "acceptance" in keywords:
                name = rep.nodeid.split("::")[-1]
                lines.append((name, status.upper()))
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for name, status in sorted(set(lines)):
            terminalreporter.write_line(f"{status:8s} {name}")
