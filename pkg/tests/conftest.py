import statistics
import time

import pytest

_ACCEPTANCE_LINES = []


class Criterion:
    """Times one acceptance criterion and records a single pass/fail line for it."""

    def __init__(self, number, title, budget):
        self.number, self.title, self.budget = number, title, budget
        self.start = time.perf_counter()
        self.median = None

    def latency(self, fn, repeats=101):
        """Call fn repeatedly and record the median wall time of one call as the elapsed time."""
        times = []
        for _ in range(repeats):
            t0 = time.perf_counter()
            value = fn()
            times.append(time.perf_counter() - t0)
        self.median = statistics.median(times)
        return value

    def finish(self, ok, detail=""):
        elapsed = self.median if self.median is not None else time.perf_counter() - self.start
        ok = bool(ok) and elapsed < self.budget
        line = (f"[{'PASS' if ok else 'FAIL'}] criterion {self.number:>2}: {self.title} "
                f"({elapsed:.3g}s, budget {self.budget:g}s) {detail}").rstrip()
        print(line)
        _ACCEPTANCE_LINES.append(line)
        return elapsed


@pytest.fixture
def criterion():
    return Criterion


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion")[1].split(":")[0])):
            terminalreporter.write_line(line)
