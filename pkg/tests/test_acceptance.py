"""Acceptance criteria 1..11.  Prints one PASS/FAIL line per criterion.

Criteria 4, 6 and 9 are expected to fail on published values that do not hold
(see the project decisions ledger); they are not marked xfail so the report
stays honest."""
import pytest

from artifact import suite

_results = {}


def _get(k):
    if k not in _results:
        _results[k] = suite.CRITERIA[k]() if k != 7 else suite.criterion_7(False)
    return _results[k]


@pytest.mark.parametrize("k", range(1, 12))
def test_criterion(k, capsys):
    c = _get(k)
    line = f"criterion {k:2d} [{'PASS' if c.passed else 'FAIL'}] {c.title}"
    if not c.passed:
        line += "  failing: " + "; ".join(c.failing())
    with capsys.disabled():
        print("\n" + line)
    assert c.passed, line


@pytest.mark.slow
def test_so8_spinor_rrr(capsys):
    c = suite.criterion_7(include_so8_rrr=True)
    so8 = [ch for ch in c.checks if "so(8)" in ch.name and ch.name.startswith("RRR")]
    assert so8 and all(ch.passed for ch in so8)
