"""One line per acceptance criterion; every comparison is exact (tolerance 0).

The hierarchy criterion additionally has a 10 s runtime budget.
"""
import pytest

from ctdmu.regress import CHECKS, run

_RESULTS = {}


def _result(number):
    if number not in _RESULTS:
        (_RESULTS[number],) = run(only={number})
    return _RESULTS[number]


@pytest.mark.parametrize("number", [c[0] for c in CHECKS], ids=[f"c{c[0]:02d}" for c in CHECKS])
def test_criterion(number, capsys):
    res = _result(number)
    with capsys.disabled():
        print("\n" + res.line())
    assert res.passed, res.detail
