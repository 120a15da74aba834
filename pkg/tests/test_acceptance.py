"""Every acceptance criterion at its stated tolerance, one line per criterion.

Criteria that the model cannot meet fail here on purpose; the measured
value in the printed line says by how much.
"""
import pytest

from forerunner.acceptance import SUITES, run_check

CHECKS = [(suite, check) for suite, checks in SUITES.items() for check in checks]


@pytest.mark.slow
@pytest.mark.parametrize("suite,check", CHECKS, ids=[f"{s}-{c.__name__}" for s, c in CHECKS])
def test_criterion(suite, check, capsys):
    result = run_check(check)
    with capsys.disabled():
        print(f"\n{result.line()}")
    assert result.passed, result.line()
