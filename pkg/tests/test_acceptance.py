"""One test per acceptance criterion; each prints a single pass/fail line."""
import pytest

import conftest
from flatwalk.acceptance import CRITERIA, run_criterion


@pytest.mark.parametrize("number", [c[0] for c in CRITERIA], ids=[f"criterion{c[0]}" for c in CRITERIA])
def test_criterion(number):
    r = run_criterion(number)
    line = r.line()
    conftest.ACCEPTANCE_LINES.append(line)
    print(line)
    assert r.ok, r.detail
