"""Acceptance gate: every shipped criterion runs at its stated tolerance.

Each test prints one `criterion N [...]: PASS/FAIL - detail` line (visible
with `pytest -s` or in the captured output of a failing run) and asserts
the criterion passed.  The engine fixture is shared so solver and scan
caches are built once.
"""

import pytest

from beambvp.errors import BeamBVPError
from beambvp.examples import CRITERIA, AcceptanceEngine


@pytest.fixture(scope="module")
def engine():
    return AcceptanceEngine()


@pytest.mark.parametrize(
    "cid,name,func",
    [(cid, name, func) for cid, name, _tags, func in CRITERIA],
    ids=[f"criterion-{cid:02d}" for cid, _, _, _ in CRITERIA],
)
def test_criterion(engine, cid, name, func):
    try:
        passed, detail = func(engine)
    except BeamBVPError as exc:
        passed, detail = False, f"raised {type(exc).__name__}: {exc}"
    print(f"criterion {cid} [{name}]: {'PASS' if passed else 'FAIL'} - {detail}")
    assert passed, f"criterion {cid} [{name}]: {detail}"
