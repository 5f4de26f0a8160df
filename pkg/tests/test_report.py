import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ssdkit.errors import InvalidParams
from ssdkit.grid import GridSpec
from ssdkit.report import FAIL, NOT_FALSIFIED, PASS, Check, CheckReport


@given(st.floats(allow_nan=False, allow_infinity=True), st.floats(0, 1), st.floats(0, 1))
def test_status_matches_inequality(v, tol, allow):
    c = Check.measure("x", "ref", v, tol, allow)
    assert (c.status == FAIL) == (v > tol + allow)


def test_nan_violation_fails():
    assert Check.measure("x", "ref", float("nan"), 1.0).status == FAIL


def test_not_falsified_status():
    c = Check.measure("x", "ref", 0.0, 0.0, ok_status=NOT_FALSIFIED)
    assert c.status == NOT_FALSIFIED and c.passed


def test_json_sanitizes_non_finite():
    rep = CheckReport("s", seed=42)
    rep.add(Check.measure("a", "r", float("inf"), 0.0, witness=np.array([1.0, 2.0])))
    rep.add(Check.skipped("b", "r", "why"))
    d = json.loads(rep.to_json())
    assert d["checks"][0]["max_violation"] == "inf"
    assert d["checks"][1]["max_violation"] is None
    assert d["checks"][0]["witness"] == [1.0, 2.0]
    assert d["summary"] == {PASS: 0, FAIL: 1, NOT_FALSIFIED: 0, "skipped": 1, "total": 2}
    assert "wall_time" not in json.loads(rep.to_json(include_wall_time=False))


def test_prefix_extend_and_lookup():
    a, b = CheckReport("a"), CheckReport("b")
    b.add(Check.measure("row", "r", 0.0, 1.0))
    a.extend(b, prefix="suite")
    assert a["suite.row"].passed
    with pytest.raises(KeyError):
        a["row"]


def test_grid_basics():
    g = GridSpec.from_bounds([(-1, 1, 5), (0, 2, 3)])
    assert g.shape == (5, 3) and g.size == 15
    assert g.nodes()[1].tolist() == [-1.0, 1.0]  # last axis fastest
    assert g.locate([0.5, 2.0]) == 3 * 3 + 2
    assert g.locate([0.3, 2.0]) is None
    assert GridSpec.parse_header(g.header()) == g
    assert g.interior_mask().sum() == 3
    assert g.h == pytest.approx(1.0)
    assert g.diameter == pytest.approx(math.hypot(2, 2))
    with pytest.raises(InvalidParams):
        GridSpec.from_bounds([(1, 1, 5)])
    with pytest.raises(InvalidParams):
        GridSpec.from_bounds([(0, 1, 1)])
    with pytest.raises(InvalidParams):
        GridSpec.parse_header("no header")
