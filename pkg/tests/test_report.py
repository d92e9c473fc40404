from __future__ import annotations

import json
import math

import numpy as np
from hypothesis import given, strategies as st

from heintze.report import CheckResult, SuiteReport, canonical_json, emit, parse_json


def test_empty_report_csv_is_header_only():
    assert emit(SuiteReport(), "csv") == b"check,status,value,witness,seconds\n"


def test_one_row():
    r = SuiteReport([CheckResult("x", "pass", 1.5, {"k": np.int64(2)})])
    lines = emit(r, "csv").decode().splitlines()
    assert lines[1] == 'x,pass,1.500000000000e+00,"{""k"":2}",'
    assert r.exit_code == 0
    r.add(CheckResult("y", "fail", None))
    assert r.exit_code == 1


def test_canonical_json_format():
    assert canonical_json({"b": 1.0, "a": [math.inf, -math.inf, math.nan, 2, True, None]}) == \
        '{"a":["inf","-inf","nan",2,true,null],"b":1.000000000000e+00}'


floats = st.floats(allow_nan=True, allow_infinity=True)
values = st.recursive(st.none() | st.booleans() | floats | st.text(max_size=5) | st.integers(-10, 10),
                      lambda ch: st.lists(ch, max_size=3) | st.dictionaries(st.text(max_size=3), ch, max_size=3),
                      max_leaves=8)


@given(st.lists(st.tuples(st.text(min_size=1, max_size=6), st.sampled_from(["pass", "fail", "inconclusive"]),
                          values, values), max_size=4))
def test_parse_emit_fixpoint(rows):
    rep = SuiteReport([CheckResult(n, s, v, w) for n, s, v, w in rows])
    data = emit(rep)
    assert json.loads(data)["status"] == ("fail" if rep.failed else "pass")
    assert emit(parse_json(data)) == data
