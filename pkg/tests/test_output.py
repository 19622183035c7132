import json
import math

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from pcnkit.output import csv_text, fmt, json_text, vector_csv, write_atomic


def test_fmt():
    assert fmt(None) == ""
    assert fmt(True) == "1" and fmt(np.bool_(False)) == "0"
    assert fmt(np.int64(7)) == "7"
    assert fmt(1 / 3) == "0.333333"
    assert fmt(123456789.0) == "1.23457e+08"
    assert fmt(math.nan) == "nan" and fmt(-math.inf) == "-inf"
    assert fmt("1agd") == "1agd"


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_fmt_keeps_six_significant_digits(v):
    assert math.isclose(float(fmt(v)), v, rel_tol=5e-6, abs_tol=1e-300)


def test_csv_from_dicts_and_tuples():
    text = csv_text(("a", "b"), [{"b": 2.5, "a": 1}, (3, None)])
    assert text == "a,b\n1,2.5\n3,\n"
    assert vector_csv([0.5, 1]) == "node_index,value\n0,0.5\n1,1\n"


def test_json_handles_numpy_and_undefined():
    obj = {1: np.float64(0.5), "v": np.arange(3), "ok": np.bool_(True), "x": math.nan, "t": (1, 2)}
    assert json.loads(json_text(obj)) == {"1": 0.5, "v": [0, 1, 2], "ok": True, "x": None, "t": [1, 2]}


def test_write_atomic(tmp_path):
    target = tmp_path / "deep" / "file.txt"
    write_atomic(target, "one")
    write_atomic(target, b"two")
    assert target.read_bytes() == b"two"
    assert [p.name for p in target.parent.iterdir()] == ["file.txt"]
