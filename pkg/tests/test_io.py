import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from forerunner.io import (
    SpecError,
    dump_kv,
    dumps,
    fmt,
    load_mapping,
    parse_kv,
    read_field_csv,
    read_fixture_table,
    read_times_csv,
    write_field_csv,
    write_fixture_table,
    write_times_csv,
)
from forerunner.features import CharacteristicTimes, Method
from forerunner.source import ComplexField, Provenance


@settings(max_examples=300)
@given(st.floats(allow_nan=False))
def test_fmt_round_trips_every_float(v):
    assert float(fmt(v)) == v


def test_fmt_examples():
    assert fmt(0.1) == "0.10000000000000001"
    assert fmt(1.0) == "1"
    assert fmt(math.inf) == "inf" and fmt(-math.inf) == "-inf" and fmt(math.nan) == "nan"


def test_parse_kv():
    text = """
    # run config
    dx = 0.1
    probes = 10, 20.5     # comma list
    single = 3,
    scheme = split_operator
    flag = true
    """
    d = parse_kv(text)
    assert d == {"dx": 0.1, "probes": [10, 20.5], "single": [3], "scheme": "split_operator", "flag": True}


@pytest.mark.parametrize("text", ["dx 0.1", "dx =", "= 3", "a = 1\na = 2"])
def test_parse_kv_errors(text):
    with pytest.raises(SpecError):
        parse_kv(text)


@settings(max_examples=100)
@given(st.dictionaries(
    st.from_regex(r"[a-z][a-z_0-9]{0,8}", fullmatch=True),
    st.one_of(st.floats(allow_nan=False, allow_infinity=False), st.integers(-10**6, 10**6), st.booleans(),
              st.lists(st.floats(allow_nan=False, allow_infinity=False), min_size=1, max_size=4)),
))
def test_kv_round_trip(mapping):
    back = parse_kv(dump_kv(mapping))
    assert back.keys() == mapping.keys()
    for k, v in mapping.items():
        if isinstance(v, list):
            assert [float(u) for u in back[k]] == v
        else:
            assert back[k] == v


def test_load_mapping_json_and_kv(tmp_path):
    (tmp_path / "a.json").write_text('{"scenario": "sweep", "v1s": [0.1]}')
    (tmp_path / "b.cfg").write_text("scenario = sweep\nv1s = 0.1,\n")
    assert load_mapping(tmp_path / "a.json") == load_mapping(tmp_path / "b.cfg")
    (tmp_path / "c.json").write_text("{broken")
    with pytest.raises(SpecError):
        load_mapping(tmp_path / "c.json")
    with pytest.raises(SpecError):
        load_mapping(tmp_path / "missing.cfg")


def test_dumps_is_sorted_and_exact():
    text = dumps({"b": 0.1, "a": [1, np.float64(2.5)], "c": complex(1, -2), "d": math.inf, "e": Provenance.GRID})
    assert text.index('"a"') < text.index('"b"') < text.index('"c"')
    data = json.loads(text)
    assert data == {"a": [1, 2.5], "b": 0.1, "c": {"im": -2.0, "re": 1.0}, "d": "inf", "e": "grid"}
    assert "0.10000000000000001" in text


def test_field_csv_round_trip(tmp_path):
    vals = np.array([[1 + 2j, 0.5 - 0.25j, 1e-300j], [3.0, -1e10j, 0.1 + 0.2j]])
    f = ComplexField([0.5, 1.5], [0.0, 1.0, 2.0], vals, Provenance.SADDLE)
    path = write_field_csv(f, tmp_path / "f.csv")
    lines = path.read_text().splitlines()
    assert lines[0] == "x,t,re_psi,im_psi,density,provenance"
    # x is the outer loop
    assert [ln.split(",")[0] for ln in lines[1:4]] == ["0.5"] * 3
    back = read_field_csv(path)
    np.testing.assert_array_equal(back.values, f.values)
    np.testing.assert_array_equal(back.x_samples, f.x_samples)
    assert back.provenance is Provenance.SADDLE


def test_times_csv_round_trip(tmp_path):
    rows = [CharacteristicTimes(10.0, 5.0, 6.0, 4.5, math.inf, Method.NUMERIC_EXACT),
            CharacteristicTimes(20.0, 10.0, 12.0, 9.0, 50.0, Method.ANALYTIC_SADDLE)]
    path = write_times_csv(rows, tmp_path / "t.csv")
    assert path.read_text().splitlines()[0] == "x,tau_c,tau_abs,tau_T,plateau,method"
    back = read_times_csv(path)
    assert back[0]["plateau"] == math.inf
    assert back[1]["tau_T"] == 9.0 and back[1]["method"] == "analytic_saddle"


def test_fixture_table_round_trip(tmp_path):
    zs = np.array([0.1 + 2j, -3 - 0.5j])
    ws = np.array([0.3 - 0.1j, 1e-5 + 2j])
    path = write_fixture_table(zs, ws, tmp_path / "w.txt")
    z2, w2 = read_fixture_table(path)
    np.testing.assert_array_equal(z2, zs)
    np.testing.assert_array_equal(w2, ws)
