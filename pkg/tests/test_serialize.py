import json

import numpy as np
import pytest

from qmeas import ConfigError, bound_report, family, sweep
from qmeas.serialize import (
    SWEEP_FIELDS,
    decode_matrix,
    dump_measurement,
    encode_matrix,
    fmt,
    load_measurement,
    measurement_from_dict,
    measurement_to_dict,
    report_csv,
    sweep_csv,
)


def test_matrix_round_trip():
    rng = np.random.default_rng(3)
    m = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    again = decode_matrix(encode_matrix(m))
    np.testing.assert_allclose(again, m, atol=0)


def test_decode_rejects_ragged_entries():
    with pytest.raises(ConfigError):
        decode_matrix([[[1.0, 0.0], [0.0]], [[0.0, 0.0], [1.0, 0.0]]])


def test_measurement_file_round_trip(tmp_path):
    m = family(4, 0.36)
    path = tmp_path / "m.json"
    dump_measurement(m, path)
    loaded = load_measurement(path)
    np.testing.assert_allclose(loaded.kraus, m.kraus, atol=1e-15)
    assert loaded.dim == 3

    raw = json.loads(path.read_text())
    assert set(raw) == {"dim", "kraus"}


def test_measurement_dict_validation():
    with pytest.raises(ConfigError):
        measurement_from_dict({"dim": 3})
    with pytest.raises(ConfigError):
        measurement_from_dict({"dim": 2, "kraus": measurement_to_dict(family(0, 0.5))["kraus"]})


def test_load_measurement_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        load_measurement(tmp_path / "nope.json")


def test_fmt_significant_digits():
    assert fmt(1 / 3) == "0.333333333333"
    assert fmt(1.0) == "1"
    assert fmt(0.0) == "0"
    assert fmt(1.81785065223e-06) == "1.81785065223e-06"


def test_sweep_csv_schema():
    rows = sweep(0, [0.0, 1.0])
    text = sweep_csv(rows)
    lines = text.strip().split("\n")
    assert lines[0] == ",".join(SWEEP_FIELDS)
    assert lines[0].startswith("t,p,G,F,R,gap_global")
    first = lines[1].split(",")
    assert first[0] == "0" and first[1] == "0"
    assert first[2] == "0.333333333333"
    # saturation flags serialized as 0/1
    assert set(first[-4:]) <= {"0", "1"}


def test_report_csv_contains_dim():
    text = report_csv(bound_report(family(0, 0.5)))
    header, row = text.strip().split("\n")
    assert header.split(",")[0] == "dim"
    assert row.split(",")[0] == "3"
