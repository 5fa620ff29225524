import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import random_state
from nematic2d.checkpoint import (MAGIC, CsvSink, decode_state, encode_state, fmt, read_checkpoint,
                                  read_csv, write_checkpoint)
from nematic2d.spectral import Grid


def test_round_trip_is_bitwise(tmp_path):
    s = random_state(16, seed=2)
    s.t = 0.125
    path = tmp_path / "sub" / "state.els"
    write_checkpoint(path, s)
    back = read_checkpoint(path)
    assert np.array_equal(back.u, s.u) and np.array_equal(back.d, s.d)
    assert back.t == s.t and back.grid.n == 16 and back.grid.length == s.grid.length
    assert path.stat().st_size == 4 + 8 + 8 + 8 + 8 * 5 * 16 * 16


def test_header_layout():
    s = random_state(8, seed=0)
    blob = encode_state(s)
    assert blob[:4] == MAGIC
    assert int.from_bytes(blob[4:12], "little") == 8
    assert np.frombuffer(blob[28:36], "<f8")[0] == s.u[0, 0, 0]


def test_bad_magic_and_size():
    blob = encode_state(random_state(8, seed=0))
    with pytest.raises(ValueError, match="magic"):
        decode_state(b"XXXX" + blob[4:])
    with pytest.raises(ValueError, match="size"):
        decode_state(blob[:-8])


@given(st.floats(allow_nan=False, allow_infinity=True))
def test_fmt_round_trips_doubles(x):
    assert float(fmt(x)) == x


def test_fmt_types():
    assert fmt(True) == "1" and fmt(np.bool_(False)) == "0"
    assert fmt(7) == "7" and fmt("a") == "a"
    assert fmt(0.1) == "0.10000000000000001"


def test_csv_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    data = rng.standard_normal((5, 2))
    path = tmp_path / "series.csv"
    with CsvSink(path, ("x", "y", "label")) as sink:
        for i, (x, y) in enumerate(data):
            sink.append((x, y, f"r{i}"))
    assert sink.rows == 5
    cols = read_csv(path)
    assert np.array_equal(cols["x"], data[:, 0]) and np.array_equal(cols["y"], data[:, 1])
    assert cols["label"] == [f"r{i}" for i in range(5)]


def test_grid_of_decoded_state():
    s = random_state(8, seed=0)
    s.grid = Grid(8, 2.5)
    assert decode_state(encode_state(s)).grid.length == 2.5
