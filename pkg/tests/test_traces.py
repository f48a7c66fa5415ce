import logging

import numpy as np
import pytest

from sagin_dro.traces import (
    BUNDLED_CV, BUNDLED_LEVEL, TraceFormatError, bundled_trace_path, ingest_trace, read_metadata,
    synth_metadata, synth_trace, write_trace,
)


def test_per_minute_aggregation(tmp_path):
    f = tmp_path / "t.csv"
    f.write_text("timestamp,demand\n0,5e6\n0,5e6\n1,2e6\n")
    assert ingest_trace(f, 0.1) == pytest.approx([1e6, 2e5])


def test_empty_file_warns(tmp_path, caplog):
    f = tmp_path / "e.csv"
    f.write_text("")
    with caplog.at_level(logging.WARNING):
        assert ingest_trace(f) == []
    assert "no records" in caplog.text


@pytest.mark.parametrize("body,line", [
    ("timestamp,demand\n0,1\n1,abc\n", 3),
    ("timestamp,demand\n0,1\n1,2,3\n", 3),
    ("timestamp,demand\n0,-4\n", 2),
    ("timestamp,demand\n5,1\n4,1\n", 3),
    ("timestamp,demand\n0.5,1\n", 2),
])
def test_malformed_rows_report_line(tmp_path, body, line):
    f = tmp_path / "bad.csv"
    f.write_text(body)
    with pytest.raises(TraceFormatError) as err:
        ingest_trace(f)
    assert err.value.line == line
    assert f":{line}:" in str(err.value)


def test_fraction_bounds(tmp_path):
    f = tmp_path / "t.csv"
    f.write_text("0,1\n")
    with pytest.raises(ValueError):
        ingest_trace(f, 0.0)
    with pytest.raises(ValueError):
        ingest_trace(f, 1.5)


def test_synth_constant_and_deterministic():
    recs = synth_trace(3, 10, 4e9, 0.0)
    assert [r.demand for r in recs] == [4e9] * 10
    assert synth_trace(9, 50, 1e9, 0.8) == synth_trace(9, 50, 1e9, 0.8)
    assert synth_trace(9, 50, 1e9, 0.8) != synth_trace(10, 50, 1e9, 0.8)


def test_synth_mean():
    d = np.array([r.demand for r in synth_trace(1, 10_000, 2e9, 0.6)])
    assert abs(d.mean() / 2e9 - 1) < 0.02
    assert np.all(d >= 0)


def test_round_trip_with_metadata(tmp_path):
    recs = synth_trace(4, 20, 1e9, 0.5)
    meta = synth_metadata(4, 20, 1e9, 0.5)
    f = tmp_path / "s.csv"
    write_trace(f, recs, meta)
    assert read_metadata(f)["marginal"] == "gamma"
    assert ingest_trace(f, 1.0) == [r.demand for r in recs]


def test_bundled_traces():
    day = ingest_trace(bundled_trace_path(day_only=True))
    full = ingest_trace(bundled_trace_path())
    assert len(day) == 300 and len(full) == 2400
    assert day == full[:300]
    meta = read_metadata(bundled_trace_path())
    assert float(meta["mean_bits"]) == BUNDLED_LEVEL and float(meta["cv"]) == BUNDLED_CV
