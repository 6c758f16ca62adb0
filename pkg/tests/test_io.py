import json

import numpy as np
import pytest

from wgqed.io import (format_float, load_config, read_columns, sha256_file,
                      write_columns, write_manifest, write_result,
                      write_structured)


@pytest.fixture(autouse=True)
def frozen_clock(monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")


def test_float_formatting_round_trips():
    for x in (0.1, 1.0 / 3.0, 1e-300, 123456789.123456789, -0.0):
        assert float(format_float(x)) == x


def test_columns_round_trip(tmp_path):
    path = tmp_path / "scan.dat"
    deltas = np.linspace(-3.0, 3.0, 11)
    T = 1.0 / (1.0 + deltas ** 2)
    write_columns(path, ["delta", "T"], [deltas, T],
                  meta={"seed": 7, "theta": np.pi},
                  units={"delta": "Gamma0"})
    data, meta = read_columns(path)
    assert np.array_equal(data["delta"], deltas)
    assert np.array_equal(data["T"], T)
    assert meta["seed"] == 7
    assert meta["theta"] == np.pi


def test_rewrite_is_byte_identical(tmp_path):
    a = tmp_path / "a.dat"
    b = tmp_path / "b.dat"
    rng = np.random.default_rng(0)
    cols = [rng.normal(size=20), rng.exponential(size=20)]
    write_columns(a, ["x", "y"], cols, meta={"m": 100})
    data, meta = read_columns(a)
    write_columns(b, ["x", "y"], [data["x"], data["y"]], meta=meta)
    assert a.read_bytes() == b.read_bytes()


def test_header_carries_units_and_version(tmp_path):
    path = tmp_path / "out.dat"
    write_columns(path, ["tau", "g2"], [[0.0], [1.5]],
                  units={"tau": "1/Gamma0"})
    head = path.read_text().splitlines()
    assert head[0].startswith("# wgqed ")
    assert head[1] == "# generated: 2023-11-14T22:13:20+00:00"
    assert "# columns: tau(1/Gamma0) g2(1)" in head


def test_column_validation(tmp_path):
    with pytest.raises(ValueError):
        write_columns(tmp_path / "x.dat", ["a"], [[1.0], [2.0]])
    with pytest.raises(ValueError):
        write_columns(tmp_path / "x.dat", ["a", "b"], [[1.0], [2.0, 3.0]])


def test_structured_format_parses_back(tmp_path):
    path = tmp_path / "scan.json"
    write_structured(path, ["delta", "T"], [[0.0, 1.0], [0.5, 0.25]],
                     meta={"seed": 3})
    payload = json.loads(path.read_text())
    assert payload["columns"]["T"] == [0.5, 0.25]
    assert payload["meta"]["seed"] == 3
    assert payload["generator"].startswith("wgqed")


def test_result_dispatch(tmp_path):
    write_result(tmp_path / "a.dat", ["x"], [[1.0]], fmt="columns")
    write_result(tmp_path / "a.json", ["x"], [[1.0]], fmt="structured")
    assert json.loads((tmp_path / "a.json").read_text())["columns"]["x"] == [1.0]
    with pytest.raises(ValueError):
        write_result(tmp_path / "a.xml", ["x"], [[1.0]], fmt="xml")


def test_manifest_hashes_outputs(tmp_path):
    out = tmp_path / "scan.dat"
    write_columns(out, ["x"], [[1.0, 2.0]])
    digest = sha256_file(out)
    assert len(digest) == 64
    manifest = tmp_path / "manifest.json"
    write_manifest(manifest, [{"job": "scan", "file": "scan.dat",
                               "sha256": digest}])
    payload = json.loads(manifest.read_text())
    assert payload["jobs"][0]["sha256"] == digest


def test_config_loading(tmp_path):
    j = tmp_path / "run.json"
    j.write_text('{"jobs": [{"kind": "spectrum"}], "seed": 5}')
    assert load_config(j)["seed"] == 5
    y = tmp_path / "run.yaml"
    y.write_text("jobs:\n  - kind: spectrum\nseed: 5\n")
    assert load_config(y) == load_config(j)
    # suffix-less files fall back to trying both parsers
    anon = tmp_path / "run.cfg"
    anon.write_text("seed: 9\n")
    assert load_config(anon)["seed"] == 9


def test_timestamp_honours_epoch_override(tmp_path, monkeypatch):
    a = tmp_path / "a.dat"
    b = tmp_path / "b.dat"
    write_columns(a, ["x"], [[1.0]])
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000001")
    write_columns(b, ["x"], [[1.0]])
    assert a.read_bytes() != b.read_bytes()
