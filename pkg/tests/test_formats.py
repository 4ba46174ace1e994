"""Tests for JSON, CSV and PGM formats."""

import json

import numpy as np
import pytest

from src.core.grid import IMAGE, FieldGrid, GridSpec, fresnel_plane
from src.core.mode_index import ModeIndex
from src.core.zernike import ZernikeExpansion
from src.errors import FormatError, InvalidMode
from src.formats import (
    CSV_HEADER,
    atomic_write,
    config_hash,
    grid_to_csv,
    grid_to_pgm,
    read_expansion,
    read_grid_csv,
    read_json,
    state_from_dict,
    state_to_dict,
    write_config_echo,
    write_expansion,
    write_grid,
    write_grid_csv,
)
from src.quantum.spdc import spdc_zeta


def _grid(plane: str = IMAGE) -> FieldGrid:
    samples = np.array([[1.0 + 2.0j, 0.1], [-3.5, 1.0 / 3.0 - 1e-20j], [0.0, 2.0j]])
    return FieldGrid(GridSpec(2, 3, 1.5, 2.0), samples, plane)


def test_atomic_write_creates_parents_and_leaves_no_temp(tmp_path):
    target = tmp_path / "a" / "b" / "out.txt"
    atomic_write(target, "hello\n")
    assert target.read_text() == "hello\n"
    assert [p.name for p in target.parent.iterdir()] == ["out.txt"]


def test_read_json_rejects_garbage(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(FormatError):
        read_json(path)


def test_config_hash_is_order_independent():
    assert config_hash({"a": 1, "b": [1, 2]}) == config_hash({"b": [1, 2], "a": 1})
    assert config_hash({"a": 1}) != config_hash({"a": 2})


def test_config_echo(tmp_path):
    path = write_config_echo(tmp_path / "run", "eval", {"n": 2, "m": 0})
    assert path.name == "run.config.json"
    payload = json.loads(path.read_text())
    assert payload["command"] == "eval"
    assert payload["flags"] == {"n": 2, "m": 0}
    assert payload["config_hash"] == config_hash({"n": 2, "m": 0})


def test_expansion_file(tmp_path):
    exp = ZernikeExpansion({ModeIndex(0, 0): 0.1 + 0.2j, ModeIndex(3, -1): -1.0 / 3.0}, 3)
    path = write_expansion(tmp_path / "exp.json", exp, {"command": "fit"})
    payload = json.loads(path.read_text())
    assert payload["provenance"] == {"command": "fit"}
    assert payload["coefficients"][0] == {"n": 0, "m": 0, "re": 0.1, "im": 0.2}
    loaded = read_expansion(path)
    assert loaded.n_max == 3
    assert loaded.coefficients == exp.coefficients


def test_expansion_file_errors(tmp_path):
    bad_mode = tmp_path / "mode.json"
    bad_mode.write_text(json.dumps({"n_max": 2, "coefficients": [{"n": 2, "m": 1, "re": 1.0, "im": 0.0}]}))
    with pytest.raises(InvalidMode):
        read_expansion(bad_mode)
    missing = tmp_path / "missing.json"
    missing.write_text(json.dumps({"coefficients": []}))
    with pytest.raises(FormatError):
        read_expansion(missing)


def test_state_payload():
    state = spdc_zeta(ZernikeExpansion.single(ModeIndex(0, 0)), 2)
    payload = state_to_dict(state)
    assert len(payload["entries"]) == 6
    restored = state_from_dict(json.loads(json.dumps(payload)))
    assert np.array_equal(restored.zeta, state.zeta)
    assert restored.raw_norm == state.raw_norm


def test_csv_layout():
    text = grid_to_csv(_grid())
    lines = text.splitlines()
    assert lines[0] == CSV_HEADER
    assert lines[1] == "# 2,3,1.5,2,image"
    assert lines[2] == "0,0,1,2"
    assert lines[3] == "1,0,0.10000000000000001,0"
    assert lines[6] == "0,2,0,0"
    assert len(lines) == 2 + 6


def test_csv_file_reads_back_exactly(tmp_path):
    grid = _grid(fresnel_plane(0.25))
    loaded = read_grid_csv(write_grid_csv(tmp_path / "g.csv", grid))
    assert loaded.spec == grid.spec
    assert loaded.plane == "fresnel(z=0.25)"
    assert np.array_equal(loaded.samples, grid.samples)


def test_csv_errors(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("x,y\n1,2\n")
    with pytest.raises(FormatError):
        read_grid_csv(path)
    lines = grid_to_csv(_grid()).splitlines()
    path.write_text("\n".join(lines[:-1]) + "\n")
    with pytest.raises(FormatError):
        read_grid_csv(path)


def test_pgm_header_and_orientation():
    samples = np.zeros((2, 3), dtype=complex)
    samples[1, 2] = 2.0
    samples[0, 0] = 1.0
    data = grid_to_pgm(FieldGrid(GridSpec(3, 2, 1.0, 1.0), samples))
    header = b"P5\n3 2\n65535\n"
    assert data.startswith(header)
    pixels = np.frombuffer(data[len(header):], dtype=">u2").reshape(2, 3)
    # +y row is written first
    assert pixels[0, 2] == 65535
    assert pixels[1, 0] == 16384
    assert pixels[0, 0] == 0


def test_pgm_of_constant_field_is_black():
    grid = FieldGrid(GridSpec(2, 2, 1.0, 1.0), np.ones((2, 2), dtype=complex))
    data = grid_to_pgm(grid)
    assert data.endswith(b"\x00" * 8)


def test_write_grid_formats(tmp_path):
    paths = write_grid(tmp_path / "out", _grid(), ["csv", "pgm"])
    assert [p.name for p in paths] == ["out.csv", "out.pgm"]
    with pytest.raises(FormatError):
        write_grid(tmp_path / "out", _grid(), ["png"])
