import csv
import json
from pathlib import Path

import pytest

from fbl.cli import main
from fbl.config import ConfigError, parse_config, serialize

ROOT = Path(__file__).resolve().parents[1]

ONEWAY = {
    "problem": "oneway",
    "x": {"interior": [-5.0, 5.0], "right": {"length": 1.0, "pen_len": 0.5, "slope": 20.0}, "P": 120},
    "tau": 0.01,
    "T": 1.0,
    "snapshot_times": [0.5, 1.0],
}

WAVE2D = {
    "problem": "wave2d",
    "x": {
        "interior": [-2.0, 2.0],
        "left": {"length": 0.5, "pen_len": 0.25, "slope": 20.0},
        "right": {"length": 0.5, "pen_len": 0.25, "slope": 20.0},
        "P": 40,
    },
    "y": {
        "interior": [-2.0, 2.0],
        "left": {"length": 0.5, "pen_len": 0.25, "slope": 20.0},
        "right": {"length": 0.5, "pen_len": 0.25, "slope": 20.0},
        "P": 40,
    },
    "initial": {"center": [0.0, 0.0], "width": 0.4472135954999579},
    "tau": 1e-05,
    "T": 0.002,
    "snapshot_times": [0.002],
    "reference": {"kind": "big-domain-2d", "big_bounds": [-5.0, 5.0]},
}


def write(tmp_path, data, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(data))
    return p


def read_csv(path):
    with open(path) as fh:
        return list(csv.reader(fh))


def test_defaults_and_round_trip():
    cfg = parse_config(json.dumps(ONEWAY))
    assert cfg.epsilon == 1e-5
    assert cfg.method == "fbl"
    assert parse_config(serialize(cfg)) == cfg


def test_shipped_configs_parse():
    for name in ("oneway.json", "wave1d.json", "wave2d.json"):
        parse_config((ROOT / "configs" / name).read_text())


def test_pen_len_schema_error():
    data = json.loads(json.dumps(ONEWAY))
    data["x"]["right"]["pen_len"] = 1.0
    with pytest.raises(ConfigError) as exc:
        parse_config(json.dumps(data))
    assert exc.value.kind == "schema"
    assert "pen_len" in str(exc.value)


def test_unknown_key_rejected():
    with pytest.raises(ConfigError) as exc:
        parse_config(json.dumps({**ONEWAY, "bogus": 1}))
    assert exc.value.kind == "schema"


def test_parse_error_has_position():
    with pytest.raises(ConfigError) as exc:
        parse_config('{"problem": "oneway",\n  "x": }')
    assert exc.value.kind == "parse"
    assert "line 2" in str(exc.value)


def test_profile_validation_error():
    data = json.loads(json.dumps(ONEWAY))
    data["x"]["right"]["pen_len"] = 0.1
    with pytest.raises(ConfigError) as exc:
        parse_config(json.dumps(data))
    assert exc.value.kind == "validation"
    assert "diffusion" in str(exc.value)


def test_boundary_data_validation_error():
    data = {**ONEWAY, "initial": {"center": [-4.0], "width": 1.0}}
    with pytest.raises(ConfigError) as exc:
        parse_config(json.dumps(data))
    assert "boundary" in str(exc.value)


def test_cli_oneway_outputs(tmp_path):
    out = tmp_path / "run"
    assert main(["oneway", "--config", str(write(tmp_path, ONEWAY)), "--out", str(out)]) == 0
    rows = read_csv(out / "snapshot_t1.csv")
    assert rows[0] == ["x", "u_num", "u_ref", "abs_err"]
    assert len(rows) == 120
    errs = read_csv(out / "errors.csv")
    assert errs[0] == ["t", "linf_interior"] and len(errs) == 3
    manifest = json.loads((out / "manifest.json").read_text())
    assert {"config", "versions", "wall_time_s", "result"} <= set(manifest)


def test_cli_snapshot_override(tmp_path):
    out = tmp_path / "run"
    assert main(["oneway", "--config", str(write(tmp_path, ONEWAY)), "--out", str(out), "--snapshots", "0.2"]) == 0
    assert (out / "snapshot_t0.2.csv").exists()
    assert len(read_csv(out / "errors.csv")) == 2


def test_cli_prefine_rows(tmp_path):
    data = {**ONEWAY, "P_list": [40, 60, 80, 100, 120]}
    out = tmp_path / "run"
    assert main(["prefine", "--config", str(write(tmp_path, data)), "--out", str(out)]) == 0
    rows = read_csv(out / "prefine.csv")
    assert rows[0] == ["P", "linf"]
    assert [int(r[0]) for r in rows[1:]] == [40, 60, 80, 100, 120]


def test_cli_bad_json_exit_code(tmp_path):
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    out = tmp_path / "run"
    assert main(["oneway", "--config", str(p), "--out", str(out)]) == 1
    assert "line 1" in (out / "error.txt").read_text()


def test_cli_missing_file_exit_code(tmp_path):
    assert main(["oneway", "--config", str(tmp_path / "nope.json"), "--out", str(tmp_path / "o")]) == 1


def test_cli_problem_mismatch(tmp_path):
    assert main(["wave1d", "--config", str(write(tmp_path, ONEWAY)), "--out", str(tmp_path / "o")]) == 1


def test_cli_wave2d_pml2(tmp_path):
    out = tmp_path / "run"
    assert main(["wave2d", "--config", str(write(tmp_path, WAVE2D)), "--out", str(out), "--method", "pml2"]) == 0
    snap = read_csv(out / "snapshot_t0.002.csv")
    assert snap[0] == ["x", "y", "u_num"]
    assert len(snap) == 1 + 39 * 39
    assert read_csv(out / "reference_t0.002.csv")[0] == ["x", "y", "u_ref"]
    errs = read_csv(out / "errors.csv")
    assert float(errs[1][1]) <= 1e-3
