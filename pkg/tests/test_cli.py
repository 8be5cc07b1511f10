"""CLI subcommands, exit codes, artifact formats, fallback parity."""
import csv
import json
import os
import subprocess
import sys

import numpy as np
import pytest

from qctrans.cli import main
from qctrans.export import load_result

_OSC_SMALL = {
    "system": {"type": "oscillator_2d"},
    "mode": "transition",
    "coupling": {"type": "constant", "value": 1.0},
    "ensemble": {"mode": "fixed", "positions": [[1.0, 0.0]], "velocities": [[0.0, 1.0]]},
    "time": {"start": 0.0, "end": 2.0, "n_outputs": 3},
    "output": {"formats": ["csv", "json", "svg"]},
}

_OSC_GUIDANCE = {
    "system": {"type": "oscillator_2d"},
    "mode": "guidance",
    "ensemble": {"mode": "rejection", "n": 3, "seed": 3},
    "time": {"start": 0.0, "end": 2.0, "n_outputs": 11},
    "output": {"formats": ["csv"]},
}

_DS_GUIDANCE = {
    "system": {"type": "double_slit"},
    "mode": "guidance",
    "ensemble": {"mode": "quantile_1d", "n": 4},
    "time": {"start": 0.0, "end": 0.5, "n_outputs": 6},
    "output": {"formats": ["csv"]},
}


def _cfg(tmp_path, doc, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def _read_csv_rows(path):
    with open(path, encoding="utf-8") as fh:
        lines = [ln for ln in fh.read().splitlines() if ln]
    assert lines[0].startswith("# ")
    header = lines[1].split(",")
    return header, [ln.split(",") for ln in lines[2:]]


# --- exit codes -------------------------------------------------------------

def test_validate_preset_ok(capsys):
    assert main(["validate", "--preset", "fig1_quantum"]) == 0
    err = capsys.readouterr().err
    assert "ok: double_slit rho0=0.625" in err


def test_validate_bad_json_exits_1(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text('{"system": {')
    assert main(["validate", "--config", str(path)]) == 1
    assert "error:" in capsys.readouterr().err


def test_validate_bad_value_exits_1(tmp_path, capsys):
    doc = {"system": {"type": "double_slit", "rho0": -1}, "mode": "guidance"}
    assert main(["validate", "--config", _cfg(tmp_path, doc)]) == 1
    err = capsys.readouterr().err
    assert "error:" in err and "system" in err


def test_missing_source_exits_1(capsys):
    assert main(["validate"]) == 1


def test_unknown_preset_exits_1(capsys):
    assert main(["validate", "--preset", "fig99"]) == 1
    assert "error:" in capsys.readouterr().err


def test_unreadable_config_exits_2(tmp_path, capsys):
    assert main(["validate", "--config", str(tmp_path / "absent.json")]) == 2
    assert "runtime failure" in capsys.readouterr().err


def test_unwritable_out_exits_2(tmp_path, capsys):
    blocker = tmp_path / "blocker"
    blocker.write_text("file, not a directory")
    cfg = _cfg(tmp_path, _OSC_SMALL)
    code = main(["simulate", "--config", cfg, "--out", str(blocker / "sub")])
    assert code == 2
    assert "runtime failure" in capsys.readouterr().err


def test_preset_list(capsys):
    assert main(["preset-list"]) == 0
    out = capsys.readouterr().out
    names = [ln.split("\t")[0] for ln in out.splitlines()]
    for expect in ("fig1_quantum", "fig3_classical", "fig4", "fig8"):
        assert expect in names
    assert all("\t" in ln for ln in out.splitlines())


def test_set_overrides_reach_validation(capsys):
    assert main(["validate", "--preset", "fig1_quantum", "--set", "coupling.b=40"]) == 0
    assert "logistic b=40 t0=2" in capsys.readouterr().err


# --- simulate artifacts -------------------------------------------------------

def test_simulate_preset_writes_files(tmp_path, capsys):
    out = tmp_path / "run"
    assert main(["simulate", "--preset", "fig1_classical", "--out", str(out)]) == 0
    assert (out / "fig1_classical.csv").is_file()
    assert (out / "fig1_classical.svg").is_file()
    err = capsys.readouterr().err
    assert "50 trajectories" in err and "wrote" in err


def test_simulate_csv_layout(tmp_path, capsys):
    out = tmp_path / "o"
    assert main(["simulate", "--config", _cfg(tmp_path, _OSC_SMALL), "--out", str(out)]) == 0
    header, rows = _read_csv_rows(out / "cfg.csv")
    assert header == ["traj", "status", "t", "x", "y", "vx", "vy",
                      "m_energy", "m_radius", "m_Lz"]
    assert len(rows) == 3
    assert [r[1] for r in rows] == ["completed"] * 3
    assert [float(r[2]) for r in rows] == [0.0, 1.0, 2.0]
    # values are full-precision decimals that round-trip through float
    for r in rows:
        for cell in r[2:]:
            v = float(cell)
            assert f"{v:.15g}" == cell


def test_simulate_json_round_trip(tmp_path, capsys):
    out = tmp_path / "o"
    assert main(["simulate", "--config", _cfg(tmp_path, _OSC_SMALL), "--out", str(out)]) == 0
    doc = load_result(str(out / "cfg.json"))
    assert doc["schema"] == "qctrans.ensemble/1"
    assert doc["truncation_report"] == {"completed": 1}
    tr = doc["trajectories"][0]
    assert tr["x"].shape == (3, 2) and tr["v"].shape == (3, 2)
    # JSON floats are exact (repr); the CSV renders the same values at 15
    # significant digits
    _, rows = _read_csv_rows(out / "cfg.csv")
    assert f"{tr['x'][1][0]:.15g}" == rows[1][3]
    assert doc["diagnostics"][0]["monitors"]["radius"]["max_drift"] < 1e-5


def test_simulate_svg_one_polyline_per_trajectory(tmp_path, capsys):
    out = tmp_path / "o"
    doc = dict(_OSC_GUIDANCE, output={"formats": ["svg"]})
    assert main(["simulate", "--config", _cfg(tmp_path, doc), "--out", str(out)]) == 0
    svg = (out / "cfg.svg").read_text()
    assert svg.count("<polyline") == 3
    assert "oscillator_2d k0=1" in svg


def test_simulate_formats_flag_limits_outputs(tmp_path, capsys):
    out = tmp_path / "o"
    cfg = _cfg(tmp_path, _OSC_SMALL)
    assert main(["simulate", "--config", cfg, "--out", str(out),
                 "--formats", "json"]) == 0
    assert (out / "cfg.json").is_file()
    assert not (out / "cfg.csv").exists()
    assert not (out / "cfg.svg").exists()


def test_simulate_reruns_are_byte_identical(tmp_path, capsys):
    cfg = _cfg(tmp_path, _OSC_SMALL)
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["simulate", "--config", cfg, "--out", str(a)]) == 0
    assert main(["simulate", "--config", cfg, "--out", str(b)]) == 0
    for name in ("cfg.csv", "cfg.json", "cfg.svg"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


# --- sample -----------------------------------------------------------------

def test_sample_stdout_csv(tmp_path, capsys):
    assert main(["sample", "--config", _cfg(tmp_path, _DS_GUIDANCE)]) == 0
    out = capsys.readouterr().out
    lines = out.splitlines()
    assert lines[0] == "index,x,vx"
    assert len(lines) == 5
    for i, ln in enumerate(lines[1:]):
        cells = ln.split(",")
        assert cells[0] == str(i)
        float(cells[1]), float(cells[2])


def test_sample_to_directory(tmp_path, capsys):
    out = tmp_path / "s"
    assert main(["sample", "--config", _cfg(tmp_path, _OSC_GUIDANCE),
                 "--out", str(out)]) == 0
    path = out / "cfg_samples.csv"
    assert path.is_file()
    lines = path.read_text().splitlines()
    assert lines[0] == "index,x,y,vx,vy"
    assert len(lines) == 4


# --- field --------------------------------------------------------------------

def test_field_masks_singular_cells(tmp_path, capsys):
    out = tmp_path / "f"
    assert main(["field", "--preset", "fig5", "--out", str(out), "--grid", "51"]) == 0
    csv_path = out / "fig5_field.csv"
    svg_path = out / "fig5_field.svg"
    assert csv_path.is_file() and svg_path.is_file()
    lines = csv_path.read_text().splitlines()
    assert lines[0].startswith("# oscillator_2d")
    assert lines[1] == "x,y,Q"
    assert len(lines) == 2 + 51 * 51
    # the node at the origin is masked, not extrapolated
    center = [ln for ln in lines[2:] if ln.startswith("0,0,")]
    assert center == ["0,0,nan"]
    assert "#dddddd" in svg_path.read_text()


def test_field_quantity_rho_has_no_mask(tmp_path, capsys):
    out = tmp_path / "f"
    assert main(["field", "--preset", "fig5", "--out", str(out),
                 "--grid", "21", "--quantity", "rho"]) == 0
    vals = []
    for ln in (out / "fig5_field.csv").read_text().splitlines()[2:]:
        vals.append(float(ln.split(",")[2]))
    arr = np.asarray(vals)
    assert np.all(np.isfinite(arr)) and arr.min() >= 0.0
    assert arr.max() == pytest.approx(np.exp(-1.0) / np.pi, rel=1e-2)


# --- pure-python fallback parity ------------------------------------------

def _run_nonumba(cfg, out):
    env = dict(os.environ, QCTRANS_NO_NUMBA="1")
    proc = subprocess.run(
        [sys.executable, "-m", "qctrans.cli", "simulate", "--config", cfg,
         "--out", out],
        capture_output=True, text=True, env=env, timeout=300,
    )
    assert proc.returncode == 0, proc.stderr


def test_fallback_matches_compiled_closed_path(tmp_path, capsys):
    # the oscillator guidance flow uses closed-form fields: the pure-python
    # path must reproduce the compiled run bit for bit
    cfg = _cfg(tmp_path, _OSC_GUIDANCE)
    a, b = tmp_path / "jit", tmp_path / "plain"
    assert main(["simulate", "--config", cfg, "--out", str(a)]) == 0
    _run_nonumba(cfg, str(b))
    assert (a / "cfg.csv").read_bytes() == (b / "cfg.csv").read_bytes()


def test_fallback_matches_compiled_stencil_path(tmp_path, capsys):
    # the free-packet flow differentiates S numerically; libm rounding enters
    # through the 1/h^2 stencil scale, so parity here is close, not bitwise
    cfg = _cfg(tmp_path, _DS_GUIDANCE)
    a, b = tmp_path / "jit", tmp_path / "plain"
    assert main(["simulate", "--config", cfg, "--out", str(a)]) == 0
    _run_nonumba(cfg, str(b))

    def grab(path):
        _, rows = _read_csv_rows(path)
        return np.array([[float(c) for c in r[2:]] for r in rows])

    va, vb = grab(a / "cfg.csv"), grab(b / "cfg.csv")
    assert va.shape == vb.shape
    assert np.allclose(va, vb, atol=1e-6, rtol=0.0)
