import csv
import io
import json
import shutil
import subprocess
from pathlib import Path

import numpy as np
import pytest

from tqd.cli import CSV_HEADER, main
from tqd.config import ConfigError, ExperimentConfig

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def write_config(tmp_path, doc, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def read_rows(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert tuple(rows[0]) == CSV_HEADER
    return rows[1:]


SYMMETRIC = {"name": "lmg_fp_symmetric", "params": {"c": 0.5}, "duration": 1.0}
GAUSSIAN = {"name": "matched_gaussian", "params": {"h_start": 20.0, "h_end": 5.0}, "duration": 1.0}


# --- configuration ------------------------------------------------------------------

@pytest.mark.parametrize("path", sorted(CONFIGS.glob("*.json")), ids=lambda p: p.name)
def test_committed_configs_round_trip(path):
    cfg = ExperimentConfig.load(path)
    again = ExperimentConfig.loads(cfg.dumps())
    assert again == cfg
    assert again.dumps() == cfg.dumps()


def test_round_trip_with_all_fields():
    doc = {
        "model": "xy_chain",
        "schedule": {"name": "fp_xy_chain", "params": {"c": 0.3}, "duration": 2.0},
        "driver_mode": "engine_cd",
        "sizes": [4, 6],
        "integrator": {"step": 1e-3, "renormalize_every": 10, "method": "rk4"},
        "output": "out.csv",
        "seed": 3,
        "n_points": 11,
        "sector": "even",
        "level": 1,
        "clamp_divergence": True,
    }
    cfg = ExperimentConfig.from_dict(doc)
    assert ExperimentConfig.loads(cfg.dumps()) == cfg
    assert cfg.build_schedules()[0].duration == 2.0


@pytest.mark.parametrize(
    "doc,field",
    [
        ({"schedule": SYMMETRIC, "sizes": [4]}, "model"),
        ({"model": "lmg", "sizes": [4]}, "schedule"),
        ({"model": "ising", "schedule": SYMMETRIC}, "model"),
        ({"model": "lmg", "schedule": SYMMETRIC, "sizes": [4], "driver_mode": "fast"}, "driver_mode"),
        ({"model": "lmg", "schedule": SYMMETRIC}, "sizes"),
        ({"model": "lmg", "schedule": SYMMETRIC, "sizes": [0]}, "sizes"),
        ({"model": "two_level", "schedule": SYMMETRIC}, "schedule[0]"),
        ({"model": "lmg", "schedule": {"name": "nope"}, "sizes": [4]}, "schedule[0]"),
        ({"model": "lmg", "schedule": SYMMETRIC, "sizes": [4], "integrator": {"step": -1}}, "integrator"),
        ({"model": "lmg", "schedule": SYMMETRIC, "sizes": [4], "n_points": 1}, "n_points"),
        ({"model": "lmg", "schedule": SYMMETRIC, "sizes": [4], "sector": "up"}, "sector"),
        ({"model": "lmg", "schedule": SYMMETRIC, "sizes": [4], "colour": 1}, "colour"),
    ],
)
def test_invalid_config_names_field(doc, field):
    with pytest.raises(ConfigError, match=field.replace("[", r"\[")):
        ExperimentConfig.from_dict(doc)


def test_malformed_json_reports_position():
    with pytest.raises(ConfigError, match="line 2"):
        ExperimentConfig.loads('{\n  "model": }')


# --- trace ------------------------------------------------------------------------------

def test_missing_model_exits_1(tmp_path, capsys):
    path = write_config(tmp_path, {"schedule": SYMMETRIC, "sizes": [4]})
    assert main(["trace", "-c", path]) == 1
    assert "'model'" in capsys.readouterr().err


def test_missing_file_exits_1(tmp_path, capsys):
    assert main(["trace", "-c", str(tmp_path / "absent.json")]) == 1
    assert "error" in capsys.readouterr().err


def test_symmetric_trace_has_200_rows(tmp_path):
    path = write_config(tmp_path, {"model": "lmg", "schedule": SYMMETRIC, "sizes": [50]})
    out = tmp_path / "out.csv"
    assert main(["trace", "-c", path, "-o", str(out)]) == 0
    rows = read_rows(out)
    assert len(rows) == 200
    assert float(rows[0][0]) == 0 and float(rows[-1][0]) == 1
    assert rows[-1][5:] == ["50", "lmg_fp_symmetric", "bare"]
    assert 0 < float(rows[-1][1]) <= 1


def test_csv_is_byte_identical_and_lf(tmp_path):
    path = write_config(tmp_path, {"model": "lmg", "schedule": [SYMMETRIC, GAUSSIAN], "sizes": [6, 10], "n_points": 9})
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["trace", "-c", path, "-o", str(a)]) == 0
    assert main(["trace", "-c", path, "-o", str(b)]) == 0
    data = a.read_bytes()
    assert data == b.read_bytes()
    assert b"\r" not in data and data.endswith(b"\n")
    assert len(read_rows(a)) == 2 * 2 * 9


def test_numbers_have_twelve_significant_digits(tmp_path):
    path = write_config(tmp_path, {"model": "lmg", "schedule": GAUSSIAN, "sizes": [8], "n_points": 4})
    out = tmp_path / "out.csv"
    main(["trace", "-c", path, "-o", str(out)])
    for row in read_rows(out):
        for cell in row[:5]:
            mantissa = cell.split("e")[0].replace("-", "").replace(".", "").lstrip("0")
            assert len(mantissa) <= 12


def test_trace_to_stdout(tmp_path, capsysbinary):
    path = write_config(tmp_path, {"model": "two_spin", "schedule": {"name": "fp_two_spin", "params": {"c": 2.0}}, "n_points": 5})
    assert main(["trace", "-c", path]) == 0
    rows = list(csv.reader(io.StringIO(capsysbinary.readouterr().out.decode())))
    assert len(rows) == 6
    assert all(r[5] == "2" for r in rows[1:])
    assert all(float(r[1]) > 1 - 1e-8 for r in rows[1:])


def test_static_driver_trace_is_identically_one(tmp_path):
    doc = {
        "model": "two_level",
        "schedule": {"name": "static_driver", "params": {"h3": 1.0, "omega": 4.0}},
        "driver_mode": "analytic_cd",
        "n_points": 50,
    }
    out = tmp_path / "out.csv"
    assert main(["trace", "-c", write_config(tmp_path, doc), "-o", str(out)]) == 0
    fids = np.array([float(r[1]) for r in read_rows(out)])
    assert fids.size == 50
    assert np.all(fids >= 1 - 1e-8)


def test_clamped_divergence_exits_2(tmp_path):
    doc = {
        "model": "lmg",
        "schedule": {"name": "lmg_fp_broken"},
        "driver_mode": "engine_cd",
        "sizes": [10],
        "n_points": 5,
        "clamp_divergence": True,
    }
    out = tmp_path / "out.csv"
    assert main(["trace", "-c", write_config(tmp_path, doc), "-o", str(out)]) == 2
    assert len(read_rows(out)) == 5


def test_unclamped_divergence_is_fatal(tmp_path, capsys):
    doc = {"model": "lmg", "schedule": {"name": "lmg_fp_broken"}, "driver_mode": "engine_cd", "sizes": [10], "n_points": 5}
    assert main(["trace", "-c", write_config(tmp_path, doc)]) == 1
    assert "DivergenceError" in capsys.readouterr().err


# --- sweep ----------------------------------------------------------------------------------

def test_sweep_rows_and_order(tmp_path):
    doc = {"model": "lmg", "schedule": [SYMMETRIC, GAUSSIAN], "sizes": [20, 50, 100, 200], "n_points": 10}
    out = tmp_path / "out.csv"
    assert main(["sweep", "-c", write_config(tmp_path, doc), "-o", str(out)]) == 0
    rows = read_rows(out)
    assert len(rows) == 8
    assert [(r[5], r[6]) for r in rows] == [
        (str(n), p) for n in (20, 50, 100, 200) for p in ("lmg_fp_symmetric", "matched_gaussian")
    ]
    assert all(float(r[0]) == 1 for r in rows)


def test_sweep_sorts_sizes(tmp_path):
    doc = {"model": "lmg", "schedule": SYMMETRIC, "sizes": [8, 4], "n_points": 4}
    out = tmp_path / "out.csv"
    assert main(["sweep", "-c", write_config(tmp_path, doc), "-o", str(out)]) == 0
    assert [r[5] for r in read_rows(out)] == ["4", "8"]


def test_sweep_rejects_duplicate_sizes(tmp_path, capsys):
    doc = {"model": "lmg", "schedule": SYMMETRIC, "sizes": [4, 4]}
    assert main(["sweep", "-c", write_config(tmp_path, doc)]) == 1
    assert "duplicate" in capsys.readouterr().err


def test_sweep_needs_sizes(tmp_path, capsys):
    doc = {"model": "two_spin", "schedule": {"name": "fp_two_spin"}}
    assert main(["sweep", "-c", write_config(tmp_path, doc)]) == 1
    assert "'sizes'" in capsys.readouterr().err


def test_sweep_error_rows_exit_2(tmp_path):
    doc = {"model": "lmg", "schedule": [{"name": "lmg_fp_broken"}, SYMMETRIC], "driver_mode": "engine_cd", "sizes": [6], "n_points": 4}
    out = tmp_path / "out.csv"
    assert main(["sweep", "-c", write_config(tmp_path, doc), "-o", str(out)]) == 2
    broken, symmetric = read_rows(out)
    assert broken[1] == "error" and broken[6] == "lmg_fp_broken"
    assert float(symmetric[1]) > 0.99


def test_jobs_environment_override(tmp_path, monkeypatch, capsys):
    doc = {"model": "lmg", "schedule": SYMMETRIC, "sizes": [4, 6], "n_points": 4}
    path = write_config(tmp_path, doc)
    serial, parallel = tmp_path / "s.csv", tmp_path / "p.csv"
    assert main(["sweep", "-c", path, "-o", str(serial)]) == 0
    monkeypatch.setenv("TQD_JOBS", "2")
    assert main(["sweep", "-c", path, "-o", str(parallel)]) == 0
    assert serial.read_bytes() == parallel.read_bytes()
    monkeypatch.setenv("TQD_JOBS", "0")
    assert main(["sweep", "-c", path]) == 1
    assert "jobs" in capsys.readouterr().err


# --- verify ---------------------------------------------------------------------------------

def test_verify_is_deterministic(capsys):
    assert main(["verify", "--seed", "7", "--samples", "5"]) == 0
    first = capsys.readouterr().out
    assert main(["verify", "--seed", "7", "--samples", "5"]) == 0
    assert capsys.readouterr().out == first
    assert "all 10 checks passed" in first


def test_verify_rejects_zero_samples(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--samples", "0"])
    assert exc.value.code == 2
    assert "samples" in capsys.readouterr().err


def test_console_script_is_installed():
    exe = shutil.which("tqd")
    assert exe is not None
    done = subprocess.run([exe, "verify", "--samples", "2"], capture_output=True, text=True, check=False)
    assert done.returncode == 0
    assert done.stdout.splitlines()[0].split()[0] == "check"
