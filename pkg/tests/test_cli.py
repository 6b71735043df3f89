"""CLI behavior: commands, exit codes, artifact writing, determinism."""

import json

import pytest

from modbot.cli import main

VALID_CATALOG = json.dumps(
    [
        {
            "name": "demo_wave",
            "period": 2.0,
            "Theta_des": [],
            "modules": [
                {
                    "theta_des": ["1/2 pi", "1/2 pi", "1/2 pi", "1/2 pi"],
                    "R": ["0.2", "0.2", "0.2", "0.2", "0.2"],
                    "C": ["0", "0", "0", "0", "0"],
                }
            ],
        }
    ]
)

INVALID_CATALOG = json.dumps(
    [
        {
            "name": "too_big",
            "period": 2.0,
            "Theta_des": [],
            "modules": [
                {
                    "theta_des": ["0", "0", "0", "0"],
                    "R": ["2.0", "0", "0", "0", "0"],
                    "C": ["1.0", "0", "0", "0", "0"],
                }
            ],
        }
    ]
)


def test_gaits_list_shipped(capsys):
    assert main(["gaits", "list"]) == 0
    out = capsys.readouterr().out
    lines = out.strip().splitlines()
    assert lines[-1] == "6 preset(s)"
    assert len(lines) == 7
    assert any(line.startswith("snake_crawl") and "valid" in line for line in lines)
    assert any("modules=2" in line for line in lines)


def test_gaits_list_empty_catalog(tmp_path, capsys):
    path = tmp_path / "empty.json"
    path.write_text("[]")
    assert main(["gaits", "list", "--file", str(path)]) == 0
    assert capsys.readouterr().out.strip() == "0 preset(s)"


def test_gaits_list_missing_file(tmp_path, capsys):
    assert main(["gaits", "list", "--file", str(tmp_path / "nope.json")]) == 2
    assert "cannot read" in capsys.readouterr().err


def test_gaits_list_corrupt_catalog(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('[ {"name": }')
    assert main(["gaits", "list", "--file", str(path)]) == 2
    err = capsys.readouterr().err
    assert "error:" in err
    assert "line 1" in err


def test_gaits_validate_clean(tmp_path, capsys):
    path = tmp_path / "ok.json"
    path.write_text(VALID_CATALOG)
    assert main(["gaits", "validate", "--file", str(path)]) == 0
    assert "all 1 preset(s) valid" in capsys.readouterr().out


def test_gaits_validate_reports_violations(tmp_path, capsys):
    path = tmp_path / "bad_gait.json"
    path.write_text(INVALID_CATALOG)
    assert main(["gaits", "validate", "--file", str(path)]) == 1
    out = capsys.readouterr().out
    assert out.startswith("too_big: module 1 joint 1: |R|+|C| = 3.0000 rad")
    assert "1 violation(s)" in out


def test_simulate_writes_artifacts(tmp_path, capsys):
    out_dir = tmp_path / "run"
    code = main(
        [
            "simulate",
            "--preset",
            "single_roll",
            "--duration",
            "1.0",
            "--out",
            str(out_dir),
        ]
    )
    assert code == 0
    assert (out_dir / "module_0.csv").is_file()
    assert (out_dir / "summary.json").is_file()
    out = capsys.readouterr().out
    assert "preset single_roll: direct run" in out
    assert "wrote" in out
    summary = json.loads((out_dir / "summary.json").read_text())
    assert summary["preset"] == "single_roll"


def test_simulate_from_catalog_file(tmp_path, capsys):
    path = tmp_path / "cat.json"
    path.write_text(VALID_CATALOG)
    out_dir = tmp_path / "run"
    code = main(
        [
            "simulate",
            "--file",
            str(path),
            "--duration",
            "1.0",
            "--out",
            str(out_dir),
        ]
    )
    assert code == 0
    assert "preset demo_wave" in capsys.readouterr().out


def test_simulate_requires_source(capsys):
    assert main(["simulate"]) == 2
    assert "--preset" in capsys.readouterr().err


def test_simulate_unknown_preset(tmp_path, capsys):
    code = main(
        ["simulate", "--preset", "gallop", "--out", str(tmp_path / "x")]
    )
    assert code == 2
    assert "gallop" in capsys.readouterr().err


def test_simulate_zero_duration(tmp_path, capsys):
    code = main(
        [
            "simulate",
            "--preset",
            "single_roll",
            "--duration",
            "0",
            "--out",
            str(tmp_path / "x"),
        ]
    )
    assert code == 2
    assert "duration" in capsys.readouterr().err


def test_simulate_divergence_exit_code(tmp_path, capsys):
    code = main(
        [
            "simulate",
            "--preset",
            "snake_crawl",
            "--duration",
            "150",
            "--dt",
            "1.0",
            "--out",
            str(tmp_path / "x"),
        ]
    )
    assert code == 3
    err = capsys.readouterr().err
    assert "non-finite" in err
    assert "t=124.000000" in err


def test_simulate_networked_rerun_byte_identical(tmp_path, capsys):
    dirs = [tmp_path / "a", tmp_path / "b"]
    for d in dirs:
        code = main(
            [
                "simulate",
                "--preset",
                "snake_crawl",
                "--duration",
                "1.0",
                "--mode",
                "networked",
                "--loss",
                "0.2",
                "--latency-ms",
                "8",
                "--jitter-ms",
                "4",
                "--seed",
                "5",
                "--out",
                str(d),
            ]
        )
        assert code == 0
    capsys.readouterr()
    names = sorted(p.name for p in dirs[0].iterdir())
    assert names == sorted(p.name for p in dirs[1].iterdir())
    assert "messages.log" in names
    for name in names:
        assert (dirs[0] / name).read_bytes() == (dirs[1] / name).read_bytes(), name


def test_usage_error_without_command():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2
