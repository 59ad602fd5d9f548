import json

import pytest

from fmnes.cli import main
from fmnes.distribution import parse_config
from fmnes.harness import load_json


def test_dump_config_prints_defaults(capsys):
    assert main(["dump-config", "--strategy", "fmnes", "--dim", "40", "--lambda", "16"]) == 0
    out = capsys.readouterr().out
    config = parse_config(out)
    assert config.lam == 16 and config.dim == 40
    assert config.enable_rank_one


def test_dump_config_to_file_round_trips(tmp_path):
    target = tmp_path / "strategy.cfg"
    assert main(["dump-config", "--strategy", "xnes", "--dim", "10",
                 "--lambda", "8", "--out", str(target)]) == 0
    config = parse_config(target.read_text())
    assert not config.enable_phase_switching


def test_run_writes_csv_and_json(tmp_path, capsys):
    stem = tmp_path / "exp"
    code = main([
        "run", "--strategy", "fmnes", "--problem", "sphere", "--dim", "10",
        "--lambda", "8", "--trials", "2", "--seed", "3", "--out", str(stem),
    ])
    assert code == 0
    csv_text = (tmp_path / "exp.csv").read_text()
    assert csv_text.splitlines()[0].startswith("strategy,problem,d,lambda")
    assert "fmnes,sphere,10,8,2,2," in csv_text
    payload = load_json(tmp_path / "exp.json")
    assert payload["spec"]["problem"] == "sphere"


def test_run_rejects_lambda_grid(capsys):
    code = main([
        "run", "--strategy", "fmnes", "--problem", "sphere", "--dim", "10",
        "--lambda", "4,8", "--trials", "1",
    ])
    assert code == 2


def test_sweep_over_grid(tmp_path):
    stem = tmp_path / "sweep"
    code = main([
        "sweep", "--strategy", "fmnes", "--problem", "sphere", "--dim", "10",
        "--lambda", "8,12", "--trials", "1", "--seed", "1", "--out", str(stem),
    ])
    assert code == 0
    payload = load_json(tmp_path / "sweep.json")
    assert [block["lambda"] for block in payload["results"]] == [8, 12]


def test_run_with_config_file(tmp_path):
    cfg_path = tmp_path / "strategy.cfg"
    main(["dump-config", "--strategy", "dxnes-ic", "--dim", "10", "--lambda", "8",
          "--out", str(cfg_path)])
    stem = tmp_path / "exp"
    code = main([
        "run", "--strategy", "dxnes-ic", "--problem", "sphere", "--dim", "10",
        "--lambda", "8", "--trials", "1", "--config", str(cfg_path), "--out", str(stem),
    ])
    assert code == 0


def test_plot_from_record(tmp_path):
    stem = tmp_path / "exp"
    main([
        "run", "--strategy", "fmnes", "--problem", "sphere", "--dim", "8",
        "--lambda", "8", "--trials", "1", "--trajectory", "--out", str(stem),
    ])
    svg = tmp_path / "fig.svg"
    assert main(["plot", str(tmp_path / "exp.json"), "--trial", "0", "--out", str(svg)]) == 0
    content = svg.read_text()
    assert "<svg" in content


def test_plot_without_trajectory_fails_cleanly(tmp_path, capsys):
    stem = tmp_path / "exp"
    main([
        "run", "--strategy", "fmnes", "--problem", "sphere", "--dim", "8",
        "--lambda", "8", "--trials", "1", "--out", str(stem),
    ])
    code = main(["plot", str(tmp_path / "exp.json"), "--out", str(tmp_path / "f.svg")])
    assert code == 2
    assert "trajectory disabled" in capsys.readouterr().err


def test_plot_rejects_bad_trial_index(tmp_path, capsys):
    stem = tmp_path / "exp"
    main([
        "run", "--strategy", "fmnes", "--problem", "sphere", "--dim", "8",
        "--lambda", "8", "--trials", "1", "--trajectory", "--out", str(stem),
    ])
    assert main(["plot", str(tmp_path / "exp.json"), "--trial", "7"]) == 2
