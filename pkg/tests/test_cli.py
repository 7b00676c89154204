"""Command-line interface: verbs, overrides, exit codes."""

from evfreqsim.cli import main
from evfreqsim.config import load_config, save_config, preset


def test_validate_verb(capsys):
    assert main(["validate", "--preset", "desk"]) == 0
    out = capsys.readouterr().out
    assert "ok:" in out and "stations=10" in out


def test_validate_rejects_bad_config(tmp_path, capsys):
    path = tmp_path / "bad.yaml"
    path.write_text("clocks:\n  dt_corr_s: 3.0\n")
    assert main(["validate", "--config", str(path)]) == 2
    assert "config error" in capsys.readouterr().err


def test_run_verb_prints_metrics_and_exports(tmp_path, capsys):
    out_dir = tmp_path / "out"
    assert main(["run", "--preset", "desk", "--seed", "2",
                 "--strategy", "CS1", "--out", str(out_dir)]) == 0
    out = capsys.readouterr().out
    assert "ace.rms_mw=" in out
    for name in ("timeseries.csv", "soc_traces.csv", "metrics.kv", "config.yaml"):
        assert (out_dir / name).exists()
    snap = load_config(out_dir / "config.yaml")
    assert snap.seed == 2 and snap.strategy == "CS1"


def test_run_verb_with_config_file(tmp_path, capsys):
    path = tmp_path / "scenario.yaml"
    save_config(preset("desk", seed=9), path)
    assert main(["run", "--config", str(path)]) == 0
    assert "freq.rms_hz=" in capsys.readouterr().out


def test_sweep_verb(capsys):
    assert main(["sweep", "--preset", "desk", "--axis", "policy.mu",
                 "--values", "0.5,0.8"]) == 0
    out = capsys.readouterr().out
    assert "axis=policy.mu" in out
    assert out.count("ace.rms_mw=") == 2


def test_compare_verb(capsys):
    assert main(["compare", "--preset", "desk", "--seed", "1"]) == 0
    out = capsys.readouterr().out
    assert "W/O V2G" in out and "CS1" in out and "CS2" in out
