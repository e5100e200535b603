import numpy as np
import pytest

from obskey.cli import main


DESK = ["--preset", "desk"]


def test_probe_requires_seed(tmp_path, capsys):
    with pytest.raises(SystemExit):
        main(["probe", "--out", str(tmp_path)])


def test_probe_writes_traces(tmp_path):
    code = main(
        ["probe", *DESK, "--seed", "4", "--set", "n_rounds=20", "--out", str(tmp_path)]
    )
    assert code == 0
    names = {p.name for p in tmp_path.iterdir()}
    assert {"alice_csi.csv", "bob_csi.csv", "eve_csi.csv", "eve_uplink_csi.csv"} <= names
    assert "secrets.csv" not in names


def test_probe_dump_secrets(tmp_path):
    code = main(
        ["probe", *DESK, "--seed", "4", "--set", "n_rounds=10", "--dump-secrets",
         "--out", str(tmp_path)]
    )
    assert code == 0
    assert (tmp_path / "secrets.csv").exists()


def test_extract_end_to_end(tmp_path, capsys):
    code = main(["extract", *DESK, "--set", "seed=1", "--out", str(tmp_path / "run")])
    assert code == 0
    out = capsys.readouterr().out
    assert "keys_match=True" in out
    assert (tmp_path / "run" / "report.csv").exists()


def test_parameter_error_exit_code(tmp_path):
    code = main(["extract", "--set", "mode=bogus", "--out", str(tmp_path)])
    assert code == 2


def test_sweep_command(tmp_path, capsys):
    code = main(
        ["sweep", *DESK, "--set", "n_rounds=100", "--parameter", "filter_len",
         "--values", "0,8", "--trials", "1", "--out", str(tmp_path)]
    )
    assert code == 0
    assert (tmp_path / "sweep_filter_len.csv").exists()


def test_nist_command(tmp_path, capsys):
    rng = np.random.default_rng(0)
    bits_file = tmp_path / "bits.txt"
    bits_file.write_text("".join(str(b) for b in rng.integers(0, 2, 2048)))
    code = main(["nist", str(bits_file), "--out", str(tmp_path / "rep")])
    assert code == 0
    assert (tmp_path / "rep" / "nist_report.csv").exists()


def test_attack_command_quick(tmp_path, capsys):
    code = main(
        ["attack", *DESK, "--scenario", "order_speculation",
         "--set", "n_rounds=80", "--set", "cluster_restarts=5", "--out", str(tmp_path)]
    )
    assert code == 0
    assert (tmp_path / "attack_report.csv").exists()
    assert (tmp_path / "confusion.csv").exists()
