import json
import subprocess
import sys

import pytest

from safesip.harness.cli import EXIT_CONFIG, EXIT_IO, EXIT_OK, main

SIP = "width = 8\nkappa = 4\nn_chiplets = 2\nseed = 1\n"


def cfg_file(tmp_path, text, name="s.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_boot_to_stdout(tmp_path, capsys):
    assert main(["boot", "--config", cfg_file(tmp_path, SIP)]) == EXIT_OK
    out = json.loads(capsys.readouterr().out)
    assert out["campaign"] == "boot" and out["summary"]["aggregate"] == ["Pass"]


def test_boot_files_byte_identical(tmp_path):
    c = cfg_file(tmp_path, SIP + "adversary = [tamper(33)->1]\n")
    a, b = tmp_path / "a" / "r.csv", tmp_path / "b" / "r.csv"
    assert main(["boot", "--config", c, "--out", str(a), "--format", "csv"]) == EXIT_OK
    assert main(["boot", "--config", c, "--out", str(b), "--format", "csv"]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    assert (tmp_path / "a" / "r.transcript.jsonl").read_bytes() == \
        (tmp_path / "b" / "r.transcript.jsonl").read_bytes()
    assert a.read_bytes().count(b"\r\n") == 3


def test_attack_runs_named_campaign(tmp_path, capsys):
    c = cfg_file(tmp_path, "campaign = forge\nforgeries = 3\n" + SIP)
    assert main(["attack", "--config", c, "--seed", "0x10"]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["summary"]["accepted"] == 0


def test_attack_rejects_non_attack(tmp_path, capsys):
    assert main(["attack", "--config", cfg_file(tmp_path, "campaign = boot\n" + SIP)]) \
        == EXIT_CONFIG
    assert "campaign" in capsys.readouterr().err


def test_missing_key_exit_code(tmp_path, capsys):
    assert main(["boot", "--config", cfg_file(tmp_path, "width = 8\nkappa = 4\n")]) \
        == EXIT_CONFIG
    assert "n_chiplets" in capsys.readouterr().err


def test_io_errors(tmp_path):
    assert main(["boot", "--config", str(tmp_path / "nope.cfg")]) == EXIT_IO
    blocker = tmp_path / "file"
    blocker.write_text("")
    c = cfg_file(tmp_path, SIP)
    assert main(["boot", "--config", c, "--out", str(blocker / "r.json")]) == EXIT_IO


def test_complexity_and_sweep(tmp_path, capsys):
    assert main(["complexity", "--format", "csv"]) == EXIT_OK
    assert capsys.readouterr().out.splitlines()[1].endswith(",204")
    c = cfg_file(tmp_path, "kappas = [4]\nwidths = [4]\ntrials = 100\n")
    assert main(["sweep", "--config", c]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["rows"][0]["trials"] == 100


def test_bad_seed_is_usage_error():
    with pytest.raises(SystemExit) as e:
        main(["complexity", "--seed", str(1 << 64)])
    assert e.value.code == 2


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "safesip", "complexity"], capture_output=True,
                       text=True)
    assert r.returncode == 0 and json.loads(r.stdout)["campaign"] == "complexity"
