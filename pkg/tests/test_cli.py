import csv
import json

import pytest

from besselriesz import cli

SMALL = ["--n", "4096", "--length", "32"]


def test_verify_special(capsys):
    assert cli.run(["verify", "--suite", "special"]) == 0
    out = capsys.readouterr().out
    assert "[PASS]" in out and "1/1 checks passed" in out


def test_approx_writes_curve(tmp_path, capsys):
    out = tmp_path / "curve.csv"
    code = cli.run(["approx", "--alpha", "1", "--p", "2", "--function", "gaussian", "--mu", "2:256", "--out", str(out)])
    assert code == 0
    rows = list(csv.reader(out.open(encoding="utf-8")))
    assert rows[0][:4] == ["mu", "err", "omega", "ratio"]
    assert "fitted slope" in capsys.readouterr().out


def test_repeat_runs_identical(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["approx", *SMALL, "--function", "random_band_limited", "--seed", "4", "--mu", "2:64"]
    assert cli.run([*args, "--out", str(a)]) == 0
    assert cli.run([*args, "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize(
    "argv",
    [
        ["localize", "--alpha", "0.5", "--delta", "0"],
        ["approx", "--p", "0.5"],
        ["approx", "--alpha", "2"],
        ["approx", "--n", "1000"],
        ["approx", *SMALL, "--mu", "2:4096"],
        ["approx", "--mu", "8:2"],
        ["besov", "--s", "1.5"],
        ["kernel", "--mu", "-1"],
        ["frobnicate"],
        ["approx", "--no-such-flag"],
    ],
)
def test_usage_errors(argv, tmp_path, capsys):
    out = tmp_path / "x.csv"
    assert cli.run([*argv, "--out", str(out)] if argv[0] != "frobnicate" else argv) == 2
    assert not out.exists()
    assert capsys.readouterr().err


def test_unwritable_output(tmp_path, capsys):
    code = cli.run(["approx", *SMALL, "--mu", "2:16", "--out", str(tmp_path / "missing" / "c.csv")])
    assert code == 1
    assert "cannot write" in capsys.readouterr().err


def test_dump_config(capsys):
    assert cli.run(["localize", *SMALL, "--delta", "1", "--mu", "4:64", "--dump-config"]) == 0
    text = capsys.readouterr().out
    cfg = json.loads(text[: text.index("}") + 1])
    assert cfg["command"] == "localize" and cfg["delta"] == 1.0 and "backend" in cfg


@pytest.mark.parametrize(
    "argv",
    [
        ["saturate", *SMALL, "--mu", "2:64"],
        ["besov", "--n", "4096", "--length", "16", "--mu-max", "64"],
        ["maximal", *SMALL, "--mu", "2:32"],
        ["localize", *SMALL, "--alpha", "0.5", "--mu", "4:64", "--mu-steps", "6"],
    ],
)
def test_subcommands_succeed(argv, tmp_path):
    assert cli.run(argv) == 0


def test_kernel_decay_summary(capsys):
    assert cli.run(["kernel", "--n", "65536", "--length", "64", "--mu", "32"]) == 0
    assert "far-field slope" in capsys.readouterr().out


def test_kernel_underresolved_still_writes(tmp_path, capsys):
    out = tmp_path / "k.csv"
    assert cli.run(["kernel", "--n", "4096", "--length", "32", "--mu", "8", "--out", str(out)]) == 0
    assert "decay check skipped" in capsys.readouterr().out
    assert out.read_text(encoding="utf-8").startswith("r,value,bin_spread")


def test_parser_lists_subcommands():
    text = cli.build_parser().format_help()
    for name in ("kernel", "approx", "localize", "saturate", "besov", "maximal", "verify"):
        assert name in text
