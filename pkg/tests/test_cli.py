import re
from pathlib import Path

import numpy as np
import pytest

from driveline import cli, rfio

ROOT = Path(__file__).resolve().parents[1]
NETLISTS = sorted((ROOT / "netlists").glob("*.nl"))


def run(*argv):
    return cli.run([str(a) for a in argv])


def test_net_writes_touchstone(tmp_path):
    assert run("net", "--netlist", ROOT / "netlists/lambda4.nl", "--grid", "1e9:10e9:2001", "--out", tmp_path) == 0
    block = rfio.parse_touchstone((tmp_path / "lambda4.s2p").read_text())
    assert block.freqs.size == 2001
    assert len((tmp_path / "lambda4.s2p").read_text().splitlines()) == 2002
    yin = rfio.read_csv((tmp_path / "lambda4_yin.csv").read_text())
    assert yin["f_hz"].size == 2001
    assert (tmp_path / "lambda4_s.svg").exists()


def test_sweep_peaks_in_stopband(tmp_path, capsys):
    assert run("sweep", "--netlist", ROOT / "netlists/lambda2.nl", "--cq", "83fF", "--out", tmp_path) == 0
    table = rfio.read_csv((tmp_path / "lambda2_sweep.csv").read_text())
    f_peak = table["f_q_hz"][np.argmax(table["t1_ext_s"])]
    assert abs(f_peak - 5e9) < 250e6
    assert np.max(table["t1_ext_s"]) > 0.1
    assert "T1_ext > 0.001 s" in capsys.readouterr().out


def test_budget_resonant(tmp_path, capsys):
    code = run("budget", "--chain", "4K:40@4,MXC:20@0.01", "--gate", "10ns", "--t1ext", "1ms",
               "--mode", "resonant", "--out", tmp_path)
    assert code == 0
    room = float(re.search(r"room_power_dbm\s+(\S+)", capsys.readouterr().out).group(1))
    assert abs(room + 11) <= 0.5
    assert "room_power_dbm,-10.88" in (tmp_path / "budget.csv").read_text()


def test_budget_through_design(tmp_path):
    assert run("budget", "--design", "lambda4", "--mode", "subharmonic", "--out", tmp_path) == 0


def test_dynamics_and_scan(tmp_path):
    assert run("dynamics", "--frabi", "17.57MHz", "--duration", "60ns", "--out", tmp_path, "--no-plot") == 0
    pops = rfio.read_csv((tmp_path / "dynamics.csv").read_text())
    assert np.allclose(sum(v for k, v in pops.items() if k.startswith("p")), 1.0, atol=1e-8)
    assert not (tmp_path / "dynamics.svg").exists()
    assert run("scan", "--flux", "0:0.1:3", "--fd", "5.9GHz:6.1GHz:5", "--fq", "6GHz", "--out", tmp_path) == 0
    assert len((tmp_path / "scan_resonant.csv").read_text().splitlines()) == 16


def test_fit_round_trip(tmp_path, capsys):
    t = np.linspace(0, 40e-6, 101)
    data = tmp_path / "t1.csv"
    data.write_text(rfio.write_csv({"t": t, "p": 0.9 * np.exp(-t / 7.446e-6) + 0.05}))
    assert run("fit", "--input", data, "--x", "t", "--y", "p", "--model", "exponential_decay", "--out", tmp_path) == 0
    assert "t1 = 7.446e-06" in capsys.readouterr().out
    assert run("fit", "--input", data, "--x", "t", "--y", "q", "--model", "exponential_decay",
               "--out", tmp_path) == 2


def test_sequence(tmp_path):
    assert run("sequence", "--design", "lambda4", "--seed", "3", "--out", tmp_path) == 0
    assert "T1" in (tmp_path / "sequence_lambda4.txt").read_text()


def test_reproduce_subset(tmp_path, capsys):
    assert run("reproduce", "--criteria", "1,7", "--out", tmp_path) == 0
    out = capsys.readouterr().out
    assert out.count("[PASS]") == 5
    assert (tmp_path / "reproduce.txt").read_text().endswith("all criteria pass\n")


def test_reproduce_reports_failures(tmp_path):
    assert run("reproduce", "--criteria", "8", "--out", tmp_path) == 1


@pytest.mark.parametrize("argv", [
    ["net"],
    ["net", "--design", "lambda4", "--grid", "1:2"],
    ["budget", "--chain", "4K40@4", "--t1ext", "1ms"],
    ["sweep", "--cq", "83zz"],
    ["frobnicate"],
    ["budget"],
    ["reproduce", "--criteria", "11"],
])
def test_usage_errors_exit_2(tmp_path, argv):
    assert run(*argv, "--out", tmp_path) == 2


def test_domain_error_exit_1(tmp_path, capsys):
    bad = tmp_path / "bad.nl"
    bad.write_text("GND 0\nC a 0 1pF\nQ a b 1\nPORT 1 a\n")
    assert run("net", "--netlist", bad, "--out", tmp_path) == 1
    err = capsys.readouterr().err
    assert "error in rfio" in err and "line 3" in err
    assert "Traceback" not in err


def test_help_exits_0(capsys):
    assert run("--help") == 0
    assert "reproduce" in capsys.readouterr().out


def test_outputs_are_deterministic(tmp_path):
    texts = []
    for k in range(2):
        out = tmp_path / str(k)
        assert run("sweep", "--design", "lambda4", "--grid", "4GHz:6GHz:101", "--out", out, "--seed", "7") == 0
        assert run("sequence", "--design", "standard", "--seed", "7", "--out", out) == 0
        texts.append([(out / n).read_bytes() for n in ("lambda4_sweep.csv", "sequence_standard.txt")])
    assert texts[0] == texts[1]


def test_output_directory_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.OUT_ENV, str(tmp_path / "env"))
    assert run("budget", "--t1ext", "1ms") == 0
    assert (tmp_path / "env" / "budget.csv").exists()


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# budget settings\ngate = 20ns\nt1ext = 1ms\n")
    assert run("--config", cfg, "budget", "--out", tmp_path) == 0
    assert "gate_s                2e-08" in capsys.readouterr().out
    assert run("--config", cfg, "budget", "--gate", "10ns", "--out", tmp_path) == 0
    assert "gate_s                1e-08" in capsys.readouterr().out
    cfg.write_text("colour = blue\n")
    assert run("--config", cfg, "budget", "--out", tmp_path) == 2


@pytest.mark.parametrize("path", NETLISTS, ids=lambda p: p.stem)
def test_shipped_netlists(tmp_path, path):
    net = rfio.read_netlist(path)
    assert [p.index for p in net.ports] == [1, 2]
    assert run("sweep", "--netlist", path, "--grid", "4GHz:6GHz:21", "--out", tmp_path, "--no-plot") == 0
