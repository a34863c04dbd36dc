import csv
import io
import subprocess
import sys
from pathlib import Path

import pytest

from ecsvc.cli import main
from ecsvc.experiments import COLUMNS, read_rows

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def rows(path):
    return read_rows(Path(path).read_text())


def header(path):
    return next(csv.reader(io.StringIO(Path(path).read_text())))


def test_run(tmp_path):
    out, trace, alerts = tmp_path / "r.csv", tmp_path / "t.csv", tmp_path / "a.csv"
    assert main(["run", "--config", str(CONFIGS / "baseline.ini"), "--out", str(out), "--trace", str(trace),
                 "--alerts", str(alerts)]) == 0
    (row,) = rows(out)
    assert row["command"] == "run" and row["status"] == "ok"
    assert float(row["total_time_s"]) > 0.8
    assert header(out) == list(COLUMNS)
    assert trace.read_text().startswith("time_s,node,kind,detail")
    assert alerts.exists()


def test_unknown_key_exit_2(tmp_path, capsys):
    cfg = tmp_path / "bad.ini"
    cfg.write_text("[nodes]\nn_rx_eccu = 3\n")
    assert main(["run", "--config", str(cfg), "--out", str(tmp_path / "o.csv")]) == 2
    assert "configuration error" in capsys.readouterr().err


def test_missing_config_exit_2(tmp_path):
    assert main(["run", "--config", str(tmp_path / "none.ini"), "--out", str(tmp_path / "o.csv")]) == 2


def test_stall_exit_code():
    from ecsvc.experiments import exit_code

    assert exit_code("stall") == 4 and exit_code("abort") == 3 and exit_code("ok") == 0


def test_sweep(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["sweep", "--spec", str(CONFIGS / "sweep_data_rate.ini"), "--out", str(out), "--jobs", "2"]) == 0
    got = rows(out)
    assert [r["parameter"] for r in got] == ["data_rate"] * 4
    assert [float(r["data_rate"]) for r in got] == [1e6, 2e6, 4e6, 8e6]
    times = [float(r["total_time_s"]) for r in got]
    assert times == sorted(times, reverse=True)
    assert header(out) == list(COLUMNS)


def test_sweep_bad_spec(tmp_path):
    spec = tmp_path / "bad.ini"
    spec.write_text("[sweep]\nparameter = colour\nvalues = 1 2\n")
    assert main(["sweep", "--spec", str(spec), "--out", str(tmp_path / "o.csv")]) == 2
    spec.write_text("[sweep]\nparameter = n_rx_att\nvalues = 8 8\n")
    assert main(["sweep", "--spec", str(spec), "--out", str(tmp_path / "o.csv")]) == 2


@pytest.mark.parametrize("kind", ["replay", "tamper"])
def test_attack(tmp_path, kind):
    cfg = tmp_path / "a.ini"
    cfg.write_text((CONFIGS / f"{kind}.ini").read_text().replace("trials = 100", "trials = 10"))
    out = tmp_path / "o.csv"
    assert main(["attack", "--kind", kind, "--config", str(cfg), "--out", str(out)]) == 0
    (row,) = rows(out)
    assert row["status"] == f"{kind}-rejected"
    assert "trials=10;rejected=10" in row["detail"]
    assert header(out) == list(COLUMNS)


def test_attack_curious_sa(tmp_path):
    cfg = tmp_path / "c.ini"
    cfg.write_text((CONFIGS / "curious_sa.ini").read_text().replace("trials = 100", "trials = 5"))
    out, dump = tmp_path / "o.csv", tmp_path / "view.hex"
    assert main(["attack", "--kind", "curious-sa", "--config", str(cfg), "--out", str(out),
                 "--dump", str(dump)]) == 0
    (row,) = rows(out)
    assert row["status"] == "curious-sa-clean"
    bytes.fromhex(dump.read_text().strip())


def test_run_with_attack_config(tmp_path):
    cfg = tmp_path / "a.ini"
    cfg.write_text((CONFIGS / "replay.ini").read_text().replace("trials = 100", "trials = 3"))
    out = tmp_path / "o.csv"
    assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
    assert rows(out)[0]["status"] == "replay-rejected"


def test_demo(tmp_path, capsys):
    out = tmp_path / "demo.txt"
    assert main(["demo", "--out", str(out)]) == 0
    text = capsys.readouterr().out
    assert text == out.read_text()
    assert "A=16" in text and "D=6" in text
    assert main(["demo"]) == 0
    assert capsys.readouterr().out == text


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ecsvc", "demo"], capture_output=True, text=True)
    assert proc.returncode == 0 and "A=16" in proc.stdout


def test_no_command_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2
