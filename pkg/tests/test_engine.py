import csv
import io

import pytest

from pathlib import Path

from ecsvc.errors import StallError
from ecsvc.protocol.wire import MsgType
from ecsvc.sim.engine import Simulator, run
from ecsvc.sim.scenario import load_scenario

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


@pytest.fixture(scope="module")
def baseline():
    return load_scenario(CONFIGS / "baseline.ini")


@pytest.fixture(scope="module")
def baseline_result(baseline):
    return run(baseline)


def trace_rows(res):
    return list(csv.DictReader(io.StringIO(res.trace_csv())))


def test_baseline_completes(baseline_result):
    res = baseline_result
    assert res.status == "ok" and not res.stalled
    assert res.crypto_s <= res.total_time_s and res.bus_s <= res.total_time_s
    keys = {k for k in res.receiver_keys.values()}
    assert keys == {res.sender_keys[1]}
    assert res.messages == len(res.transcript) == 55 and res.frames == 66


def test_baseline_regression(baseline_result):
    # frozen from the reference run of configs/baseline.ini
    assert baseline_result.total_time_s == pytest.approx(0.8597, abs=5e-4)
    assert baseline_result.bus_s == pytest.approx(0.01125, abs=5e-5)


def test_deterministic(baseline, baseline_result):
    again = run(baseline)
    assert again.trace_csv() == baseline_result.trace_csv()
    assert again.alerts_csv() == baseline_result.alerts_csv()


def test_seed_changes_keys_not_timing(baseline, baseline_result):
    other = run(baseline, seed=99)
    assert other.sender_keys[1] != baseline_result.sender_keys[1]
    assert other.status == "ok"


def test_faster_bus_is_faster(baseline):
    slow, fast = run(baseline.replace(data_rate=1e6)), run(baseline.replace(data_rate=8e6))
    assert fast.total_time_s < slow.total_time_s
    assert fast.bus_s < slow.bus_s


def test_tx_events_balance(baseline_result):
    rows = trace_rows(baseline_result)
    starts = [r for r in rows if r["kind"] == "tx-start"]
    ends = [r for r in rows if r["kind"] == "tx-end"]
    assert len(starts) == len(ends) == baseline_result.frames
    # the bus carries one frame at a time
    times = [(float(r["time_s"]), k) for k in ("tx-start", "tx-end") for r in rows if r["kind"] == k]
    busy = 0
    for _, kind in sorted(times, key=lambda x: (x[0], x[1] == "tx-start")):
        busy += 1 if kind == "tx-start" else -1
        assert busy in (0, 1)


def test_two_sender_priority(baseline):
    res = run(baseline.replace(n_tx_ecu=2, n_rx_ecu=4))
    assert res.status == "ok"
    first = [r for r in trace_rows(res) if r["kind"] == "tx-start"][:2]
    # both Hellos are ready at the same instant; the lower CAN id wins
    assert first[0]["node"] == "ECU1" and "id=0x101" in first[0]["detail"]


def test_stall_raises(baseline):
    drop_challenge = lambda i, d: None if d[0] == MsgType.CHALLENGE else d
    with pytest.raises(StallError):
        Simulator(baseline, drop_challenge).run()
    res = Simulator(baseline, drop_challenge).run(on_stall="alert")
    assert res.status == "stall" and "S1" in res.stalled
    assert any(a.code == "timeout" for a in res.alerts)


def test_unauthorized_receivers_denied():
    from ecsvc.sim.scenario import Scenario

    sc = Scenario(group="medium", n_sys_att=8, n_rx_att=4, n_rx_ecu=4, unauthorized_rx=2, required=(1, 2),
                  unrequired=(8,))
    res = run(sc)
    assert res.status == "ok"
    denied = [n for n, st in res.statuses.items() if st == "wrong-key"]
    assert len(denied) == 2


def test_epoch_start_mode(baseline):
    res = run(baseline.replace(receiver_start="epoch"))
    assert res.status == "ok"


def test_live_mode(baseline):
    res = run(baseline.replace(mode="live"))
    assert res.status == "ok"
    # wall-clock costs on a modern CPU are far below the embedded tables
    assert res.crypto_s < 0.5


def test_chained_epoch_reuses_vehicle(baseline):
    first = Simulator(baseline)
    r1 = first.run()
    r2 = Simulator(baseline.replace(epoch=2), previous=first).run()
    assert r1.status == r2.status == "ok"
    assert r2.vehicle is r1.vehicle
    assert r2.sender_keys[1] != r1.sender_keys[1]
