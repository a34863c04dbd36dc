import random

import pytest

from ecsvc.errors import FragmentError
from ecsvc.sim.bus import FRAG_DATA, BusConfig, CanFdFrame, Reassembler, arbitrate, fragment, frame_time, reassemble


def test_frame_time_examples():
    cfg = BusConfig(500_000, 4_000_000)
    assert frame_time(64, cfg) == pytest.approx(203.25e-6, abs=1e-12)
    assert frame_time(0, cfg) == pytest.approx(75.25e-6, abs=1e-12)


def test_frame_time_rates():
    slow, fast = BusConfig(500_000, 1_000_000), BusConfig(500_000, 2_000_000)
    for n in (0, 8, 64):
        assert frame_time(n, fast) < frame_time(n, slow)
    assert frame_time(10, BusConfig(1_000_000, 4_000_000)) < frame_time(10, BusConfig(500_000, 4_000_000))
    with pytest.raises(ValueError):
        frame_time(65, slow)
    with pytest.raises(ValueError):
        BusConfig(0, 1)


@pytest.mark.parametrize("size,frames", [(0, 1), (1, 1), (59, 1), (60, 2), (4608, 79)])
def test_fragment_counts(size, frames):
    msg = bytes(range(256)) * (size // 256 + 1)
    out = fragment(msg[:size], 7, 0x123)
    assert len(out) == frames
    assert all(len(f.payload) <= 64 and f.can_id == 0x123 and f.msg_id == 7 for f in out)
    assert reassemble(out) == msg[:size]


def test_shuffled_reassembly():
    msg = random.Random(0).randbytes(1000)
    frames = fragment(msg, 1)
    random.Random(1).shuffle(frames)
    assert reassemble(frames) == msg
    r = Reassembler()
    got = [r.add(3, f) for f in frames]
    assert got[:-1] == [None] * (len(frames) - 1) and got[-1] == msg


def test_missing_fragment():
    frames = fragment(bytes(200), 1)
    with pytest.raises(FragmentError):
        reassemble(frames[:-1])
    with pytest.raises(FragmentError):
        reassemble([])


def test_mixed_messages():
    with pytest.raises(FragmentError):
        reassemble(fragment(bytes(100), 1)[:1] + fragment(bytes(100), 2)[1:])


def test_frame_validation():
    with pytest.raises(ValueError):
        CanFdFrame(0x800, bytes(5))
    with pytest.raises(FragmentError):
        CanFdFrame(1, bytes(4))
    with pytest.raises(FragmentError):
        CanFdFrame(1, b"\x00\x00\x02\x00\x02")
    assert FRAG_DATA == 59


def test_reassembler_keeps_sources_apart():
    r = Reassembler()
    a, b = fragment(b"a" * 100, 1), fragment(b"b" * 100, 1)
    assert r.add(1, a[0]) is None and r.add(2, b[0]) is None
    assert r.add(2, b[1]) == b"b" * 100
    assert r.add(1, a[1]) == b"a" * 100


def test_arbitration():
    pending = [(k, CanFdFrame(cid, b"\x00\x00\x00\x00\x01")) for k, cid in ((1, 5), (2, 3), (3, 9))]
    assert arbitrate(pending)[1].can_id == 3
    tie = [(4, CanFdFrame(3, b"\x00\x00\x00\x00\x01")), (2, CanFdFrame(3, b"\x00\x00\x00\x00\x01"))]
    assert arbitrate(tie)[0] == 2
    with pytest.raises(ValueError):
        arbitrate([])
