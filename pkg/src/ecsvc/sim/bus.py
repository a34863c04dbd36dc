"""CAN-FD frames: dual-rate timing, fragmentation and identifier arbitration."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

from ..errors import FragmentError

MAX_PAYLOAD = 64
FRAG_HEADER = 5  # msg_id (1) | frag_index (2) | frag_total (2)
FRAG_DATA = MAX_PAYLOAD - FRAG_HEADER


@dataclass(frozen=True)
class BusConfig:
    arb_rate: float = 500_000
    data_rate: float = 4_000_000
    arb_phase_bits: int = 32
    data_overhead_bits: int = 45

    def __post_init__(self):
        if self.arb_rate <= 0 or self.data_rate <= 0:
            raise ValueError("bit rates must be positive")
        if self.arb_phase_bits < 0 or self.data_overhead_bits < 0:
            raise ValueError("overhead bit counts must be non-negative")


def frame_time(payload_len: int, cfg: BusConfig) -> float:
    """Seconds on the wire for one frame; bit stuffing is not modeled."""
    if not 0 <= payload_len <= MAX_PAYLOAD:
        raise ValueError(f"CAN-FD payload is at most {MAX_PAYLOAD} bytes, got {payload_len}")
    return cfg.arb_phase_bits / cfg.arb_rate + (cfg.data_overhead_bits + 8 * payload_len) / cfg.data_rate


@dataclass(frozen=True)
class CanFdFrame:
    can_id: int
    payload: bytes

    def __post_init__(self):
        if not 0 <= self.can_id < 0x800:
            raise ValueError("standard CAN identifiers are 11 bits")
        if len(self.payload) > MAX_PAYLOAD:
            raise ValueError("payload longer than 64 bytes")
        if len(self.payload) < FRAG_HEADER:
            raise FragmentError("frame too short for a fragment header")
        if self.frag_index >= self.frag_total:
            raise FragmentError("fragment index beyond total")

    @property
    def msg_id(self) -> int:
        return self.payload[0]

    @property
    def frag_index(self) -> int:
        return int.from_bytes(self.payload[1:3], "big")

    @property
    def frag_total(self) -> int:
        return int.from_bytes(self.payload[3:5], "big")

    @property
    def data(self) -> bytes:
        return self.payload[FRAG_HEADER:]


def fragment(msg: bytes, msg_id: int, can_id: int = 0) -> list[CanFdFrame]:
    total = max(1, math.ceil(len(msg) / FRAG_DATA))
    if total > 0xFFFF:
        raise FragmentError("message needs more than 65535 fragments")
    head = lambda k: bytes([msg_id & 0xFF]) + k.to_bytes(2, "big") + total.to_bytes(2, "big")
    return [CanFdFrame(can_id, head(k) + msg[k * FRAG_DATA : (k + 1) * FRAG_DATA]) for k in range(total)]


def reassemble(frames: Iterable[CanFdFrame]) -> bytes:
    frames = list(frames)
    if not frames:
        raise FragmentError("no frames")
    if len({f.msg_id for f in frames}) != 1:
        raise FragmentError("frames from more than one message")
    total = frames[0].frag_total
    if any(f.frag_total != total for f in frames):
        raise FragmentError("inconsistent fragment totals")
    parts = {f.frag_index: f.data for f in frames}
    if len(parts) != total:
        raise FragmentError(f"incomplete message: {len(parts)} of {total} fragments")
    return b"".join(parts[k] for k in range(total))


class Reassembler:
    """Collects fragments per (source node, msg_id) as they arrive."""

    def __init__(self):
        self._parts: dict[tuple[int, int], dict[int, CanFdFrame]] = {}

    def add(self, source: int, frame: CanFdFrame) -> bytes | None:
        key = (source, frame.msg_id)
        parts = self._parts.setdefault(key, {})
        parts[frame.frag_index] = frame
        if len(parts) < frame.frag_total:
            return None
        del self._parts[key]
        return reassemble(parts.values())


def arbitrate(pending):
    """Pick the winning (node, frame): lowest CAN id, then lowest node id."""
    pending = list(pending)
    if not pending:
        raise ValueError("nothing to arbitrate")
    return min(pending, key=lambda nf: (nf[1].can_id, nf[0]))
