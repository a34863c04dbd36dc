"""Zero-latency message network for driving the state machines without the bus model.

Messages are delivered FIFO.  An optional interceptor sees each encoded message
(with its index in the run) and may return substitute bytes or ``None`` to
drop it, which is how replay, reorder and bit-flip attacks are scripted.
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

from ..eabehp import AttributeSet, Policy
from ..errors import DecodeError
from . import alerts as A
from .alerts import Alert, AlertLog
from .provision import ProvisionedVehicle, provision
from .sessions import EcuNode, SecurityAgent
from .wire import SA_ID, Layout, WireMessage, decode

Interceptor = Callable[[int, bytes], "bytes | None"]


@dataclass
class RunResult:
    epoch: int
    statuses: dict[str, str]
    sender_keys: dict[int, bytes | None]
    receiver_keys: dict[str, bytes | None]
    alerts: list[Alert]
    transcript: list[bytes] = field(repr=False)

    def ok(self, name: str) -> bool:
        return self.statuses.get(name) == "mutual-auth-ok"

    @property
    def any_ok(self) -> bool:
        return any(s == "mutual-auth-ok" for s in self.statuses.values())

    @property
    def aborts(self) -> list[Alert]:
        return [a for a in self.alerts if a.abort]


class Network:
    def __init__(self, vehicle: ProvisionedVehicle, senders: Mapping[int, Policy],
                 subscriptions: Mapping[int, Sequence[int]], rng, expected_acks: Mapping[int, int] | None = None):
        self.vehicle = vehicle
        self.layout = Layout.of(vehicle.params, vehicle.n)
        self.log = AlertLog()
        self.rng = rng
        self.sa = SecurityAgent(vehicle.sa, self.layout, self.log, rng)
        expected_acks = expected_acks or {}
        self.ecus: dict[int, EcuNode] = {}
        for ecu_id, view in vehicle.ecus.items():
            self.ecus[ecu_id] = EcuNode(view, self.layout, self.log, rng, senders.get(ecu_id),
                                        subscriptions.get(ecu_id, ()), expected_acks.get(ecu_id))

    def nodes(self):
        return [self.sa] + [self.ecus[i] for i in sorted(self.ecus)]

    def sessions(self):
        return [s for i in sorted(self.ecus) for s in self.ecus[i].sessions()]

    def run(self, epoch: int, interceptor: Interceptor | None = None) -> RunResult:
        first_alert = len(self.log)
        queue: deque[WireMessage] = deque()
        for i in sorted(self.ecus):
            queue.extend(self.ecus[i].start(epoch))
        transcript: list[bytes] = []
        index = 0
        windows_closed = False
        while True:
            while queue:
                msg = queue.popleft()
                data = msg.encode()
                transcript.append(data)
                if interceptor is not None:
                    data = interceptor(index, data)
                index += 1
                if data is None:
                    continue
                try:
                    delivered = decode(data, self.layout)
                except DecodeError:
                    self.log.raise_("bus", 0, A.DECODE)
                    continue
                for node in self.nodes():
                    if node.accepts(delivered):
                        queue.extend(node.handle(delivered))
            if windows_closed:
                break
            windows_closed = True
            for i in sorted(self.ecus):
                queue.extend(self.ecus[i].close_windows())
        for s in self.sessions():
            if not s.done:
                self.log.raise_(s.name, 0, A.TIMEOUT)
        return RunResult(
            epoch=epoch,
            statuses={s.name: s.status for s in self.sessions()},
            sender_keys={i: e.sender.K for i, e in self.ecus.items() if e.sender is not None},
            receiver_keys={s.name: s.K for e in self.ecus.values() for s in e.receivers.values()},
            alerts=self.log.alerts[first_alert:],
            transcript=transcript,
        )


def pair_network(params, n: int, policy: Policy, rx_attrs, rng, tx_attrs=None) -> Network:
    """One sender (id 1) and one receiver (id 2) subscribed to it."""
    tx_attrs = tx_attrs or AttributeSet.of([1], n)
    vehicle = provision(params, n, [(1, tx_attrs), (2, rx_attrs)], rng)
    return Network(vehicle, {1: policy}, {2: [1]}, rng)


# Mutations: each one substitutes message ``k`` of the attacked run.

def flip_bit(data: bytes, bit: int) -> bytes:
    buf = bytearray(data)
    buf[bit // 8] ^= 1 << (bit % 8)
    return bytes(buf)


@dataclass(frozen=True)
class Mutation:
    kind: str  # "bitflip" | "replay" | "reorder"
    index: int
    source: int = 0  # bit position for bitflip, earlier index for reorder

    def interceptor(self, previous: Sequence[bytes], current: list[bytes]) -> Interceptor:
        def hook(i: int, data: bytes):
            current.append(data)
            if i != self.index:
                return data
            if self.kind == "bitflip":
                return flip_bit(data, self.source % (8 * len(data)))
            if self.kind == "replay":
                return previous[self.index]
            if self.kind == "reorder":
                return current[self.source]
            raise ValueError(f"unknown mutation {self.kind!r}")

        return hook


def random_mutation(kind: str, n_messages: int, rng: random.Random) -> Mutation:
    if kind == "bitflip":
        return Mutation(kind, rng.randrange(n_messages), rng.randrange(1 << 20))
    if kind == "replay":
        return Mutation(kind, rng.randrange(n_messages))
    if kind == "reorder":
        k = rng.randrange(1, n_messages)
        return Mutation(kind, k, rng.randrange(k))
    raise ValueError(f"unknown mutation {kind!r}")


def mutated_run(params, n: int, policy: Policy, rx_attrs, mutation: Mutation, seed: int) -> tuple[RunResult, RunResult]:
    """A clean epoch-1 run followed by a mutated epoch-2 run on the same vehicle."""
    rng = random.Random(seed)
    net = pair_network(params, n, policy, rx_attrs, rng)
    clean = net.run(1)
    current: list[bytes] = []
    attacked = net.run(2, mutation.interceptor(clean.transcript, current))
    return clean, attacked
