"""Discrete-event CAN-FD simulation of a complete key-exchange epoch.

Every node has one CPU.  A handler runs when the CPU picks the job up; its
modeled cost (from the meter charges, or measured wall time in live mode)
decides when the CPU frees up and when its output messages join the node's
transmit queue.  The bus arbitrates frame by frame among the queue heads.
"""

from __future__ import annotations

import csv
import heapq
import io
import random
import time
from collections import deque
from dataclasses import dataclass, field
from typing import Callable

from .. import meter
from ..errors import DecodeError, StallError
from ..protocol import alerts as A
from ..protocol.alerts import Alert, AlertLog
from ..protocol.provision import ProvisionedVehicle, provision
from ..protocol.sessions import EcuNode, SecurityAgent
from ..protocol.wire import SA_ID, Layout, MsgType, WireMessage, decode
from .bus import Reassembler, arbitrate, fragment, frame_time
from .costs import ECU, bill
from .scenario import Scenario, Topology

SA_CAN_ID = 0x010
SENDER_CAN_BASE = 0x100
RECEIVER_CAN_BASE = 0x200

# Same-instant ordering: frames land before CPUs finish, timers fire last.
_P_TX_END, _P_COMPUTE_END, _P_WAKE, _P_WINDOW = 0, 1, 2, 3


@dataclass(frozen=True)
class TraceEvent:
    time_s: float
    node: str
    kind: str  # compute-start | compute-end | tx-start | tx-end | rx | abort
    detail: str


@dataclass
class SimResult:
    scenario: Scenario
    trace: list[TraceEvent]
    statuses: dict[str, str]
    completion: dict[str, float]
    alerts: list[Alert]
    total_time_s: float
    crypto_s: float
    bus_s: float
    frames: int
    messages: int
    sender_keys: dict[int, bytes | None] = field(repr=False)
    receiver_keys: dict[str, bytes | None] = field(repr=False)
    topology: Topology = field(repr=False)
    sa: SecurityAgent = field(repr=False)
    stalled: list[str] = field(default_factory=list)
    vehicle: ProvisionedVehicle | None = field(default=None, repr=False)
    ecus: dict[int, EcuNode] = field(default_factory=dict, repr=False)
    transcript: list[bytes] = field(default_factory=list, repr=False)

    @property
    def status(self) -> str:
        """'ok' when every authorized receiver authenticated and nobody else got the key."""
        if self.stalled:
            return "stall"
        for rid in self.topology.receivers:
            for pub in self.topology.subscriptions[rid]:
                st = self.statuses[f"R{rid}/S{pub}"]
                want = "mutual-auth-ok" if rid in self.topology.authorized else A.WRONG_KEY
                if st != want:
                    return "abort"
        return "ok"

    def trace_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["time_s", "node", "kind", "detail"])
        for ev in self.trace:
            w.writerow([f"{ev.time_s:.9f}", ev.node, ev.kind, ev.detail])
        return buf.getvalue()

    def alerts_csv(self) -> str:
        log = AlertLog()
        log.alerts = list(self.alerts)
        return log.to_csv()


class _Node:
    __slots__ = ("key", "name", "obj", "node_class", "can_id", "inbox", "busy", "tx", "msg_counter")

    def __init__(self, key, name, obj, node_class, can_id):
        self.key, self.name, self.obj = key, name, obj
        self.node_class, self.can_id = node_class, can_id
        self.inbox: deque = deque()
        self.busy = False
        self.tx: deque = deque()
        self.msg_counter = 0


def _union_length(intervals, stop=float("inf")) -> float:
    """Measure of the union of [a, b) intervals, clipped at ``stop``."""
    total, end = 0.0, float("-inf")
    for a, b in sorted((a, min(b, stop)) for a, b in intervals if a < stop):
        if a > end:
            total += b - a
            end = b
        elif b > end:
            total += b - end
            end = b
    return total


class Simulator:
    def __init__(self, scenario: Scenario, interceptor: Callable[[int, bytes], bytes | None] | None = None,
                 previous: "Simulator | None" = None):
        """``previous`` continues an earlier run's vehicle and nodes (nonce caches included)."""
        self.sc = scenario
        self.interceptor = interceptor
        self.rng = previous.rng if previous is not None else random.Random(scenario.seed)
        self.topology = scenario.topology()
        params, n = scenario.params, scenario.n_sys_att
        if previous is not None:
            vehicle = previous.vehicle
        else:
            specs = [(i, self.topology.attrs[i]) for i in sorted(self.topology.attrs)]
            vehicle = provision(params, n, specs, self.rng)
        self.vehicle = vehicle
        self.layout = Layout.of(params, n)
        self.bus = scenario.bus
        self.model = scenario.cost_model
        self.now = 0.0
        self.log = AlertLog(clock=lambda: self.now)

        policy = scenario.policy
        expected = self.topology.expected_acks()
        self.nodes: dict[int, _Node] = {}
        if previous is not None:
            sa = previous.sa
            sa.log = self.log
        else:
            sa = SecurityAgent(vehicle.sa, self.layout, self.log, self.rng)
        self.nodes[SA_ID] = _Node(SA_ID, "SA", sa, scenario.sa_node_class, SA_CAN_ID)
        for ecu_id in sorted(vehicle.ecus):
            is_sender = ecu_id in self.topology.senders
            if previous is not None:
                obj = previous.nodes[ecu_id].obj
                obj.log = self.log
            else:
                obj = EcuNode(vehicle.ecus[ecu_id], self.layout, self.log, self.rng,
                              policy if is_sender else None, self.topology.subscriptions.get(ecu_id, ()),
                              expected.get(ecu_id) or None)
            can_id = (SENDER_CAN_BASE if is_sender else RECEIVER_CAN_BASE) + ecu_id
            self.nodes[ecu_id] = _Node(ecu_id, f"ECU{ecu_id}", obj, ECU, can_id)

        self._heap: list = []
        self._seq = 0
        self._bus_busy = False
        self._bus_assembly = Reassembler()
        self._msg_index = 0
        self.trace: list[TraceEvent] = []
        self._compute_iv: list[tuple[float, float]] = []
        self._tx_iv: list[tuple[float, float]] = []
        self._completion: dict[str, float] = {}
        self._frames = 0
        self._messages = 0
        self.transcript: list[bytes] = []

    @property
    def sa(self) -> SecurityAgent:
        return self.nodes[SA_ID].obj

    def _ecus(self):
        return [self.nodes[k] for k in sorted(self.nodes) if k != SA_ID]

    def _sessions(self):
        return [s for node in self._ecus() for s in node.obj.sessions()]

    def _push(self, t, prio, kind, payload=None):
        heapq.heappush(self._heap, (t, prio, self._seq, kind, payload))
        self._seq += 1

    def _trace(self, node, kind, detail):
        self.trace.append(TraceEvent(self.now, node, kind, detail))

    # --- CPU ---------------------------------------------------------------

    def _run_job(self, node: _Node, job):
        kind = job[0]
        if kind == "start":
            if self.sc.receiver_start == "on-publish":
                return node.obj.sender.start(self.sc.epoch), "start"
            return node.obj.start(self.sc.epoch), "start"
        if kind == "start-rx":
            return node.obj.start_receiver(job[1], self.sc.epoch), f"start request to S{job[1]}"
        if kind == "close":
            return node.obj.close_windows(), "close-window"
        msg = job[1]
        return node.obj.handle(msg, self.now), f"handle {msg.msg_type.name} from node {msg.node_id}"

    def _try_compute(self, node: _Node):
        if node.busy or not node.inbox:
            return
        job = node.inbox.popleft()
        n_alerts = len(self.log)
        with meter.metering() as m:
            t0 = time.perf_counter()
            outputs, detail = self._run_job(node, job)
            elapsed = time.perf_counter() - t0
        cost = elapsed if self.sc.mode == "live" else bill(m.charges, node.node_class, self.model)
        self._trace(node.name, "compute-start", detail)
        for alert in self.log.alerts[n_alerts:]:
            if alert.abort:
                self._trace(node.name, "abort", f"{alert.session} step {alert.step} {alert.code}")
        end = self.now + cost
        node.busy = True
        self._compute_iv.append((self.now, end))
        if node.key != SA_ID:
            for s in node.obj.sessions():
                if s.done and s.name not in self._completion:
                    self._completion[s.name] = end
            sender = node.obj.sender
            if (job[0] == "msg" and sender is not None and sender.state == "published"
                    and sender.last_ack_time == self.now):
                self._push(end + self.sc.ack_window_s, _P_WINDOW, "window", (node.key, len(sender.acked)))
        self._push(end, _P_COMPUTE_END, "compute_end", (node, outputs, cost))

    def _compute_end(self, node: _Node, outputs, cost):
        node.busy = False
        self._trace(node.name, "compute-end", f"{cost * 1e3:.6f} ms")
        for msg in outputs:
            self._enqueue_tx(node, msg)
        self._try_compute(node)
        self._try_bus()

    # --- bus ---------------------------------------------------------------

    def _enqueue_tx(self, node: _Node, msg: WireMessage):
        data = msg.encode()
        self.transcript.append(data)
        if self.interceptor is not None:
            data = self.interceptor(self._msg_index, data)
        self._msg_index += 1
        if data is None:
            return
        self._messages += 1
        node.tx.extend(fragment(data, node.msg_counter & 0xFF, node.can_id))
        node.msg_counter += 1

    def _try_bus(self):
        if self._bus_busy:
            return
        pending = [(n.key, n.tx[0]) for n in self.nodes.values() if n.tx]
        if not pending:
            return
        key, frame = arbitrate(pending)
        node = self.nodes[key]
        node.tx.popleft()
        self._bus_busy = True
        dur = frame_time(len(frame.payload), self.bus)
        self._trace(node.name, "tx-start",
                    f"id=0x{frame.can_id:03x} msg={frame.msg_id} frag={frame.frag_index + 1}/{frame.frag_total} "
                    f"len={len(frame.payload)}")
        self._tx_iv.append((self.now, self.now + dur))
        self._frames += 1
        self._push(self.now + dur, _P_TX_END, "tx_end", (node, frame))

    def _tx_end(self, node: _Node, frame):
        self._bus_busy = False
        self._trace(node.name, "tx-end", f"id=0x{frame.can_id:03x} msg={frame.msg_id} frag={frame.frag_index + 1}")
        data = self._bus_assembly.add(node.key, frame)
        if data is not None:
            try:
                msg = decode(data, self.layout)
            except DecodeError:
                self.log.raise_("bus", 0, A.DECODE)
                self._trace(node.name, "abort", "bus step 0 decode")
                msg = None
            if msg is not None:
                if self.sc.receiver_start == "on-publish" and msg.msg_type == MsgType.CIPHER_PUBLISH:
                    self._wake_subscribers(msg.node_id)
                for other in self.nodes.values():
                    if other is not node and other.obj.accepts(msg):
                        self._trace(other.name, "rx", f"{msg.msg_type.name} from {node.name}")
                        other.inbox.append(("msg", msg))
                        self._try_compute(other)
        self._try_bus()

    def _wake_subscribers(self, pub: int):
        """Receivers that follow ``pub`` saw its ciphertext go by and now ask for the key."""
        for node in self._ecus():
            rs = node.obj.receivers.get(pub)
            if rs is not None and rs.state == "fresh" and (node.key, pub) not in self._woken:
                self._woken.add((node.key, pub))
                node.inbox.append(("start-rx", pub))
                self._try_compute(node)

    def _window(self, ecu_key, acks_then):
        node = self.nodes[ecu_key]
        sender = node.obj.sender
        if sender is not None and sender.state == "published" and len(sender.acked) == acks_then:
            node.inbox.append(("close",))
            self._try_compute(node)

    # --- main loop ---------------------------------------------------------

    def run(self, on_stall: str = "raise") -> SimResult:
        self._woken = set()
        on_publish = self.sc.receiver_start == "on-publish"
        for node in self._ecus():
            if on_publish:
                node.obj.prepare(self.sc.epoch)
                if node.obj.sender is None:
                    continue
            node.inbox.append(("start",))
            self._push(0.0, _P_WAKE, "wake", node)
        drained = False
        while True:
            while self._heap:
                t, _, _, kind, payload = heapq.heappop(self._heap)
                self.now = t
                if kind == "wake":
                    self._try_compute(payload)
                elif kind == "compute_end":
                    self._compute_end(*payload)
                elif kind == "tx_end":
                    self._tx_end(*payload)
                elif kind == "window":
                    self._window(*payload)
            if drained:
                break
            drained = True
            # Quiescent: senders still collecting acks close their window now.
            for node in self._ecus():
                if node.obj.sender is not None and node.obj.sender.state == "published":
                    node.inbox.append(("close",))
                    self._try_compute(node)
            if self._heap:
                drained = False
        stuck = sorted(s.name for s in self._sessions() if not s.done)
        if stuck:
            if on_stall == "raise":
                raise StallError(stuck)
            for name in stuck:
                self.log.raise_(name, 0, A.TIMEOUT)
                self._trace(name, "abort", f"{name} step 0 {A.TIMEOUT}")
        total = max(self._completion.values(), default=self.now) if not stuck else self.now
        return SimResult(
            scenario=self.sc,
            trace=self.trace,
            statuses={s.name: s.status for s in self._sessions()},
            completion=dict(self._completion),
            alerts=list(self.log.alerts),
            total_time_s=total,
            crypto_s=_union_length(self._compute_iv, total),
            bus_s=_union_length(self._tx_iv, total),
            frames=self._frames,
            messages=self._messages,
            sender_keys={n.key: n.obj.sender.K for n in self._ecus() if n.obj.sender is not None},
            receiver_keys={s.name: s.K for n in self._ecus() for s in n.obj.receivers.values()},
            topology=self.topology,
            sa=self.sa,
            stalled=stuck,
            vehicle=self.vehicle,
            ecus={n.key: n.obj for n in self._ecus()},
            transcript=list(self.transcript),
        )


def run(scenario: Scenario, seed: int | None = None, interceptor=None, on_stall: str = "raise") -> SimResult:
    """Simulate one epoch of ``scenario`` (``seed`` overrides the scenario's own)."""
    if seed is not None:
        scenario = scenario.replace(seed=seed)
    return Simulator(scenario, interceptor).run(on_stall)
