"""Alert records raised by the protocol state machines."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Callable

# Codes in use.  "duplicate-ack" is informational, the rest abort the message.
BAD_MAC = "bad-mac"
REPLAY = "replay"
STALE_EPOCH = "stale-epoch"
UNKNOWN_PEER = "unknown-peer"
UNKNOWN_SESSION = "unknown-session"
DECODE = "decode"
STATE = "state"
WRONG_KEY = "wrong-key"
AUTH_FAILURE = "mutual-auth-failure"
TIMEOUT = "timeout"
DUPLICATE_ACK = "duplicate-ack"


@dataclass(frozen=True)
class Alert:
    time: float
    session: str
    step: int
    code: str
    abort: bool = True

    def csv_row(self):
        return [f"{self.time:.9f}", self.session, self.step, self.code]


class AlertLog:
    def __init__(self, clock: Callable[[], float] = lambda: 0.0):
        self.clock = clock
        self.alerts: list[Alert] = []

    def raise_(self, session: str, step: int, code: str, abort: bool = True) -> Alert:
        alert = Alert(self.clock(), session, step, code, abort)
        self.alerts.append(alert)
        return alert

    def __iter__(self):
        return iter(self.alerts)

    def __len__(self):
        return len(self.alerts)

    def aborts(self) -> list[Alert]:
        return [a for a in self.alerts if a.abort]

    def codes(self) -> list[str]:
        return [a.code for a in self.alerts]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["time", "session", "step", "alert_code"])
        for a in self.alerts:
            w.writerow(a.csv_row())
        return buf.getvalue()
