"""Operation metering.

Crypto calls report what they did (``charge("sha", nbytes)``, ``charge("transform", n)``)
to whichever :class:`Meter` is active in the current context.  The simulator
turns the recorded charges into modeled compute time; outside a ``metering()``
block charges are dropped.

Algorithms whose cost is measured as a whole (EABEHP table rows) wrap their body
in :func:`covered` so the primitives they call internally are not billed twice.
"""

from __future__ import annotations

import contextlib
import contextvars
from collections import Counter
from dataclasses import dataclass, field

_active: contextvars.ContextVar["Meter | None"] = contextvars.ContextVar("ecsvc_meter", default=None)
_covered: contextvars.ContextVar[int] = contextvars.ContextVar("ecsvc_covered", default=0)


@dataclass
class Meter:
    charges: list[tuple[str, int]] = field(default_factory=list)

    def counts(self) -> Counter:
        return Counter(kind for kind, _ in self.charges)


def charge(kind: str, amount: int = 0) -> None:
    m = _active.get()
    if m is not None and not _covered.get():
        m.charges.append((kind, amount))


@contextlib.contextmanager
def metering():
    m = Meter()
    token = _active.set(m)
    try:
        yield m
    finally:
        _active.reset(token)


@contextlib.contextmanager
def covered():
    token = _covered.set(_covered.get() + 1)
    try:
        yield
    finally:
        _covered.reset(token)
