"""Per-node compute-cost model.

Symmetric primitives cost a fixed time per 48-byte input block (the unit the
reference measurements were taken at).  EABEHP algorithms are looked up by
attribute count and linearly interpolated between the measured points.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field

from ..errors import ExtrapolationError

ECU, SA600, SA1400 = "ECU", "SA600", "SA1400"
NODE_CLASSES = (ECU, SA600, SA1400)
SYM_BLOCK = 48

# Microseconds per operation on a 48-byte input.
SYM_US = {
    ECU: {"sha": 130.8, "aes_enc": 149.5, "aes_dec": 198.9},
    SA600: {"sha": 8.4, "aes_enc": 5.4, "aes_dec": 6.7},
    SA1400: {"sha": 3.6, "aes_enc": 12.7, "aes_dec": 13.8},
}

ATTR_KEYS = (4, 8, 12, 16, 20, 24, 28, 32)

# Milliseconds, indexed like ATTR_KEYS.  extract_pd1 is keyed by the receiver's
# attribute count, the other two by the system attribute count.
TABLE_MS = {
    (ECU, "encrypt_shuffle"): (144.7, 241.1, 338.8, 436.9, 529.5, 635.5, 714.8, 817.9),
    (SA600, "transform"): (7, 13, 20.9, 27.8, 34.4, 41.8, 47.6, 54.8),
    (SA1400, "transform"): (3, 6, 9, 12, 14.5, 17.5, 21.2, 23.6),
    (SA600, "extract_pd1"): (1.92, 2.05, 2.25, 2.46, 2.65, 3, 3.24, 3.64),
    (SA1400, "extract_pd1"): (0.82, 0.89, 0.96, 1.08, 1.12, 1.25, 1.44, 1.56),
}

SYM_OPS = ("sha", "aes_enc", "aes_dec")
TABLE_OPS = ("encrypt_shuffle", "transform", "extract_pd1")


@dataclass(frozen=True)
class CostModel:
    sym_us: dict = field(default_factory=lambda: {k: dict(v) for k, v in SYM_US.items()})
    table_ms: dict = field(default_factory=lambda: dict(TABLE_MS))
    keys: tuple = ATTR_KEYS
    allow_extrapolation: bool = False

    def __post_init__(self):
        if list(self.keys) != sorted(self.keys):
            raise ValueError("attribute-count keys must be sorted")
        for row in self.table_ms.values():
            if len(row) != len(self.keys) or min(row) < 0:
                raise ValueError("cost table rows must match the keys and be non-negative")
        for row in self.sym_us.values():
            if min(row.values()) < 0:
                raise ValueError("costs must be non-negative")


def _interpolate(keys, values, x, allow):
    if x < keys[0] or x > keys[-1]:
        if not allow:
            raise ExtrapolationError(f"attribute count {x} outside [{keys[0]}, {keys[-1]}]")
        lo = 0 if x < keys[0] else len(keys) - 2
    else:
        k = bisect.bisect_left(keys, x)
        if keys[k] == x:
            return values[k]
        lo = k - 1
    x0, x1 = keys[lo], keys[lo + 1]
    y0, y1 = values[lo], values[lo + 1]
    return max(0.0, y0 + (y1 - y0) * (x - x0) / (x1 - x0))


_SCALE = {"s": 1.0, "ms": 1e-3, "us": 1e-6}


def _convert(value, native, unit):
    if unit == native:
        return value
    return value * _SCALE[native] / _SCALE[unit]


def compute_cost(node_class: str, op_kind: str, attr_count: int = 0, model: CostModel | None = None,
                 unit: str = "s") -> float:
    """Modeled time for one operation on a ``node_class`` device.

    ``unit`` is "s", "ms" or "us"; asking for a table's own unit (us for the
    symmetric primitives, ms for EABEHP) returns the stored cell untouched.
    """
    model = model or DEFAULT_MODEL
    if unit not in _SCALE:
        raise ValueError(f"unknown unit {unit!r}")
    if node_class not in model.sym_us:
        raise ValueError(f"unknown node class {node_class!r}")
    if op_kind in SYM_OPS:
        return _convert(model.sym_us[node_class][op_kind], "us", unit)
    if op_kind not in TABLE_OPS:
        raise ValueError(f"unknown operation {op_kind!r}")
    try:
        row = model.table_ms[(node_class, op_kind)]
    except KeyError:
        raise ValueError(f"{node_class} does not run {op_kind}") from None
    return _convert(_interpolate(model.keys, row, attr_count, model.allow_extrapolation), "ms", unit)


def bill(charges, node_class: str, model: CostModel | None = None) -> float:
    """Total modeled seconds for a list of meter charges."""
    total = 0.0
    for kind, amount in charges:
        if kind in SYM_OPS:
            blocks = max(1, math.ceil(amount / SYM_BLOCK))
            total += blocks * compute_cost(node_class, kind, 0, model)
        else:
            total += compute_cost(node_class, kind, amount, model)
    return total


def sa_class(clock_mhz: int) -> str:
    if clock_mhz == 600:
        return SA600
    if clock_mhz == 1400:
        return SA1400
    raise ValueError(f"no cost table for an SA clocked at {clock_mhz} MHz (have 600, 1400)")


DEFAULT_MODEL = CostModel()
