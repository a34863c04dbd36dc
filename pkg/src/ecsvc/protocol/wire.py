"""Byte-exact codec for the ten key-exchange messages.

Every message is ``type (1) || node_id (2, big-endian) || body``.  Body
layouts are fixed once the group and attribute universe are known, so the
codec needs a :class:`Layout`.  ``node_id`` is the originating ECU for
messages an ECU sends, and the destination ECU for messages the security
agent sends; the SA itself is node 0.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from ..errors import DecodeError
from ..primitives import BLOCK, TAG_LEN

NONCE_LEN = 16
EPOCH_LEN = 8
ID_LEN = 2
WRAP_LEN = 32
REQ_TAG = 0x01
SA_ID = 0


class MsgType(enum.IntEnum):
    HELLO = 1
    CHALLENGE = 2
    CIPHER_PUBLISH = 3
    REQUEST = 4
    REQUEST_CHALLENGE = 5
    CREDENTIAL_SUBMIT = 6
    PARTIAL_RESULT = 7
    KEY_DIGEST = 8
    RECEIVER_ACK = 9
    GROUP_LIST = 10


def padded_len(n: int) -> int:
    return (n // BLOCK + 1) * BLOCK


@dataclass(frozen=True)
class Layout:
    element_len: int
    n: int
    scalar_len: int

    @classmethod
    def of(cls, params, n: int) -> "Layout":
        return cls(params.element_len, n, params.scalar_len)

    @property
    def bitmap_len(self):
        return (self.n + 7) // 8

    @property
    def ciphertext_len(self):
        return 1 + (self.n + 2) * self.element_len

    @property
    def c1_len(self):
        return padded_len(self.bitmap_len + self.scalar_len)

    @property
    def c2_len(self):
        return padded_len((self.n + 1) * self.element_len + WRAP_LEN)

    def schema(self, t: MsgType):
        """Ordered (field, width) pairs; width None means 'the rest'."""
        T = TAG_LEN
        return {
            MsgType.HELLO: [("sigma1", T), ("n1", NONCE_LEN), ("r_k", EPOCH_LEN)],
            MsgType.CHALLENGE: [("sigma2", T), ("n2", NONCE_LEN)],
            MsgType.CIPHER_PUBLISH: [("sc", self.ciphertext_len), ("wrap", WRAP_LEN), ("sigma3", T)],
            MsgType.REQUEST: [("sigma4", T), ("n3", NONCE_LEN), ("r_k", EPOCH_LEN), ("req_info", 1 + ID_LEN)],
            MsgType.REQUEST_CHALLENGE: [("pub", ID_LEN), ("sigma5", T), ("n4", NONCE_LEN)],
            MsgType.CREDENTIAL_SUBMIT: [("pub", ID_LEN), ("c1", self.c1_len), ("sigma6", T)],
            MsgType.PARTIAL_RESULT: [("pub", ID_LEN), ("c2", self.c2_len), ("sigma7", T)],
            MsgType.KEY_DIGEST: [("sigma_k", T)],
            MsgType.RECEIVER_ACK: [("pub", ID_LEN), ("sigma8", T), ("c3", BLOCK)],
            MsgType.GROUP_LIST: [("sigma9", T), ("c4", None)],
        }[t]


@dataclass(frozen=True)
class WireMessage:
    msg_type: MsgType
    node_id: int
    fields: tuple[tuple[str, bytes], ...]

    @classmethod
    def make(cls, msg_type: MsgType, node_id: int, **fields: bytes) -> "WireMessage":
        return cls(MsgType(msg_type), node_id, tuple(fields.items()))

    def __getitem__(self, name: str) -> bytes:
        for key, value in self.fields:
            if key == name:
                return value
        raise KeyError(name)

    @property
    def pub(self) -> int:
        """Publisher id carried in the body, for the types that have one."""
        if self.msg_type == MsgType.REQUEST:
            return int.from_bytes(self["req_info"][1:], "big")
        return int.from_bytes(self["pub"], "big")

    def encode(self) -> bytes:
        return bytes([self.msg_type]) + self.node_id.to_bytes(ID_LEN, "big") + b"".join(v for _, v in self.fields)

    def __repr__(self):
        return f"WireMessage({self.msg_type.name}, node={self.node_id}, {len(self.encode())}B)"


def encode(msg: WireMessage, layout: Layout | None = None) -> bytes:
    """Serialize ``msg``; with a layout, field widths are checked first."""
    if layout is not None:
        for (name, width), (key, value) in zip(layout.schema(msg.msg_type), msg.fields):
            if name != key or (width is not None and len(value) != width):
                raise DecodeError(f"{msg.msg_type.name}.{key} does not match the layout")
    return msg.encode()


def decode(data: bytes, layout: Layout) -> WireMessage:
    if len(data) < 3:
        raise DecodeError("message shorter than its header")
    try:
        msg_type = MsgType(data[0])
    except ValueError:
        raise DecodeError(f"unknown message type 0x{data[0]:02x}") from None
    node_id = int.from_bytes(data[1:3], "big")
    body = data[3:]
    fields, pos = [], 0
    for name, width in layout.schema(msg_type):
        if width is None:
            width = len(body) - pos
            if width < BLOCK or width % BLOCK:
                raise DecodeError(f"{msg_type.name}.{name} is not a positive multiple of {BLOCK}")
        fields.append((name, body[pos : pos + width]))
        pos += width
    if pos != len(body) or any(len(v) == 0 for _, v in fields):
        raise DecodeError(f"{msg_type.name} body is {len(body)} bytes, layout expects {pos}")
    return WireMessage(msg_type, node_id, tuple(fields))


def message_len(msg_type: MsgType, layout: Layout, c4_len: int = BLOCK) -> int:
    widths = [w if w is not None else c4_len for _, w in layout.schema(msg_type)]
    return 3 + sum(widths)
