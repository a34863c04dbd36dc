"""Symmetric building blocks: keyed PRF, truncated MAC, block-cipher PRP and the keyed shuffle.

* PRF: HMAC-SHA256 (32-byte output); tags are its first 16 bytes.
* PRP: AES-128 in CBC mode with an all-zero IV and 0x80-then-zeros padding.
  Deterministic on purpose; every call site keys it with a fresh session key.
* Shuffle: Fisher-Yates over 1..N driven by an HMAC-SHA256 counter stream.
"""

from __future__ import annotations

import hashlib
import hmac
from dataclasses import dataclass
from functools import cached_property

from cryptography.hazmat.primitives.ciphers import Cipher, algorithms, modes

from . import meter
from .errors import LengthError, PaddingError

KEY_LEN = 16
DIGEST_LEN = 32
TAG_LEN = 16
BLOCK = 16
_ZERO_IV = bytes(BLOCK)


def _check_key(key: bytes) -> None:
    if len(key) != KEY_LEN:
        raise LengthError(f"symmetric keys are {KEY_LEN} bytes, got {len(key)}")


def new_key(rng) -> bytes:
    return rng.randbytes(KEY_LEN)


def prf(key: bytes, data: bytes) -> bytes:
    _check_key(key)
    meter.charge("sha", len(data))
    return hmac.new(key, data, hashlib.sha256).digest()


def mac16(key: bytes, data: bytes) -> bytes:
    return prf(key, data)[:TAG_LEN]


def verify_mac16(key: bytes, data: bytes, tag: bytes) -> bool:
    return hmac.compare_digest(mac16(key, data), tag)


def digest(data: bytes) -> bytes:
    """Unkeyed SHA-256."""
    meter.charge("sha", len(data))
    return hashlib.sha256(data).digest()


def hash16(data: bytes) -> bytes:
    return digest(data)[:TAG_LEN]


def verify_hash16(data: bytes, tag: bytes) -> bool:
    return hmac.compare_digest(hash16(data), tag)


def pad(data: bytes) -> bytes:
    n = BLOCK - len(data) % BLOCK
    return data + b"\x80" + bytes(n - 1)


def unpad(data: bytes) -> bytes:
    stripped = data.rstrip(b"\x00")
    if not stripped or stripped[-1] != 0x80 or len(data) - len(stripped) >= BLOCK:
        raise PaddingError("malformed padding")
    return stripped[:-1]


def prp_encrypt(key: bytes, plaintext: bytes) -> bytes:
    _check_key(key)
    meter.charge("aes_enc", len(plaintext))
    enc = Cipher(algorithms.AES(key), modes.CBC(_ZERO_IV)).encryptor()
    return enc.update(pad(plaintext)) + enc.finalize()


def prp_decrypt(key: bytes, ciphertext: bytes) -> bytes:
    _check_key(key)
    if not ciphertext or len(ciphertext) % BLOCK:
        raise LengthError("ciphertext length must be a positive multiple of 16")
    meter.charge("aes_dec", len(ciphertext))
    dec = Cipher(algorithms.AES(key), modes.CBC(_ZERO_IV)).decryptor()
    return unpad(dec.update(ciphertext) + dec.finalize())


def xor(a: bytes, b: bytes) -> bytes:
    if len(a) != len(b):
        raise LengthError("xor operands differ in length")
    return bytes(x ^ y for x, y in zip(a, b))


def increment(nonce: bytes) -> bytes:
    """Big-endian +1 over the full nonce width, wrapping at the top."""
    width = len(nonce)
    return ((int.from_bytes(nonce, "big") + 1) % (1 << (8 * width))).to_bytes(width, "big")


@dataclass(frozen=True)
class Permutation:
    """A bijection on 1..size; ``forward[k]`` is the image of k+1."""

    forward: tuple[int, ...]

    @property
    def size(self) -> int:
        return len(self.forward)

    @cached_property
    def inverse(self) -> tuple[int, ...]:
        inv = [0] * self.size
        for k, image in enumerate(self.forward):
            inv[image - 1] = k + 1
        return tuple(inv)

    def apply(self, i: int) -> int:
        return self.forward[i - 1]

    def invert(self, i: int) -> int:
        return self.inverse[i - 1]


def _omega_bytes(omega: int) -> bytes:
    return omega.to_bytes(max(32, (omega.bit_length() + 7) // 8), "big")


def _stream_words(key: bytes):
    counter = 0
    while True:
        block = prf(key, counter.to_bytes(8, "big"))
        counter += 1
        for k in range(0, DIGEST_LEN, 8):
            yield int.from_bytes(block[k : k + 8], "big")


def keyed_shuffle(omega: int, n: int) -> Permutation:
    """Deterministic uniform permutation of 1..n keyed by the scalar ``omega``."""
    if n < 1:
        raise ValueError("permutation size must be at least 1")
    key = hashlib.sha256(b"ecsvc-shuffle" + _omega_bytes(omega)).digest()[:KEY_LEN]
    words = _stream_words(key)
    items = list(range(1, n + 1))
    for i in range(n - 1, 0, -1):
        bound = i + 1
        limit = (1 << 64) - (1 << 64) % bound
        while True:
            w = next(words)
            if w < limit:
                break
        j = w % bound
        items[i], items[j] = items[j], items[i]
    return Permutation(tuple(items))


def scalar_from_digest(d: bytes, params) -> int:
    return int.from_bytes(d, "big") % params.q
