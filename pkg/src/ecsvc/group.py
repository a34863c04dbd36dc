"""Schnorr-group arithmetic: prime p, prime q | p-1, generator g of the order-q subgroup.

Group elements and scalars are plain Python ints.  Exponentiation goes through
gmpy2 when it is importable (set ``ECSVC_PUREPY=1`` to force the builtin ``pow``);
both backends give identical results and :func:`use_backend` switches at runtime.

None of this is constant time.  It exists to drive a simulation and its tests,
not to protect real keys.
"""

from __future__ import annotations

import hashlib
import os
import random
from dataclasses import dataclass
from typing import Iterable

from .errors import GenerationError, NoRequiredAttributeError

try:  # pragma: no cover - depends on the environment
    import gmpy2
except ImportError:  # pragma: no cover
    gmpy2 = None

GroupElement = int
Scalar = int


def _pow_builtin(b, e, m):
    return pow(b, e, m)


def _pow_gmpy2(b, e, m):
    return int(gmpy2.powmod(b, e, m))


_BACKENDS = {"python": _pow_builtin}
if gmpy2 is not None:
    _BACKENDS["gmpy2"] = _pow_gmpy2

BACKEND = "gmpy2" if gmpy2 is not None and not os.environ.get("ECSVC_PUREPY") else "python"
_powmod = _BACKENDS[BACKEND]


def available_backends() -> list[str]:
    return sorted(_BACKENDS)


def use_backend(name: str) -> str:
    """Select the modexp backend; returns the previously active name."""
    global BACKEND, _powmod
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}; have {available_backends()}")
    previous = BACKEND
    BACKEND, _powmod = name, _BACKENDS[name]
    return previous


@dataclass(frozen=True)
class GroupParams:
    p: int
    q: int
    g: int

    @property
    def element_len(self) -> int:
        return (self.p.bit_length() + 7) // 8

    @property
    def scalar_len(self) -> int:
        return (self.q.bit_length() + 7) // 8

    def validate(self) -> None:
        if (self.p - 1) % self.q:
            raise GenerationError("q does not divide p-1")
        if self.g in (0, 1) or pow(self.g, self.q, self.p) != 1:
            raise GenerationError("g does not generate the order-q subgroup")
        if not (is_probable_prime(self.p) and is_probable_prime(self.q)):
            raise GenerationError("p or q is composite")

    def dumps(self) -> str:
        return f"p = {self.p:#x}\nq = {self.q:#x}\ng = {self.g:#x}\n"

    @classmethod
    def loads(cls, text: str) -> "GroupParams":
        values = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            values[key.strip()] = int(value.strip(), 16)
        try:
            return cls(values["p"], values["q"], values["g"])
        except KeyError as exc:
            raise GenerationError(f"missing group field {exc}") from None


# Small primes for trial division ahead of Miller-Rabin.
_SMALL_PRIMES = [n for n in range(3, 2000, 2) if all(n % d for d in range(3, int(n**0.5) + 1, 2))]


def is_probable_prime(n: int, rounds: int = 40) -> bool:
    if n < 2:
        return False
    if n in (2, 3):
        return True
    if n % 2 == 0:
        return False
    for sp in _SMALL_PRIMES:
        if n == sp:
            return True
        if n % sp == 0:
            return False
    if gmpy2 is not None and BACKEND == "gmpy2":
        return bool(gmpy2.is_prime(n, rounds))
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    witness_rng = random.Random(n)
    for _ in range(rounds):
        a = witness_rng.randrange(2, n - 1)
        x = _powmod(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def generate_params(p_bits: int = 2048, q_bits: int = 256, seed: bytes = b"ecsvc") -> GroupParams:
    """Deterministically search for a Schnorr group of the requested sizes."""
    if q_bits >= p_bits:
        raise GenerationError("q_bits must be smaller than p_bits")
    if p_bits < 512:
        raise GenerationError("p_bits below 512 is only available through named_group()")
    if q_bits < 16:
        raise GenerationError("q_bits too small")
    rng = random.Random(int.from_bytes(hashlib.sha256(seed).digest(), "big"))

    for _ in range(200 * q_bits):
        q = rng.getrandbits(q_bits) | (1 << (q_bits - 1)) | 1
        if is_probable_prime(q):
            break
    else:
        raise GenerationError("no prime q found")

    k_bits = p_bits - q_bits
    for _ in range(100 * p_bits):
        k = rng.getrandbits(k_bits) | (1 << (k_bits - 1))
        k -= k % 2
        p = k * q + 1
        if p.bit_length() == p_bits and is_probable_prime(p):
            break
    else:
        raise GenerationError("no prime p = kq + 1 found")

    for h in range(2, 1 << 16):
        g = _powmod(h, (p - 1) // q, p)
        if g != 1:
            return GroupParams(p, q, g)
    raise GenerationError("no generator found")  # pragma: no cover


DEFAULT_SEED = b"ecsvc/default-2048"

_NAMED = {
    "tiny": GroupParams(23, 11, 4),
}


def named_group(name: str) -> GroupParams:
    """Return a named group: ``tiny`` (p=23), ``default`` (2048/256) or ``medium`` (512/160)."""
    if name in _NAMED:
        return _NAMED[name]
    if name == "default":
        from ._named import DEFAULT_2048

        return DEFAULT_2048
    if name == "medium":
        from ._named import MEDIUM_512

        return MEDIUM_512
    raise KeyError(f"unknown group {name!r}")


def exp(base: GroupElement, e: Scalar, params: GroupParams) -> GroupElement:
    return _powmod(base, e % params.q, params.p)


def mul(a: GroupElement, b: GroupElement, params: GroupParams) -> GroupElement:
    return a * b % params.p


def inv(a: GroupElement, params: GroupParams) -> GroupElement:
    return _powmod(a, params.q - 1, params.p)


def product(elements: Iterable[GroupElement], params: GroupParams) -> GroupElement:
    acc = 1
    for x in elements:
        acc = acc * x % params.p
    return acc


def is_member(x: int, params: GroupParams) -> bool:
    return 0 < x < params.p and _powmod(x, params.q, params.p) == 1


def random_scalar(params: GroupParams, rng) -> Scalar:
    return rng.randrange(params.q)


def random_nonzero_scalar(params: GroupParams, rng) -> Scalar:
    return rng.randrange(1, params.q)


def random_element(params: GroupParams, rng) -> GroupElement:
    return _powmod(params.g, rng.randrange(1, params.q), params.p)


def encode_element(x: GroupElement, params: GroupParams) -> bytes:
    return x.to_bytes(params.element_len, "big")


def decode_element(data: bytes, params: GroupParams) -> GroupElement:
    return int.from_bytes(data, "big")


def encode_scalar(x: Scalar, params: GroupParams) -> bytes:
    return x.to_bytes(params.scalar_len, "big")


def split_message(M: GroupElement, policy, params: GroupParams, rng) -> list[GroupElement]:
    """Split ``M`` into per-attribute tuples according to a trit policy.

    Irrelevant slots carry 1, Unrequired slots a fresh non-identity element and the
    Required slots random elements whose product is ``M``.
    """
    trits = list(policy)
    required = [i for i, t in enumerate(trits) if t == 1]
    if not required:
        raise NoRequiredAttributeError("policy has no Required attribute")
    tuples = []
    for t in trits:
        tuples.append(1 if t == 0 else random_element(params, rng))
    last = required[-1]
    rest = product((tuples[i] for i in required[:-1]), params)
    tuples[last] = mul(M, inv(rest, params), params)
    return tuples
