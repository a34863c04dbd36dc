"""Attribute-based encryption with hidden policy and credential, split for proxy decryption.

Pipeline (who runs what in the vehicle protocol)::

    setup / keygen                       trust authority, provisioning time
    time_key_gen, transform_user_key     every ECU holding the group key
    encrypt, shuffle                     sender ECU
    transform_ciphertext, extract,
    proxy_decrypt1                       security agent (honest but curious)
    inverse_permute_attrs,
    proxy_decrypt2                       receiver ECU

Attribute indices are 1-based throughout.  Policy trits are +1 (Required),
0 (Irrelevant) and -1 (Unrequired).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from . import meter
from .errors import AttributeRangeError, DecodeError, StageError
from .group import (
    GroupElement,
    GroupParams,
    Scalar,
    decode_element,
    encode_element,
    exp,
    inv,
    mul,
    product,
    random_nonzero_scalar,
    split_message,
)
from .primitives import digest, keyed_shuffle, new_key, scalar_from_digest

REQUIRED, IRRELEVANT, UNREQUIRED = 1, 0, -1


@dataclass(frozen=True)
class Policy:
    trits: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "trits", tuple(int(t) for t in self.trits))
        if not self.trits:
            raise ValueError("policy must cover at least one attribute")
        if any(t not in (REQUIRED, IRRELEVANT, UNREQUIRED) for t in self.trits):
            raise ValueError("policy entries must be +1, 0 or -1")

    def __len__(self):
        return len(self.trits)

    def __iter__(self):
        return iter(self.trits)

    @property
    def required(self) -> frozenset[int]:
        return frozenset(i for i, t in enumerate(self.trits, 1) if t == REQUIRED)

    @property
    def unrequired(self) -> frozenset[int]:
        return frozenset(i for i, t in enumerate(self.trits, 1) if t == UNREQUIRED)

    @classmethod
    def from_sets(cls, n: int, required: Iterable[int], unrequired: Iterable[int] = ()) -> "Policy":
        trits = [IRRELEVANT] * n
        for i in required:
            trits[i - 1] = REQUIRED
        for i in unrequired:
            if trits[i - 1] == REQUIRED:
                raise ValueError(f"attribute {i} cannot be both required and unrequired")
            trits[i - 1] = UNREQUIRED
        return cls(tuple(trits))


@dataclass(frozen=True)
class AttributeSet:
    """A subset of the attribute universe 1..n, kept sorted."""

    indices: tuple[int, ...]
    n: int

    def __post_init__(self):
        idx = tuple(sorted(self.indices))
        if len(set(idx)) != len(idx):
            raise AttributeRangeError("duplicate attribute index")
        if idx and (idx[0] < 1 or idx[-1] > self.n):
            raise AttributeRangeError(f"attribute index outside 1..{self.n}")
        object.__setattr__(self, "indices", idx)

    @classmethod
    def of(cls, indices: Iterable[int], n: int) -> "AttributeSet":
        return cls(tuple(indices), n)

    def __iter__(self):
        return iter(self.indices)

    def __len__(self):
        return len(self.indices)

    def __contains__(self, i):
        return i in self.indices

    def to_bitmap(self) -> bytes:
        bits = 0
        for i in self.indices:
            bits |= 1 << (i - 1)
        return bits.to_bytes((self.n + 7) // 8, "little")

    @classmethod
    def from_bitmap(cls, data: bytes, n: int) -> "AttributeSet":
        if len(data) != (n + 7) // 8:
            raise DecodeError("attribute bitmap has the wrong length")
        bits = int.from_bytes(data, "little")
        if bits >> n:
            raise AttributeRangeError("bitmap sets an attribute outside the universe")
        return cls(tuple(i + 1 for i in range(n) if bits >> i & 1), n)


@dataclass(frozen=True)
class MasterPublicKey:
    params: GroupParams
    pk_attrs: tuple[GroupElement, ...]

    @property
    def n(self) -> int:
        return len(self.pk_attrs)


@dataclass(frozen=True, repr=False)
class MasterKeyMaterial:
    params: GroupParams
    k_s: Scalar
    pk_attrs: tuple[GroupElement, ...]
    tk: tuple[Scalar, ...]
    k_group: bytes

    @property
    def n(self) -> int:
        return len(self.pk_attrs)

    @property
    def mpk(self) -> MasterPublicKey:
        return MasterPublicKey(self.params, self.pk_attrs)

    def __repr__(self):
        return f"MasterKeyMaterial(n={self.n}, <secret>)"


@dataclass(frozen=True, repr=False)
class UserKeyMaterial:
    id: int
    attr_set: AttributeSet
    sk: Mapping[int, Scalar]
    rk: Scalar
    k_pair: bytes = field(default=bytes(16))

    def __repr__(self):
        return f"UserKeyMaterial(id={self.id}, attrs={self.attr_set.indices}, <secret>)"


class Stage(enum.IntEnum):
    RAW = 0
    SHUFFLED = 1
    TRANSFORMED = 2


@dataclass(frozen=True)
class StagedCiphertext:
    stage: Stage
    A: GroupElement
    B: tuple[GroupElement, ...]
    D: GroupElement


@dataclass(frozen=True)
class ExtractedCiphertext:
    A: GroupElement
    B_prod: GroupElement
    D: GroupElement


@dataclass(frozen=True)
class PartialDecryption:
    sc_dd: GroupElement
    am: tuple[GroupElement, ...]


def setup(params: GroupParams, n: int, rng) -> MasterKeyMaterial:
    if n < 1:
        raise ValueError("the system needs at least one attribute")
    k_s = random_nonzero_scalar(params, rng)
    a = [random_nonzero_scalar(params, rng) for _ in range(n)]
    pk = tuple(exp(params.g, ai, params) for ai in a)
    tk = tuple((k_s - ai) % params.q for ai in a)
    return MasterKeyMaterial(params, k_s, pk, tk, new_key(rng))


def keygen(mk: MasterKeyMaterial, user_id: int, attr_set: AttributeSet, rng) -> UserKeyMaterial:
    if not len(attr_set):
        raise AttributeRangeError("a user needs at least one attribute")
    if attr_set.n != mk.n:
        raise AttributeRangeError(f"attribute set is over 1..{attr_set.n}, system has {mk.n}")
    q = mk.params.q
    sk = {i: random_nonzero_scalar(mk.params, rng) for i in attr_set}
    rk = sum(mk.k_s - a for a in sk.values()) % q
    return UserKeyMaterial(user_id, attr_set, sk, rk, new_key(rng))


def time_key_gen(k_group: bytes, r_k: bytes, params: GroupParams) -> Scalar:
    return scalar_from_digest(digest(r_k + k_group), params)


def transform_user_key(omega: Scalar, uk: UserKeyMaterial, params: GroupParams) -> Scalar:
    return (sum(uk.sk.values()) + omega) % params.q


def encrypt(
    mpk: MasterPublicKey,
    policy: Policy,
    omega: Scalar,
    M: GroupElement,
    rng,
    *,
    r: Scalar | None = None,
    tuples: Sequence[GroupElement] | None = None,
) -> StagedCiphertext:
    """Encrypt ``M`` under ``policy``.

    ``r`` and ``tuples`` pin the encryption randomness and the message split;
    they exist for worked examples and oracle tests.
    """
    params = mpk.params
    if len(policy) != mpk.n:
        raise AttributeRangeError(f"policy covers {len(policy)} attributes, system has {mpk.n}")
    meter.charge("encrypt_shuffle", mpk.n)
    with meter.covered():
        p = list(tuples) if tuples is not None else split_message(M, policy, params, rng)
        if r is None:
            r = random_nonzero_scalar(params, rng)
        A = exp(params.g, r, params)
        B = tuple(mul(pi, exp(pk, r, params), params) for pi, pk in zip(p, mpk.pk_attrs))
        D = exp(A, omega, params)
    return StagedCiphertext(Stage.RAW, A, B, D)


def _require(c: StagedCiphertext, stage: Stage) -> None:
    if c.stage != stage:
        raise StageError(f"expected a {stage.name} ciphertext, got {c.stage.name}")


def shuffle(c: StagedCiphertext, omega: Scalar) -> StagedCiphertext:
    _require(c, Stage.RAW)
    with meter.covered():
        perm = keyed_shuffle(omega, len(c.B))
    B_hat = tuple(c.B[perm.apply(i) - 1] for i in range(1, len(c.B) + 1))
    return StagedCiphertext(Stage.SHUFFLED, c.A, B_hat, c.D)


def transform_ciphertext(sc: StagedCiphertext, tk: Sequence[Scalar], params: GroupParams) -> StagedCiphertext:
    _require(sc, Stage.SHUFFLED)
    if len(tk) != len(sc.B):
        raise AttributeRangeError("transformation key and ciphertext lengths differ")
    meter.charge("transform", len(sc.B))
    B2 = tuple(mul(b, exp(sc.A, s, params), params) for b, s in zip(sc.B, tk))
    return StagedCiphertext(Stage.TRANSFORMED, sc.A, B2, sc.D)


def extract(sc2: StagedCiphertext, i_hat: AttributeSet, params: GroupParams) -> ExtractedCiphertext:
    _require(sc2, Stage.TRANSFORMED)
    if not len(i_hat):
        raise AttributeRangeError("cannot extract for an empty attribute set")
    if i_hat.n != len(sc2.B):
        raise AttributeRangeError("attribute universe does not match the ciphertext")
    meter.charge("extract_pd1", len(i_hat))
    return ExtractedCiphertext(sc2.A, product((sc2.B[i - 1] for i in i_hat), params), sc2.D)


def proxy_decrypt1(
    ec: ExtractedCiphertext, ak: Scalar, rk: Scalar, tk: Sequence[Scalar], params: GroupParams
) -> PartialDecryption:
    with meter.covered():
        blind = exp(ec.A, ak + rk, params)
        sc_dd = mul(mul(ec.D, ec.B_prod, params), inv(blind, params), params)
        am = tuple(exp(ec.A, s, params) for s in tk)
    return PartialDecryption(sc_dd, am)


def proxy_decrypt2(
    pd: PartialDecryption, i_r: AttributeSet, i_hat: AttributeSet, params: GroupParams
) -> GroupElement:
    if len(i_r) != len(i_hat):
        raise AttributeRangeError("real and permuted attribute sets differ in size")
    num = product((pd.am[i - 1] for i in i_r), params)
    den = product((pd.am[i - 1] for i in i_hat), params)
    return mul(mul(pd.sc_dd, num, params), inv(den, params), params)


def satisfies(policy: Policy, i_r: Iterable[int]) -> bool:
    held = set(i_r)
    return policy.required <= held and not (policy.unrequired & held)


def inverse_permute_attrs(i_r: AttributeSet, omega: Scalar, n: int) -> AttributeSet:
    perm = keyed_shuffle(omega, n)
    return AttributeSet(tuple(perm.invert(i) for i in i_r), n)


def ciphertext_len(params: GroupParams, n: int) -> int:
    return 1 + (n + 2) * params.element_len


def encode_ciphertext(c: StagedCiphertext, params: GroupParams) -> bytes:
    parts = [bytes([c.stage]), encode_element(c.A, params)]
    parts += [encode_element(b, params) for b in c.B]
    parts.append(encode_element(c.D, params))
    return b"".join(parts)


def decode_ciphertext(data: bytes, params: GroupParams, n: int) -> StagedCiphertext:
    if len(data) != ciphertext_len(params, n):
        raise DecodeError("ciphertext has the wrong length")
    try:
        stage = Stage(data[0])
    except ValueError:
        raise DecodeError(f"unknown ciphertext stage {data[0]}") from None
    w = params.element_len
    elems = [decode_element(data[1 + k * w : 1 + (k + 1) * w], params) for k in range(n + 2)]
    return StagedCiphertext(stage, elems[0], tuple(elems[1:-1]), elems[-1])


def partial_len(params: GroupParams, n: int) -> int:
    return (n + 1) * params.element_len


def encode_partial(pd: PartialDecryption, params: GroupParams) -> bytes:
    return encode_element(pd.sc_dd, params) + b"".join(encode_element(x, params) for x in pd.am)


def decode_partial(data: bytes, params: GroupParams, n: int) -> PartialDecryption:
    if len(data) != partial_len(params, n):
        raise DecodeError("partial decryption has the wrong length")
    w = params.element_len
    elems = [decode_element(data[k * w : (k + 1) * w], params) for k in range(n + 1)]
    return PartialDecryption(elems[0], tuple(elems[1:]))
