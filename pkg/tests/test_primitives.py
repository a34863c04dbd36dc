import hashlib
import random

import pytest

from conftest import read_vectors
from ecsvc import primitives as P
from ecsvc.errors import LengthError, PaddingError
from ecsvc.group import GroupParams


def hmac_reference(key, msg):
    """RFC 2104 from scratch, independent of the hmac module."""
    key = key.ljust(64, b"\0")
    inner = hashlib.sha256(bytes(k ^ 0x36 for k in key) + msg).digest()
    return hashlib.sha256(bytes(k ^ 0x5C for k in key) + inner).digest()


def test_reference_hmac_matches_rfc4231():
    assert hmac_reference(b"\x0b" * 20, b"Hi There").hex() == (
        "b0344c61d8db38535ca8afceaf0bf12b881dc200c9833da726e9376c2e32cff7")
    assert hmac_reference(b"Jefe", b"what do ya want for nothing?").hex() == (
        "5bdcc146bf60754e6a042426089575c75a003f089d2739839dec58b964ec3843")


@pytest.mark.parametrize("case", read_vectors("hmac_sha256.txt"))
def test_prf_known_answers(case):
    key, msg, mac = case
    assert P.prf(key, msg) == mac
    assert P.mac16(key, msg) == mac[:16]


@pytest.mark.parametrize("case", read_vectors("aes128_cbc_zero_iv.txt"))
def test_prp_known_answers(case):
    key, pt, ct = case
    out = P.prp_encrypt(key, pt)
    assert out[: len(ct)] == ct
    assert len(out) == len(pt) + 16  # a full padding block follows aligned input
    assert P.prp_decrypt(key, out) == pt


def test_prf_determinism_and_bit_sensitivity(rng):
    key = rng.randbytes(16)
    msg = rng.randbytes(48)
    assert P.prf(key, msg) == P.prf(key, msg)
    assert len(P.prf(key, msg)) == 32
    for bit in range(0, 48 * 8, 37):
        flipped = bytearray(msg)
        flipped[bit // 8] ^= 1 << (bit % 8)
        assert P.prf(key, bytes(flipped)) != P.prf(key, msg)


def test_mac16_rejects_any_single_bit_change():
    rng = random.Random(8)
    for _ in range(1000):
        key, msg = rng.randbytes(16), rng.randbytes(rng.randint(1, 64))
        tag = P.mac16(key, msg)
        assert P.verify_mac16(key, msg, tag)
        if rng.random() < 0.5:
            bit = rng.randrange(8 * len(msg))
            bad = bytearray(msg)
            bad[bit // 8] ^= 1 << (bit % 8)
            assert not P.verify_mac16(key, bytes(bad), tag)
        else:
            bit = rng.randrange(128)
            bad = bytearray(tag)
            bad[bit // 8] ^= 1 << (bit % 8)
            assert not P.verify_mac16(key, msg, bytes(bad))


def test_key_length_enforced():
    with pytest.raises(LengthError):
        P.prf(b"short", b"x")
    with pytest.raises(LengthError):
        P.prp_encrypt(bytes(15), b"x")


def test_hash16_is_digest_prefix():
    assert P.hash16(b"abc") == hashlib.sha256(b"abc").digest()[:16]
    assert P.verify_hash16(b"abc", P.hash16(b"abc"))
    assert not P.verify_hash16(b"abd", P.hash16(b"abc"))


def test_padding_rule():
    assert P.pad(b"") == b"\x80" + bytes(15)
    assert P.pad(b"A") == b"A\x80" + bytes(14)
    assert len(P.pad(bytes(16))) == 32
    assert len(P.prp_encrypt(bytes(16), b"x")) == 16
    for n in range(0, 50):
        assert P.unpad(P.pad(bytes([7]) * n)) == bytes([7]) * n


@pytest.mark.parametrize("bad", [bytes(16), b"\x01" * 16, b"abc\x80" + bytes(28)])
def test_unpad_rejects(bad):
    with pytest.raises(PaddingError):
        P.unpad(bad)


def test_prp_round_trip(rng):
    key = rng.randbytes(16)
    for n in list(range(0, 70)) + [48] * 20:
        pt = rng.randbytes(n)
        assert P.prp_decrypt(key, P.prp_encrypt(key, pt)) == pt


def test_prp_decrypt_errors(rng):
    key = rng.randbytes(16)
    with pytest.raises(LengthError):
        P.prp_decrypt(key, b"")
    with pytest.raises(LengthError):
        P.prp_decrypt(key, bytes(17))
    # Decrypting under the wrong key almost never yields valid padding.
    ct = P.prp_encrypt(key, bytes(15))
    failures = 0
    for _ in range(50):
        try:
            P.prp_decrypt(rng.randbytes(16), ct)
        except PaddingError:
            failures += 1
    assert failures >= 45


def test_xor_and_increment():
    assert P.xor(b"\x0f\xf0", b"\xff\xff") == b"\xf0\x0f"
    with pytest.raises(LengthError):
        P.xor(b"a", b"ab")
    assert P.increment(bytes(16)) == bytes(15) + b"\x01"
    assert P.increment(b"\x00\xff") == b"\x01\x00"
    assert P.increment(b"\xff" * 16) == bytes(16)


def test_shuffle_identity_for_one():
    for w in range(20):
        assert P.keyed_shuffle(w, 1).forward == (1,)


def test_shuffle_bijection():
    rng = random.Random(4)
    for n in range(1, 65):
        for _ in range(100 if n <= 16 else 10):
            perm = P.keyed_shuffle(rng.getrandbits(256), n)
            assert sorted(perm.forward) == list(range(1, n + 1))
            for i in range(1, n + 1):
                assert perm.apply(perm.invert(i)) == i
                assert perm.invert(perm.apply(i)) == i


def test_shuffle_determinism():
    assert P.keyed_shuffle(12345, 16) == P.keyed_shuffle(12345, 16)
    assert P.keyed_shuffle(12345, 16) != P.keyed_shuffle(12346, 16)


def test_shuffle_is_uniform_on_three_items():
    from scipy.stats import chisquare

    counts = {}
    for w in range(6000):
        f = P.keyed_shuffle(w, 3).forward
        counts[f] = counts.get(f, 0) + 1
    assert len(counts) == 6
    assert chisquare(list(counts.values())).pvalue > 0.001


def test_shuffle_rejects_empty():
    with pytest.raises(ValueError):
        P.keyed_shuffle(1, 0)


def test_scalar_from_digest():
    tiny = GroupParams(23, 11, 4)
    assert P.scalar_from_digest(bytes(32), tiny) == 0
    assert P.scalar_from_digest((25).to_bytes(32, "big"), tiny) == 3
    rng = random.Random(2)
    assert all(P.scalar_from_digest(rng.randbytes(32), tiny) < 11 for _ in range(200))
