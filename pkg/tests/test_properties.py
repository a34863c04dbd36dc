"""Property-based checks of the codecs and permutations."""

from hypothesis import given, settings
from hypothesis import strategies as st

from ecsvc import eabehp as E
from ecsvc.group import named_group
from ecsvc.primitives import keyed_shuffle, pad, prp_decrypt, prp_encrypt, unpad
from ecsvc.protocol.wire import Layout, MsgType, WireMessage, decode
from ecsvc.sim.bus import fragment, reassemble

TINY = named_group("tiny")
keys = st.binary(min_size=16, max_size=16)


@given(st.binary(max_size=300))
def test_pad_round_trip(data):
    padded = pad(data)
    assert len(padded) % 16 == 0 and len(padded) > len(data)
    assert unpad(padded) == data


@given(keys, st.binary(max_size=200))
def test_prp_round_trip(key, data):
    assert prp_decrypt(key, prp_encrypt(key, data)) == data


@given(st.binary(max_size=3000), st.integers(0, 255), st.randoms(use_true_random=False))
def test_fragment_round_trip(data, msg_id, rnd):
    frames = fragment(data, msg_id)
    rnd.shuffle(frames)
    assert reassemble(frames) == data


@given(st.integers(0, 2**256), st.integers(1, 40))
def test_shuffle_is_permutation(omega, n):
    perm = keyed_shuffle(omega, n)
    assert sorted(perm.forward) == list(range(1, n + 1))
    assert all(perm.invert(perm.apply(i)) == i for i in range(1, n + 1))


@given(st.lists(st.integers(1, 20), min_size=1, unique=True))
def test_bitmap_round_trip(indices):
    s = E.AttributeSet.of(indices, 20)
    assert E.AttributeSet.from_bitmap(s.to_bitmap(), 20) == s


@settings(max_examples=50)
@given(st.sampled_from(list(MsgType)), st.integers(0, 0xFFFF), st.data())
def test_wire_round_trip(t, node, data):
    layout = Layout.of(TINY, 9)
    fields = {}
    for name, width in layout.schema(t):
        width = 16 * data.draw(st.integers(1, 4)) if width is None else width
        fields[name] = data.draw(st.binary(min_size=width, max_size=width))
    msg = WireMessage.make(t, node, **fields)
    assert decode(msg.encode(), layout) == msg
