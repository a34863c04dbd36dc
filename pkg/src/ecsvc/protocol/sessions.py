"""Message-driven state machines for the sender ECU, the receiver ECUs and the security agent.

Each handler takes a decoded :class:`WireMessage` and returns the messages to
send next.  Nothing here knows about time or the bus; the caller (the test
network or the CAN-FD simulator) moves messages around and supplies a clock to
the shared :class:`AlertLog`.

A message that fails verification is dropped with an abort-class alert and the
session keeps waiting for a valid one, so an injected frame cannot kill an
honest exchange on its own.
"""

from __future__ import annotations

from collections import OrderedDict

from .. import eabehp
from ..eabehp import AttributeSet, Policy
from ..errors import AttributeRangeError, DecodeError, LengthError, PaddingError, ProtocolStateError, StageError
from ..group import encode_element, encode_scalar, random_element
from ..primitives import (
    digest,
    hash16,
    increment,
    mac16,
    new_key,
    prp_decrypt,
    prp_encrypt,
    verify_hash16,
    verify_mac16,
    xor,
)
from . import alerts as A
from .alerts import AlertLog
from .provision import EcuView, SaView
from .wire import ID_LEN, NONCE_LEN, REQ_TAG, SA_ID, WRAP_LEN, Layout, MsgType, WireMessage

NONCE_CACHE = 64


def _id(i: int) -> bytes:
    return i.to_bytes(ID_LEN, "big")


def epoch_bytes(epoch: int) -> bytes:
    return epoch.to_bytes(8, "big")


def sender_name(sid: int) -> str:
    return f"S{sid}"


def receiver_name(rid: int, pub: int) -> str:
    return f"R{rid}/S{pub}"


class NonceCache:
    """Last ``size`` nonces seen per (peer, epoch)."""

    def __init__(self, size: int = NONCE_CACHE):
        self.size = size
        self._seen: dict[tuple, OrderedDict] = {}

    def check_and_add(self, key, nonce: bytes) -> bool:
        """True if ``nonce`` is fresh for ``key`` (and remember it)."""
        seen = self._seen.setdefault(key, OrderedDict())
        if nonce in seen:
            return False
        seen[nonce] = None
        if len(seen) > self.size:
            seen.popitem(last=False)
        return True


class SenderSession:
    """Publishing side: steps 1, 3, 9 and 11."""

    def __init__(self, ecu: EcuView, policy: Policy, layout: Layout, log: AlertLog, rng, nonces: NonceCache,
                 expected_acks: int | None = None):
        self.ecu = ecu
        self.policy = policy
        self.layout = layout
        self.log = log
        self.rng = rng
        self.nonces = nonces
        self.expected_acks = expected_acks
        self.name = sender_name(ecu.id)
        self.state = "fresh"
        self.K: bytes | None = None
        self.commitment = self.k_wrapped = self.omega = None
        self.acked: list[int] = []
        self.last_ack_time: float | None = None

    @property
    def params(self):
        return self.ecu.mpk.params

    @property
    def done(self):
        return self.state == "closed"

    @property
    def status(self):
        return "group-list-sent" if self.done else "incomplete"

    def _alert(self, step, code, abort=True):
        self.log.raise_(self.name, step, code, abort)
        return []

    def start(self, epoch: int) -> list[WireMessage]:
        if self.state != "fresh":
            raise ProtocolStateError(f"{self.name} already started")
        self.r_k = epoch_bytes(epoch)
        self.n1 = self.rng.randbytes(NONCE_LEN)
        sigma1 = mac16(self.ecu.k_pair, _id(self.ecu.id) + self.n1 + self.r_k)
        self.state = "hello"
        return [WireMessage.make(MsgType.HELLO, self.ecu.id, sigma1=sigma1, n1=self.n1, r_k=self.r_k)]

    def on_challenge(self, msg: WireMessage) -> list[WireMessage]:
        if self.state != "hello":
            return self._alert(3, A.REPLAY if self.state != "fresh" else A.STATE)
        me = _id(self.ecu.id)
        n2 = msg["n2"]
        if not verify_mac16(self.ecu.k_pair, me + increment(self.n1) + n2, msg["sigma2"]):
            return self._alert(3, A.BAD_MAC)
        if not self.nonces.check_and_add((SA_ID, self.r_k), n2):
            return self._alert(3, A.REPLAY)
        params = self.params
        ck = mac16(self.ecu.k_pair, me + increment(self.n1) + increment(n2))
        omega = eabehp.time_key_gen(self.ecu.k_group, self.r_k, params)
        self.K = new_key(self.rng)
        k_wrapped = prp_encrypt(self.ecu.k_group, self.K)
        # The EABEHP plaintext is a random subgroup element; K' rides XORed with its hash.
        M = random_element(params, self.rng)
        self.commitment, self.k_wrapped, self.omega = M, k_wrapped, omega
        wrap = xor(k_wrapped, digest(encode_element(M, params)))
        sc = eabehp.shuffle(eabehp.encrypt(self.ecu.mpk, self.policy, omega, M, self.rng), omega)
        sc_bytes = eabehp.encode_ciphertext(sc, params)
        sigma3 = mac16(ck, me + sc_bytes + wrap)
        sigma_k = mac16(self.ecu.k_group, self.K)
        self.state = "published"
        return [
            WireMessage.make(MsgType.CIPHER_PUBLISH, self.ecu.id, sc=sc_bytes, wrap=wrap, sigma3=sigma3),
            WireMessage.make(MsgType.KEY_DIGEST, self.ecu.id, sigma_k=sigma_k),
        ]

    def on_ack(self, msg: WireMessage, now: float = 0.0) -> list[WireMessage]:
        if self.state != "published":
            return self._alert(11, A.REPLAY if self.done else A.STATE)
        c3 = msg["c3"]
        if not verify_hash16(self.K + c3, msg["sigma8"]):
            return self._alert(11, A.BAD_MAC)
        try:
            plain = prp_decrypt(self.K, c3)
        except (PaddingError, LengthError):
            return self._alert(11, A.DECODE)
        if len(plain) != ID_LEN or int.from_bytes(plain, "big") != msg.node_id:
            return self._alert(11, A.BAD_MAC)
        if msg.node_id in self.acked:
            return self._alert(11, A.DUPLICATE_ACK, abort=False)
        self.acked.append(msg.node_id)
        self.last_ack_time = now
        if self.expected_acks is not None and len(self.acked) >= self.expected_acks:
            return self.close_window()
        return []

    def close_window(self) -> list[WireMessage]:
        """End ack collection and broadcast the group list (no-op unless published)."""
        if self.state != "published":
            return []
        c4 = prp_encrypt(self.K, b"".join(_id(i) for i in self.acked))
        sigma9 = hash16(self.K + c4)
        self.state = "closed"
        return [WireMessage.make(MsgType.GROUP_LIST, self.ecu.id, sigma9=sigma9, c4=c4)]


class ReceiverSession:
    """Subscribing side for one publisher: steps 5, 7, 9, 10 and 12."""

    def __init__(self, ecu: EcuView, pub: int, layout: Layout, log: AlertLog, rng, nonces: NonceCache):
        self.ecu = ecu
        self.pub = pub
        self.layout = layout
        self.log = log
        self.rng = rng
        self.nonces = nonces
        self.name = receiver_name(ecu.id, pub)
        self.state = "fresh"
        self.sigma_k: bytes | None = None
        self.K: bytes | None = None
        self._candidate: bytes | None = None

    @property
    def params(self):
        return self.ecu.mpk.params

    @property
    def done(self):
        return self.state in ("ok", "failed", "denied")

    @property
    def status(self):
        return {
            "ok": "mutual-auth-ok",
            "failed": A.AUTH_FAILURE,
            "denied": A.WRONG_KEY,
        }.get(self.state, "incomplete")

    def _alert(self, step, code, abort=True):
        self.log.raise_(self.name, step, code, abort)
        return []

    def _tag_prefix(self):
        return _id(self.ecu.id) + _id(self.pub)

    def start(self, epoch: int) -> list[WireMessage]:
        if self.state != "fresh":
            raise ProtocolStateError(f"{self.name} already started")
        params = self.params
        self.r_k = epoch_bytes(epoch)
        # Computed by the receiver itself: the SA never holds K_group.
        self.omega = eabehp.time_key_gen(self.ecu.k_group, self.r_k, params)
        self.ak = eabehp.transform_user_key(self.omega, self.ecu.uk, params)
        self.n3 = self.rng.randbytes(NONCE_LEN)
        req_info = bytes([REQ_TAG]) + _id(self.pub)
        sigma4 = mac16(self.ecu.k_pair, _id(self.ecu.id) + self.n3 + self.r_k + req_info)
        self.state = "requested"
        return [WireMessage.make(MsgType.REQUEST, self.ecu.id, sigma4=sigma4, n3=self.n3, r_k=self.r_k,
                                 req_info=req_info)]

    def on_request_challenge(self, msg: WireMessage) -> list[WireMessage]:
        if self.state != "requested":
            return self._alert(7, A.STATE if self.state == "fresh" else A.REPLAY)
        n4 = msg["n4"]
        base = self._tag_prefix() + increment(self.n3)
        if not verify_mac16(self.ecu.k_pair, base + n4, msg["sigma5"]):
            return self._alert(7, A.BAD_MAC)
        if not self.nonces.check_and_add((SA_ID, self.r_k), n4):
            return self._alert(7, A.REPLAY)
        params, n = self.params, self.layout.n
        self.ck = mac16(self.ecu.k_pair, self._tag_prefix() + increment(self.n3) + increment(n4))
        self.i_hat = eabehp.inverse_permute_attrs(self.ecu.uk.attr_set, self.omega, n)
        ak_bytes = encode_scalar(self.ak, params)
        c1 = prp_encrypt(self.ck, self.i_hat.to_bitmap() + ak_bytes)
        sigma6 = hash16(c1 + ak_bytes)
        self.state = "submitted"
        return [WireMessage.make(MsgType.CREDENTIAL_SUBMIT, self.ecu.id, pub=_id(self.pub), c1=c1, sigma6=sigma6)]

    def on_key_digest(self, msg: WireMessage) -> list[WireMessage]:
        if self.sigma_k is not None:
            return self._alert(9, A.REPLAY)
        if self.done:
            return []
        self.sigma_k = msg["sigma_k"]
        if self.state == "recovered":
            return self._finish()
        return []

    def on_partial(self, msg: WireMessage) -> list[WireMessage]:
        if self.state != "submitted":
            return self._alert(10, A.STATE if self.state in ("fresh", "requested") else A.REPLAY)
        params, layout = self.params, self.layout
        c2 = msg["c2"]
        try:
            plain = prp_decrypt(self.ck, c2)
        except (PaddingError, LengthError):
            return self._alert(10, A.BAD_MAC)
        e = layout.element_len
        if len(plain) != (layout.n + 1) * e + WRAP_LEN:
            return self._alert(10, A.DECODE)
        partial_bytes, wrap = plain[:-WRAP_LEN], plain[-WRAP_LEN:]
        if not verify_hash16(c2 + partial_bytes[:e], msg["sigma7"]):
            return self._alert(10, A.BAD_MAC)
        pd = eabehp.decode_partial(partial_bytes, params, layout.n)
        m = eabehp.proxy_decrypt2(pd, self.ecu.uk.attr_set, self.i_hat, params)
        k_wrapped = xor(wrap, digest(encode_element(m, params)))
        try:
            self._candidate = prp_decrypt(self.ecu.k_group, k_wrapped)
        except PaddingError:
            self._candidate = None
        self.state = "recovered"
        if self.sigma_k is None:
            return []
        return self._finish()

    def _finish(self) -> list[WireMessage]:
        K = self._candidate
        if K is None or len(K) != 16 or not verify_mac16(self.ecu.k_group, K, self.sigma_k):
            self.state = "denied"
            return self._alert(10, A.WRONG_KEY)
        self.K = K
        c3 = prp_encrypt(K, _id(self.ecu.id))
        sigma8 = hash16(K + c3)
        self.state = "acked"
        return [WireMessage.make(MsgType.RECEIVER_ACK, self.ecu.id, pub=_id(self.pub), sigma8=sigma8, c3=c3)]

    def on_group_list(self, msg: WireMessage) -> list[WireMessage]:
        if self.state == "denied":
            return []
        if self.state != "acked":
            return self._alert(12, A.REPLAY if self.done else A.STATE)
        c4 = msg["c4"]
        if not verify_hash16(self.K + c4, msg["sigma9"]):
            return self._alert(12, A.BAD_MAC)
        try:
            plain = prp_decrypt(self.K, c4)
        except (PaddingError, LengthError):
            return self._alert(12, A.DECODE)
        ids = [int.from_bytes(plain[k : k + ID_LEN], "big") for k in range(0, len(plain), ID_LEN)]
        if self.ecu.id in ids:
            self.state = "ok"
            return []
        self.state = "failed"
        return self._alert(12, A.AUTH_FAILURE)


class EcuNode:
    """An ECU with an optional sender session and one receiver session per subscription."""

    def __init__(self, view: EcuView, layout: Layout, log: AlertLog, rng, policy: Policy | None = None,
                 subscriptions=(), expected_acks: int | None = None):
        self.view = view
        self.id = view.id
        self.layout = layout
        self.log = log
        self.rng = rng
        self.policy = policy
        self.subscriptions = tuple(subscriptions)
        self.expected_acks = expected_acks
        self.nonces = NonceCache()
        self.sender: SenderSession | None = None
        self.receivers: dict[int, ReceiverSession] = {}

    def sessions(self):
        out = [self.sender] if self.sender is not None else []
        return out + [self.receivers[p] for p in sorted(self.receivers)]

    def prepare(self, epoch: int) -> None:
        """Create fresh (unstarted) sessions for a new epoch."""
        self.sender = None
        if self.policy is not None:
            self.sender = SenderSession(self.view, self.policy, self.layout, self.log, self.rng, self.nonces,
                                        self.expected_acks)
        self.receivers = {
            pub: ReceiverSession(self.view, pub, self.layout, self.log, self.rng, self.nonces)
            for pub in self.subscriptions
        }

    def start(self, epoch: int) -> list[WireMessage]:
        """Open fresh sessions for ``epoch`` and start all of them at once."""
        self.prepare(epoch)
        out = self.sender.start(epoch) if self.sender is not None else []
        for pub in sorted(self.receivers):
            out += self.receivers[pub].start(epoch)
        return out

    def start_receiver(self, pub: int, epoch: int) -> list[WireMessage]:
        return self.receivers[pub].start(epoch)

    def accepts(self, msg: WireMessage) -> bool:
        """Whether a frame seen on the broadcast bus is addressed to this ECU."""
        t = msg.msg_type
        if t in (MsgType.CHALLENGE, MsgType.REQUEST_CHALLENGE, MsgType.PARTIAL_RESULT):
            return msg.node_id == self.id
        if t in (MsgType.KEY_DIGEST, MsgType.GROUP_LIST):
            return msg.node_id in self.receivers
        if t == MsgType.RECEIVER_ACK:
            return msg.pub == self.id
        return False

    def handle(self, msg: WireMessage, now: float = 0.0) -> list[WireMessage]:
        t = msg.msg_type
        if t == MsgType.CHALLENGE:
            if self.sender is None:
                self.log.raise_(f"node{self.id}", 3, A.UNKNOWN_SESSION)
                return []
            return self.sender.on_challenge(msg)
        if t == MsgType.RECEIVER_ACK:
            if self.sender is None:
                self.log.raise_(f"node{self.id}", 11, A.UNKNOWN_SESSION)
                return []
            return self.sender.on_ack(msg, now)
        pub = msg.node_id if t in (MsgType.KEY_DIGEST, MsgType.GROUP_LIST) else None
        if t in (MsgType.REQUEST_CHALLENGE, MsgType.PARTIAL_RESULT):
            pub = msg.pub
        if pub is None:
            self.log.raise_(f"node{self.id}", 0, A.STATE)
            return []
        rs = self.receivers.get(pub)
        if rs is None:
            if t in (MsgType.KEY_DIGEST, MsgType.GROUP_LIST):
                return []  # broadcast for a publisher we do not follow
            self.log.raise_(receiver_name(self.id, pub), 7 if t == MsgType.REQUEST_CHALLENGE else 10,
                            A.UNKNOWN_SESSION)
            return []
        return {
            MsgType.REQUEST_CHALLENGE: rs.on_request_challenge,
            MsgType.PARTIAL_RESULT: rs.on_partial,
            MsgType.KEY_DIGEST: rs.on_key_digest,
            MsgType.GROUP_LIST: rs.on_group_list,
        }[t](msg)

    def close_windows(self) -> list[WireMessage]:
        return self.sender.close_window() if self.sender is not None else []


class _SaSender:
    __slots__ = ("epoch", "n1", "ck", "state")

    def __init__(self, epoch, n1, ck):
        self.epoch, self.n1, self.ck, self.state = epoch, n1, ck, "challenged"


class _SaReceiver:
    __slots__ = ("epoch", "ck", "state", "i_hat", "ak")

    def __init__(self, epoch, ck):
        self.epoch, self.ck, self.state = epoch, ck, "challenged"
        self.i_hat = self.ak = None


class SecurityAgent:
    """The edge proxy: steps 2, 4, 6 and 8.  Honest, but it records everything."""

    id = SA_ID

    def __init__(self, view: SaView, layout: Layout, log: AlertLog, rng):
        self.view = view
        self.layout = layout
        self.log = log
        self.rng = rng
        self.nonces = NonceCache()
        self.senders: dict[int, _SaSender] = {}
        self.receivers: dict[tuple[int, int], _SaReceiver] = {}
        self.published: dict[tuple[int, int], tuple] = {}
        self.pending: dict[tuple[int, int], list[int]] = {}
        self.received: list[bytes] = []
        self.sent: list[bytes] = []
        self.learned: list[bytes] = []

    @property
    def params(self):
        return self.view.mpk.params

    def view_bytes(self) -> bytes:
        """Everything the SA has seen or holds: traffic, derived values and its own keys."""
        return b"".join(self.received + self.sent + self.learned) + self.view.key_bytes()

    def accepts(self, msg: WireMessage) -> bool:
        return msg.msg_type in (MsgType.HELLO, MsgType.CIPHER_PUBLISH, MsgType.REQUEST, MsgType.CREDENTIAL_SUBMIT)

    def handle(self, msg: WireMessage, now: float = 0.0) -> list[WireMessage]:
        self.received.append(msg.encode())
        handler = {
            MsgType.HELLO: self._on_hello,
            MsgType.CIPHER_PUBLISH: self._on_cipher_publish,
            MsgType.REQUEST: self._on_request,
            MsgType.CREDENTIAL_SUBMIT: self._on_credential,
        }.get(msg.msg_type)
        if handler is None:
            self.log.raise_("SA", 0, A.STATE)
            return []
        out = handler(msg)
        self.sent += [m.encode() for m in out]
        return out

    def _on_hello(self, msg):
        sid = msg.node_id
        name = sender_name(sid)
        k = self.view.pairwise.get(sid)
        if k is None:
            self.log.raise_(name, 2, A.UNKNOWN_PEER)
            return []
        me, n1, r_k = _id(sid), msg["n1"], msg["r_k"]
        if not verify_mac16(k, me + n1 + r_k, msg["sigma1"]):
            self.log.raise_(name, 2, A.BAD_MAC)
            return []
        epoch = int.from_bytes(r_k, "big")
        cur = self.senders.get(sid)
        if cur is not None and epoch < cur.epoch:
            self.log.raise_(name, 2, A.STALE_EPOCH)
            return []
        if not self.nonces.check_and_add((sid, epoch), n1):
            self.log.raise_(name, 2, A.REPLAY)
            return []
        if cur is not None and epoch == cur.epoch:
            self.log.raise_(name, 2, A.STATE)
            return []
        n2 = self.rng.randbytes(NONCE_LEN)
        sigma2 = mac16(k, me + increment(n1) + n2)
        self.senders[sid] = _SaSender(epoch, n1, mac16(k, me + increment(n1) + increment(n2)))
        return [WireMessage.make(MsgType.CHALLENGE, sid, sigma2=sigma2, n2=n2)]

    def _on_cipher_publish(self, msg):
        sid = msg.node_id
        name = sender_name(sid)
        sess = self.senders.get(sid)
        if sess is None:
            self.log.raise_(name, 4, A.UNKNOWN_SESSION)
            return []
        if sess.state != "challenged":
            self.log.raise_(name, 4, A.REPLAY)
            return []
        sc_bytes, wrap = msg["sc"], msg["wrap"]
        if not verify_mac16(sess.ck, _id(sid) + sc_bytes + wrap, msg["sigma3"]):
            self.log.raise_(name, 4, A.BAD_MAC)
            return []
        params = self.params
        try:
            sc = eabehp.decode_ciphertext(sc_bytes, params, self.layout.n)
            sc2 = eabehp.transform_ciphertext(sc, self.view.tk, params)
        except (DecodeError, StageError, AttributeRangeError):
            self.log.raise_(name, 4, A.DECODE)
            return []
        sess.state = "published"
        key = (sid, sess.epoch)
        self.published[key] = (sc2, wrap)
        out = []
        for rid in self.pending.pop(key, []):
            out.append(self._partial(rid, sid))
        return out

    def _on_request(self, msg):
        rid = msg.node_id
        k = self.view.pairwise.get(rid)
        req_info = msg["req_info"]
        pub = msg.pub
        name = receiver_name(rid, pub)
        if k is None:
            self.log.raise_(name, 6, A.UNKNOWN_PEER)
            return []
        if not verify_mac16(k, _id(rid) + msg["n3"] + msg["r_k"] + req_info, msg["sigma4"]):
            self.log.raise_(name, 6, A.BAD_MAC)
            return []
        if req_info[0] != REQ_TAG:
            self.log.raise_(name, 6, A.DECODE)
            return []
        epoch = int.from_bytes(msg["r_k"], "big")
        cur = self.receivers.get((rid, pub))
        if cur is not None and epoch < cur.epoch:
            self.log.raise_(name, 6, A.STALE_EPOCH)
            return []
        n3 = msg["n3"]
        if not self.nonces.check_and_add((rid, epoch), n3):
            self.log.raise_(name, 6, A.REPLAY)
            return []
        if cur is not None and epoch == cur.epoch:
            self.log.raise_(name, 6, A.STATE)
            return []
        n4 = self.rng.randbytes(NONCE_LEN)
        prefix = _id(rid) + _id(pub) + increment(n3)
        sigma5 = mac16(k, prefix + n4)
        self.receivers[(rid, pub)] = _SaReceiver(epoch, mac16(k, prefix + increment(n4)))
        return [WireMessage.make(MsgType.REQUEST_CHALLENGE, rid, pub=_id(pub), sigma5=sigma5, n4=n4)]

    def _on_credential(self, msg):
        rid, pub = msg.node_id, msg.pub
        name = receiver_name(rid, pub)
        sess = self.receivers.get((rid, pub))
        if sess is None:
            self.log.raise_(name, 8, A.UNKNOWN_SESSION)
            return []
        if sess.state != "challenged":
            self.log.raise_(name, 8, A.REPLAY)
            return []
        c1 = msg["c1"]
        try:
            plain = prp_decrypt(sess.ck, c1)
        except (PaddingError, LengthError):
            self.log.raise_(name, 8, A.BAD_MAC)
            return []
        bm_len = self.layout.bitmap_len
        if len(plain) != bm_len + self.layout.scalar_len:
            self.log.raise_(name, 8, A.DECODE)
            return []
        ak_bytes = plain[bm_len:]
        if not verify_hash16(c1 + ak_bytes, msg["sigma6"]):
            self.log.raise_(name, 8, A.BAD_MAC)
            return []
        try:
            i_hat = AttributeSet.from_bitmap(plain[:bm_len], self.layout.n)
        except (DecodeError, AttributeRangeError):
            i_hat = None
        if i_hat is None or not len(i_hat):
            self.log.raise_(name, 8, A.DECODE)
            return []
        sess.i_hat, sess.ak = i_hat, int.from_bytes(ak_bytes, "big")
        sess.state = "submitted"
        self.learned.append(ak_bytes)
        if (pub, sess.epoch) in self.published:
            return [self._partial(rid, pub)]
        self.pending.setdefault((pub, sess.epoch), []).append(rid)
        return []

    def _partial(self, rid: int, pub: int) -> WireMessage:
        sess = self.receivers[(rid, pub)]
        params = self.params
        sc2, wrap = self.published[(pub, sess.epoch)]
        ec = eabehp.extract(sc2, sess.i_hat, params)
        pd = eabehp.proxy_decrypt1(ec, sess.ak, self.view.rk[rid], self.view.tk, params)
        partial = eabehp.encode_partial(pd, params)
        c2 = prp_encrypt(sess.ck, partial + wrap)
        sigma7 = hash16(c2 + encode_element(pd.sc_dd, params))
        self.learned.append(partial)
        sess.state = "answered"
        return WireMessage.make(MsgType.PARTIAL_RESULT, rid, pub=_id(pub), c2=c2, sigma7=sigma7)


def recover_with_candidate(sa: SecurityAgent, rid: int, pub: int, ak_candidate: int, i_r: AttributeSet):
    """Rerun PD1/PD2 for one receiver with a substituted AK (attack harness helper)."""
    sess = sa.receivers[(rid, pub)]
    params = sa.params
    sc2, _ = sa.published[(pub, sess.epoch)]
    ec = eabehp.extract(sc2, sess.i_hat, params)
    pd = eabehp.proxy_decrypt1(ec, ak_candidate, sa.view.rk[rid], sa.view.tk, params)
    return eabehp.proxy_decrypt2(pd, i_r, sess.i_hat, params)

