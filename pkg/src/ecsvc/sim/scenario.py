"""Scenario configuration: an INI file with [group], [bus], [costs], [nodes], [policy], [scenario] and [attack].

Example::

    [group]
    name = tiny

    [bus]
    data_rate = 4e6

    [nodes]
    n_sys_att = 32
    n_rx_att = 16
    n_rx_ecu = 10

Unknown sections or keys are rejected so that typos cannot silently fall back
to defaults.
"""

from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass, field

from ..eabehp import AttributeSet, Policy
from ..errors import ConfigError
from ..group import GroupParams, named_group
from .bus import BusConfig
from .costs import ATTR_KEYS, CostModel, sa_class

ATTACKS = ("none", "replay", "tamper")


@dataclass(frozen=True)
class Scenario:
    group: str = "tiny"
    group_params: GroupParams | None = None
    arb_rate: float = 500_000
    data_rate: float = 4_000_000
    arb_phase_bits: int = 32
    data_overhead_bits: int = 45
    sa_clock: int = 1400
    mode: str = "table"
    allow_extrapolation: bool = False
    ack_window_s: float = 0.05
    n_sys_att: int = 32
    n_rx_att: int = 16
    n_tx_ecu: int = 1
    n_rx_ecu: int = 10
    shared_rx: int = 0
    unauthorized_rx: int = 0
    required: tuple[int, ...] = (1,)
    unrequired: tuple[int, ...] = ()
    seed: int = 1
    epoch: int = 1
    attack: str = "none"
    trials: int = 100
    # Who evaluates TimeKeyGen at request time.  Only the receiver holds K_group,
    # so "receiver" is the single accepted value; the key documents the reading.
    time_key_holder: str = "receiver"
    # "on-publish": a receiver sends its Request once it sees its publisher's
    # ciphertext on the bus; "epoch": every session starts at t=0.
    receiver_start: str = "on-publish"

    def __post_init__(self):
        try:
            self.validate()
        except (ValueError, KeyError) as exc:
            raise ConfigError(str(exc)) from None

    def validate(self):
        self.params  # resolves the group
        self.bus
        sa_class(self.sa_clock)
        if self.mode not in ("table", "live"):
            raise ValueError(f"costs.mode must be 'table' or 'live', got {self.mode!r}")
        if self.time_key_holder != "receiver":
            raise ValueError("scenario.time_key_holder must be 'receiver' (the SA never holds K_group)")
        if self.receiver_start not in ("on-publish", "epoch"):
            raise ValueError("scenario.receiver_start must be 'on-publish' or 'epoch'")
        if self.attack not in ATTACKS:
            raise ValueError(f"scenario.attack must be one of {ATTACKS}")
        if self.n_sys_att < 1:
            raise ValueError("n_sys_att must be at least 1")
        if self.n_tx_ecu < 1 or self.n_rx_ecu < 1:
            raise ValueError("need at least one sender and one receiver")
        if not 0 <= self.shared_rx <= self.n_rx_ecu:
            raise ValueError("shared_rx must be between 0 and n_rx_ecu")
        if not 0 <= self.unauthorized_rx <= self.n_rx_ecu:
            raise ValueError("unauthorized_rx must be between 0 and n_rx_ecu")
        if self.ack_window_s < 0 or self.trials < 1 or self.epoch < 0:
            raise ValueError("ack_window_s, trials and epoch must be non-negative (trials >= 1)")
        req, unreq = set(self.required), set(self.unrequired)
        if not req:
            raise ValueError("policy needs at least one required attribute")
        if req & unreq:
            raise ValueError("an attribute cannot be both required and unrequired")
        if any(i < 1 or i > self.n_sys_att for i in req | unreq):
            raise ValueError(f"policy attributes must lie in 1..{self.n_sys_att}")
        if not len(req) <= self.n_rx_att <= self.n_sys_att - len(unreq):
            raise ValueError("n_rx_att must cover every required attribute and avoid unrequired ones")
        if self.mode == "table" and not self.allow_extrapolation:
            lo, hi = ATTR_KEYS[0], ATTR_KEYS[-1]
            for name in ("n_sys_att", "n_rx_att"):
                if not lo <= getattr(self, name) <= hi:
                    raise ValueError(f"{name} = {getattr(self, name)} is outside the cost tables [{lo}, {hi}]; "
                                     "set [costs] allow_extrapolation = yes to extrapolate")

    @property
    def params(self) -> GroupParams:
        if self.group_params is not None:
            return self.group_params
        return named_group(self.group)

    @property
    def bus(self) -> BusConfig:
        return BusConfig(self.arb_rate, self.data_rate, self.arb_phase_bits, self.data_overhead_bits)

    @property
    def cost_model(self) -> CostModel:
        return CostModel(allow_extrapolation=self.allow_extrapolation)

    @property
    def sa_node_class(self) -> str:
        return sa_class(self.sa_clock)

    @property
    def policy(self) -> Policy:
        return Policy.from_sets(self.n_sys_att, self.required, self.unrequired)

    def replace(self, **changes) -> "Scenario":
        return dataclasses.replace(self, **changes)

    def topology(self) -> "Topology":
        return build_topology(self)

    def row_params(self) -> dict:
        """Scenario parameters as they appear in result rows."""
        return {
            "group": self.group if self.group_params is None else "custom",
            "data_rate": self.data_rate,
            "sa_clock": self.sa_clock,
            "n_sys_att": self.n_sys_att,
            "n_rx_att": self.n_rx_att,
            "n_tx_ecu": self.n_tx_ecu,
            "n_rx_ecu": self.n_rx_ecu,
            "shared_rx": self.shared_rx,
            "unauthorized_rx": self.unauthorized_rx,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class Topology:
    """Who is who: ECU ids, attribute sets, who publishes and who subscribes to whom."""

    senders: tuple[int, ...]
    receivers: tuple[int, ...]
    attrs: dict[int, AttributeSet] = field(hash=False)
    subscriptions: dict[int, tuple[int, ...]] = field(hash=False)
    authorized: frozenset[int] = frozenset()

    def expected_acks(self) -> dict[int, int]:
        out = {s: 0 for s in self.senders}
        for rid, pubs in self.subscriptions.items():
            if rid in self.authorized:
                for p in pubs:
                    out[p] += 1
        return out


def build_topology(sc: Scenario) -> Topology:
    """Deterministic layout: senders get ids 1..n_tx, receivers follow.

    The first ``shared_rx`` receivers subscribe to every sender and the rest are
    dealt round-robin.  The last ``unauthorized_rx`` receivers trade one
    required attribute for a spare one, so they must fail the key check.
    """
    n = sc.n_sys_att
    policy = sc.policy
    senders = tuple(range(1, sc.n_tx_ecu + 1))
    receivers = tuple(range(sc.n_tx_ecu + 1, sc.n_tx_ecu + sc.n_rx_ecu + 1))
    required = sorted(policy.required)
    optional = [i for i in range(1, n + 1) if i not in policy.required and i not in policy.unrequired]
    attrs: dict[int, AttributeSet] = {}
    # Senders hold an arbitrary single attribute; their keys are never used to decrypt.
    for s in senders:
        attrs[s] = AttributeSet.of([1], n)
    subscriptions = {}
    authorized = set()
    extra = sc.n_rx_att - len(required)
    for k, rid in enumerate(receivers):
        # Rotate through the optional attributes so receivers differ.
        start = (k * 3) % len(optional) if optional else 0
        picked = [optional[(start + j) % len(optional)] for j in range(extra)] if extra else []
        held = set(required) | set(picked)
        if k >= sc.n_rx_ecu - sc.unauthorized_rx:
            # Swap one required attribute for a spare so |I_r| stays n_rx_att.
            held.discard(required[-1])
            spare = [i for i in optional + sorted(policy.unrequired) if i not in held]
            if not spare:
                raise ConfigError("an unauthorized receiver needs an attribute outside the required set")
            held.add(spare[0])
        else:
            authorized.add(rid)
        attrs[rid] = AttributeSet.of(held, n)
        if k < sc.shared_rx:
            subscriptions[rid] = senders
        else:
            subscriptions[rid] = (senders[(k - sc.shared_rx) % len(senders)],)
    return Topology(senders, receivers, attrs, subscriptions, frozenset(authorized))


# --- INI parsing -------------------------------------------------------------

_FIELDS = {
    "group": {"name": ("group", str), "p": (None, str), "q": (None, str), "g": (None, str)},
    "bus": {
        "arb_rate": ("arb_rate", float),
        "data_rate": ("data_rate", float),
        "arb_phase_bits": ("arb_phase_bits", int),
        "data_overhead_bits": ("data_overhead_bits", int),
    },
    "costs": {
        "sa_clock": ("sa_clock", int),
        "mode": ("mode", str),
        "allow_extrapolation": ("allow_extrapolation", "bool"),
        "ack_window_s": ("ack_window_s", float),
    },
    "nodes": {
        "n_sys_att": ("n_sys_att", int),
        "n_rx_att": ("n_rx_att", int),
        "n_tx_ecu": ("n_tx_ecu", int),
        "n_rx_ecu": ("n_rx_ecu", int),
        "shared_rx": ("shared_rx", int),
        "unauthorized_rx": ("unauthorized_rx", int),
    },
    "policy": {"required": ("required", "ints"), "unrequired": ("unrequired", "ints")},
    "scenario": {
        "seed": ("seed", int),
        "epoch": ("epoch", int),
        "attack": ("attack", str),
        "time_key_holder": ("time_key_holder", str),
        "receiver_start": ("receiver_start", str),
    },
    "attack": {"trials": ("trials", int)},
}

# Rates and similar values accept engineering suffixes: 4M, 500k.
_SUFFIX = {"k": 1e3, "K": 1e3, "M": 1e6, "G": 1e9}


def _parse_float(text):
    text = text.strip()
    if text and text[-1] in _SUFFIX:
        return float(text[:-1]) * _SUFFIX[text[-1]]
    return float(text)


def _parse_ints(text):
    return tuple(int(x) for x in text.replace(",", " ").split())


def _coerce(kind, raw, section, key):
    try:
        if kind is int:
            return int(_parse_float(raw)) if raw.strip()[-1:] in _SUFFIX else int(raw, 0)
        if kind is float:
            return _parse_float(raw)
        if kind == "bool":
            return configparser.ConfigParser.BOOLEAN_STATES[raw.strip().lower()]
        if kind == "ints":
            return _parse_ints(raw)
        return raw.strip()
    except (ValueError, KeyError):
        raise ConfigError(f"[{section}] {key}: cannot parse {raw!r}") from None


def read_ini(text: str, extra_sections: dict | None = None) -> tuple[dict, dict]:
    """Parse config text into Scenario kwargs plus any extra sections (raw strings)."""
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    extra_sections = extra_sections or {}
    kwargs, extras, custom_group = {}, {}, {}
    for section in cp.sections():
        if section in extra_sections:
            allowed = extra_sections[section]
            for key, raw in cp.items(section):
                if key not in allowed:
                    raise ConfigError(f"unknown key {key!r} in [{section}]")
            extras[section] = dict(cp.items(section))
            continue
        if section not in _FIELDS:
            raise ConfigError(f"unknown section [{section}]")
        for key, raw in cp.items(section):
            if key not in _FIELDS[section]:
                raise ConfigError(f"unknown key {key!r} in [{section}]")
            attr, kind = _FIELDS[section][key]
            if attr is None:
                custom_group[key] = raw
            else:
                kwargs[attr] = _coerce(kind, raw, section, key)
    if custom_group:
        if set(custom_group) != {"p", "q", "g"}:
            raise ConfigError("[group] needs all of p, q and g")
        if "group" in kwargs:
            raise ConfigError("[group] takes either name or p/q/g, not both")
        try:
            gp = GroupParams(*(int(custom_group[k], 16) for k in "pqg"))
            gp.validate()
        except Exception as exc:
            raise ConfigError(f"bad group parameters: {exc}") from None
        kwargs["group_params"] = gp
    return kwargs, extras


def parse_scenario(text: str) -> Scenario:
    kwargs, _ = read_ini(text)
    return Scenario(**kwargs)


def load_scenario(path) -> Scenario:
    try:
        with open(path, encoding="utf-8") as fh:
            return parse_scenario(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None


def dump_scenario(sc: Scenario) -> str:
    """INI text that parses back to ``sc``."""
    lines = ["[group]"]
    if sc.group_params is not None:
        lines += sc.group_params.dumps().strip().splitlines()
    else:
        lines.append(f"name = {sc.group}")
    lines += [
        "", "[bus]",
        f"arb_rate = {sc.arb_rate!r}", f"data_rate = {sc.data_rate!r}",
        f"arb_phase_bits = {sc.arb_phase_bits}", f"data_overhead_bits = {sc.data_overhead_bits}",
        "", "[costs]",
        f"sa_clock = {sc.sa_clock}", f"mode = {sc.mode}",
        f"allow_extrapolation = {'yes' if sc.allow_extrapolation else 'no'}", f"ack_window_s = {sc.ack_window_s!r}",
        "", "[nodes]",
        f"n_sys_att = {sc.n_sys_att}", f"n_rx_att = {sc.n_rx_att}", f"n_tx_ecu = {sc.n_tx_ecu}",
        f"n_rx_ecu = {sc.n_rx_ecu}", f"shared_rx = {sc.shared_rx}", f"unauthorized_rx = {sc.unauthorized_rx}",
        "", "[policy]",
        "required = " + " ".join(map(str, sc.required)),
        "unrequired = " + " ".join(map(str, sc.unrequired)),
        "", "[scenario]",
        f"seed = {sc.seed}", f"epoch = {sc.epoch}", f"attack = {sc.attack}",
        f"time_key_holder = {sc.time_key_holder}", f"receiver_start = {sc.receiver_start}",
        "", "[attack]", f"trials = {sc.trials}", "",
    ]
    return "\n".join(lines)
