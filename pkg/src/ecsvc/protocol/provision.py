"""Trust-authority key issuance and the per-party views it hands out."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .. import eabehp
from ..eabehp import AttributeSet, MasterKeyMaterial, MasterPublicKey, UserKeyMaterial
from ..group import GroupParams, Scalar


@dataclass(frozen=True, repr=False)
class EcuView:
    id: int
    uk: UserKeyMaterial
    k_pair: bytes
    k_group: bytes
    mpk: MasterPublicKey

    def __repr__(self):
        return f"EcuView(id={self.id}, <secret>)"


@dataclass(frozen=True, repr=False)
class SaView:
    """What the security agent is given: TK, every RK and every pairwise key.

    Never any user attribute key, the group key or the master secret.
    """

    tk: tuple[Scalar, ...]
    rk: dict[int, Scalar]
    pairwise: dict[int, bytes]
    mpk: MasterPublicKey

    def __repr__(self):
        return f"SaView(ecus={sorted(self.pairwise)}, <secret>)"

    def key_bytes(self) -> bytes:
        """The SA's long-term secrets as bytes, for view scanning."""
        params = self.mpk.params
        w = params.scalar_len
        out = [s.to_bytes(w, "big") for s in self.tk]
        out += [self.rk[i].to_bytes(w, "big") for i in sorted(self.rk)]
        out += [self.pairwise[i] for i in sorted(self.pairwise)]
        return b"".join(out)


@dataclass(frozen=True, repr=False)
class ProvisionedVehicle:
    master: MasterKeyMaterial
    ecus: dict[int, EcuView]
    sa: SaView

    @property
    def params(self) -> GroupParams:
        return self.master.params

    @property
    def n(self) -> int:
        return self.master.n

    def __repr__(self):
        return f"ProvisionedVehicle(n={self.n}, ecus={sorted(self.ecus)})"


def provision(params: GroupParams, n: int, ecu_specs: Iterable[tuple[int, AttributeSet]], rng) -> ProvisionedVehicle:
    specs = list(ecu_specs)
    if not specs:
        raise ValueError("at least one ECU is required")
    ids = [i for i, _ in specs]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate ECU id")
    if any(i <= 0 or i > 0xFFFF for i in ids):
        raise ValueError("ECU ids must be in 1..65535 (0 is the security agent)")
    mk = eabehp.setup(params, n, rng)
    ecus = {}
    for ecu_id, attrs in specs:
        uk = eabehp.keygen(mk, ecu_id, attrs, rng)
        ecus[ecu_id] = EcuView(ecu_id, uk, uk.k_pair, mk.k_group, mk.mpk)
    sa = SaView(
        tk=mk.tk,
        rk={i: v.uk.rk for i, v in ecus.items()},
        pairwise={i: v.k_pair for i, v in ecus.items()},
        mpk=mk.mpk,
    )
    return ProvisionedVehicle(mk, ecus, sa)
