"""The twelve-step key exchange: wire codec, provisioning, state machines and a test network."""

from .alerts import Alert, AlertLog
from .network import Mutation, Network, RunResult, mutated_run, pair_network, random_mutation
from .provision import EcuView, ProvisionedVehicle, SaView, provision
from .sessions import EcuNode, ReceiverSession, SecurityAgent, SenderSession
from .wire import Layout, MsgType, WireMessage, decode, encode

__all__ = [
    "Alert", "AlertLog", "EcuNode", "EcuView", "Layout", "MsgType", "Mutation", "Network",
    "ProvisionedVehicle", "ReceiverSession", "RunResult", "SaView", "SecurityAgent", "SenderSession",
    "WireMessage", "decode", "encode", "mutated_run", "pair_network", "provision", "random_mutation",
]
