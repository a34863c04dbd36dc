"""CAN-FD bus simulation with a table-driven compute-cost model."""

from .bus import BusConfig, CanFdFrame, Reassembler, arbitrate, fragment, frame_time, reassemble
from .costs import CostModel, bill, compute_cost
from .engine import SimResult, Simulator, TraceEvent, run
from .scenario import Scenario, Topology, build_topology, dump_scenario, load_scenario, parse_scenario

__all__ = [
    "BusConfig", "CanFdFrame", "CostModel", "Reassembler", "Scenario", "SimResult", "Simulator", "Topology",
    "TraceEvent", "arbitrate", "bill", "build_topology", "compute_cost", "dump_scenario", "fragment",
    "frame_time", "load_scenario", "parse_scenario", "reassemble", "run",
]
