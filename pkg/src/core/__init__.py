"""
Core module for the DTBAS simulator.
"""

from .model import SimConfig, ShareScheme, Interval, Reading, node_count, anonymity_set_size
from .simulation import AggregationSimulation, SimulationResult
from .adversary import AttackerModel, observe, run_attack
from .game import Distinguisher, run_game
from .metrics import ProbabilityProfile, emit_anonymity_tables

__all__ = [
    "SimConfig",
    "ShareScheme",
    "Interval",
    "Reading",
    "node_count",
    "anonymity_set_size",
    "AggregationSimulation",
    "SimulationResult",
    "AttackerModel",
    "observe",
    "run_attack",
    "Distinguisher",
    "run_game",
    "ProbabilityProfile",
    "emit_anonymity_tables",
]
