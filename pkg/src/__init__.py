"""
DTBAS simulator - distributed trust based anonymous aggregation of smart-meter readings.
"""

from .config import Config
from .core import AggregationSimulation, SimConfig, run_attack, run_game, emit_anonymity_tables

__all__ = [
    "Config",
    "AggregationSimulation",
    "SimConfig",
    "run_attack",
    "run_game",
    "emit_anonymity_tables"
]
