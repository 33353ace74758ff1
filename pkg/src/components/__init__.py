"""
Components module for the DTBAS dashboard.
"""

from .sidebar import Sidebar
from .metrics_tab import MetricsTab
from .simulate_tab import SimulateTab
from .attack_tab import AttackTab
from .game_tab import GameTab
from .help_tab import HelpTab

__all__ = ["Sidebar", "MetricsTab", "SimulateTab", "AttackTab", "GameTab", "HelpTab"]
