"""Distributed channel allocation for cognitive radio networks.

Interference-avoidance channel selection played as a potential game
(scheduled best response) or learned with exponential weights, plus a
control-channel handshake simulator and a scenario/report harness.
"""

from .experiment import ScenarioConfig, compare_schemes, run_scenario
from .game import GameConfig, Utility
from .topology import Network, generate_network

__version__ = "0.1.0"

__all__ = [
    "GameConfig",
    "Network",
    "ScenarioConfig",
    "Utility",
    "compare_schemes",
    "generate_network",
    "run_scenario",
]
