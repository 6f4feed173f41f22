"""Energy-aware mapping of application task graphs onto 3D mesh networks-on-chip."""

from nocmap.core import Apcg, Arc, Mapping, TileCoord, Topology, hop_count, xyz_route
from nocmap.heuristic import map_heuristic
from nocmap.metrics import EnergyParams, MetricsReport, evaluate
from nocmap.swarm import RunResult, SwarmConfig, run

__all__ = [
    "Apcg", "Arc", "Mapping", "TileCoord", "Topology", "hop_count", "xyz_route",
    "map_heuristic", "EnergyParams", "MetricsReport", "evaluate",
    "RunResult", "SwarmConfig", "run",
]
__version__ = "0.1.0"
