"""Traffic network simulator: LWR roads, buffered junctions, car tracking
and route choice under different information regimes."""

from importlib import resources

from .junctions import DemandMode
from .network import Edge, JunctionSpec, NodeKind, RoadNetwork
from .routing import RoutePolicy
from .solver import InitialData, SimLog, simulate
from .tracker import CarLog, TrackerKind, track_car

__version__ = "0.1.0"

__all__ = [
    "DemandMode", "Edge", "JunctionSpec", "NodeKind", "RoadNetwork",
    "RoutePolicy", "InitialData", "SimLog", "simulate", "CarLog",
    "TrackerKind", "track_car", "bundled_scenario",
]


def bundled_scenario(name: str) -> str:
    """Text of a scenario shipped with the package (e.g. 'linear')."""
    return (resources.files(__name__) / "scenarios" / f"{name}.scn").read_text()
