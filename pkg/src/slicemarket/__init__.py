"""Multi-provider network-slicing market simulator.

Providers admit slice-instance requests under multidimensional capacity with
a greedy revenue-efficiency heuristic that maintains priority ordering, then
auction each slice's quota among competing tenants with a truthful
critical-price mechanism. Subscribers queue, balk, and renege; tenants steer
requests toward providers with better acceptance and fairness records.
"""

from importlib import resources
from pathlib import Path

__version__ = "0.1.0"


def table1_path() -> Path:
    """Path to the packaged reference scenario."""
    return Path(resources.files("slicemarket") / "data" / "table1.yaml")
