from ._backend import KERNELS, default_backend, get_kernel
from .engine import (
    SimState,
    SimulationError,
    cable_tension,
    derivatives,
    equilibrium_state,
    run,
    step_count,
)

__all__ = [
    "KERNELS",
    "SimState",
    "SimulationError",
    "cable_tension",
    "default_backend",
    "derivatives",
    "equilibrium_state",
    "get_kernel",
    "run",
    "step_count",
]
