from .kernels import HAVE_COMPILED, USE_COMPILED, backend_name
from .solver import (
    BlowupFit,
    CFLViolation,
    SimulationAbort,
    SolverConfig,
    Trajectory,
    detect_blowup,
    entropy_production,
    max_wave_speed,
    run,
    step,
)

__all__ = [
    "BlowupFit",
    "CFLViolation",
    "HAVE_COMPILED",
    "SimulationAbort",
    "SolverConfig",
    "Trajectory",
    "USE_COMPILED",
    "backend_name",
    "detect_blowup",
    "entropy_production",
    "max_wave_speed",
    "run",
    "step",
]
