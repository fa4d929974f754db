"""eulerlab: numerical laboratory for isentropic gas dynamics.

Finite-volume evolution of the compressible system with pressure rho**gamma,
the exact characteristic solution of the pressureless comparison flow, and
every computable breakdown / global-existence criterion, wired into a CLI for
reproducible experiments.
"""

from . import burgers, criteria, eig, euler, fields, initial_data, sampling, snapshot
from .fields import (
    FluidState,
    ScalarField,
    SymmetrizedState,
    TensorField,
    VectorField,
    from_symmetrized,
    to_symmetrized,
)
from .grid import Grid

__version__ = "0.1.0"

__all__ = [
    "FluidState",
    "Grid",
    "ScalarField",
    "SymmetrizedState",
    "TensorField",
    "VectorField",
    "burgers",
    "criteria",
    "eig",
    "euler",
    "fields",
    "from_symmetrized",
    "initial_data",
    "sampling",
    "snapshot",
    "to_symmetrized",
]
