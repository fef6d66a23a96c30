"""Pulse synthesis and circuit compilation for end-controlled XY spin chains.

The chain is driven only through the magnetic field on site 1 (optionally a
transverse channel on site 1 as well).  Dynamics are computed in free-fermion
representations of dimension N, 2N or 2N+1; an exact dense simulator
(``spinbus.oracle``) provides ground truth for small chains.
"""

__version__ = "0.1.0"

from .chain import ChainSpec, QuadraticGenerators, build_generators, mode_spectrum
from .pulses import ControlPulse
from .propagator import ModePropagator, evolve, step_propagator
from .grape import ControlProblem, OptimizationReport, fidelity, gradient, optimize
from .targets import TargetGate, physical_swap_target, rotation_target, cz_sequence, zx_rotation_target
from .compiler import LogicalCircuit, GateSchedule, PulseLibrary, compile_circuit, logical_swap_schedule
from .lie import AlgebraBasis, generate_algebra, membership, verify_paper_identities
from .oracle import (
    DenseUnitary,
    compare_up_to_phase,
    full_propagator,
    ideal_swap_operator,
    lift_mode_unitary,
)

__all__ = [
    "ChainSpec",
    "QuadraticGenerators",
    "build_generators",
    "mode_spectrum",
    "ControlPulse",
    "ModePropagator",
    "evolve",
    "step_propagator",
    "ControlProblem",
    "OptimizationReport",
    "fidelity",
    "gradient",
    "optimize",
    "TargetGate",
    "physical_swap_target",
    "rotation_target",
    "zx_rotation_target",
    "cz_sequence",
    "LogicalCircuit",
    "GateSchedule",
    "PulseLibrary",
    "compile_circuit",
    "logical_swap_schedule",
    "AlgebraBasis",
    "generate_algebra",
    "membership",
    "verify_paper_identities",
    "DenseUnitary",
    "full_propagator",
    "lift_mode_unitary",
    "ideal_swap_operator",
    "compare_up_to_phase",
    "__version__",
]
