"""Exact piecewise-constant evolution of the quadratic generators.

Each step is an exact exponential exp(-i G dt) computed via eigendecomposition
of the Hermitian segment generator (no Trotterization).  In the Majorana
picture G = iA with A real antisymmetric, so the step propagator is the real
orthogonal matrix exp(A dt); the imaginary part is discarded after rounding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chain import QuadraticGenerators
from .pulses import ControlPulse

__all__ = ["ModePropagator", "step_propagator", "evolve"]

_UNITARITY_TOL = 1e-10


def _expm_herm(G: np.ndarray, dt: float) -> np.ndarray:
    lam, V = np.linalg.eigh(G)
    return (V * np.exp(-1j * lam * dt)) @ V.conj().T


@dataclass(frozen=True)
class ModePropagator:
    """Total propagator of a pulse, optionally with the per-step factors.

    ``total = steps[M-1] @ ... @ steps[0]`` (later steps leftmost).
    """

    total: np.ndarray
    steps: tuple[np.ndarray, ...] | None = None

    @property
    def dim(self) -> int:
        return self.total.shape[0]

    def unitarity_defect(self) -> float:
        d = self.dim
        return float(np.abs(self.total.conj().T @ self.total - np.eye(d)).max())


def step_propagator(gens: QuadraticGenerators, b1: float,
                    beta1: float | None = None, dt: float = 0.25) -> np.ndarray:
    """exp(-i (drift + b1*ctrl_z1 [+ beta1*ctrl_y1]) dt), exact."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    U = _expm_herm(gens.hermitian(b1, beta1), dt)
    if gens.representation == "majorana":
        U = U.real.astype(float)
    return U


def evolve(gens: QuadraticGenerators, pulse: ControlPulse,
           cache: bool = False) -> ModePropagator:
    """Ordered product of step propagators for ``pulse`` (last step leftmost)."""
    if pulse.has_beta1 and not gens.has_y1:
        raise ValueError("pulse has a beta1 channel but generators do not")
    steps = []
    total = np.eye(gens.dim, dtype=complex if gens.representation == "mode" else float)
    for m in range(pulse.n_steps):
        beta = pulse.samples_beta1[m] if pulse.has_beta1 else None
        U = step_propagator(gens, pulse.samples_b1[m], beta, pulse.dt)
        if cache:
            steps.append(U)
        total = U @ total
    defect = np.abs(total.conj().T @ total - np.eye(gens.dim)).max()
    if defect > _UNITARITY_TOL:
        # polar projection onto the closest unitary
        u, _, vh = np.linalg.svd(total)
        total = u @ vh
    return ModePropagator(total, tuple(steps) if cache else None)
