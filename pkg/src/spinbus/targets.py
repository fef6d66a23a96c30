"""Goal unitaries in the fermionic representations.

Physical swaps and rotations are expressed as N x N mode unitaries (gamma = 0
number-conserving picture).  The ZX rotation driven through the transverse
channel lives in the extended Majorana picture (d = 2N+1), where
Z_1 X_2 = c_3 is a single Majorana and hence quadratic after the auxiliary
mode is added.

The many-body action of exp(-i pi h_kl / 2) carries parity-dependent phases
and the Z-string L_kl on intervening sites; ``string_descriptor`` records the
site range for bookkeeping.  Scalar phases split off from a target (e.g. the
identity part of Z_k) are recorded in ``phase`` and never enter fidelity.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .chain import ChainSpec

__all__ = [
    "TargetGate",
    "physical_swap_target",
    "rotation_target",
    "zx_rotation_target",
    "cz_sequence",
    "FastGate",
    "SQRT2",
]

SQRT2 = float(np.sqrt(2.0))

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_H = np.array([[1, 1], [1, -1]], dtype=complex) / SQRT2


@dataclass(frozen=True)
class TargetGate:
    """A goal unitary in a fermionic representation plus its many-body meaning."""

    kind: str  # physical_swap | x_rotation | z_rotation | zx_rotation
    mode_unitary: np.ndarray
    representation: str  # mode | majorana_ext
    string_descriptor: tuple[int, int] | None = None
    params: dict = field(default_factory=dict)
    phase: complex = 1.0 + 0.0j

    @property
    def dim(self) -> int:
        return self.mode_unitary.shape[0]

    def inverse(self) -> "TargetGate":
        return TargetGate(self.kind, self.mode_unitary.conj().T, self.representation,
                          self.string_descriptor,
                          {**self.params, "inverse": not self.params.get("inverse", False)},
                          np.conj(self.phase))

    def key(self, spec: ChainSpec, duration: float, dt: float) -> str:
        """Pulse-library key: target identity + pulse grid + chain."""
        import hashlib
        import json
        payload = {
            "kind": self.kind,
            "params": {k: v for k, v in sorted(self.params.items())},
            "descriptor": self.string_descriptor,
            "T": duration,
            "dt": dt,
            "spec": spec.to_dict(),
        }
        return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()[:16]


def physical_swap_target(k: int, l: int, spec: ChainSpec) -> TargetGate:
    """Mode unitary of exp(-i pi h_kl / 2): identity outside the (k, l) block.

    The block is [[0, -i], [-i, 0]] for odd l-k and [[0, -1], [1, 0]] for
    even l-k.
    """
    if spec.gamma != 0.0:
        raise ValueError("physical swap targets require gamma = 0")
    n = spec.n_sites
    if not 1 <= k < l <= n:
        raise ValueError("need 1 <= k < l <= N")
    u = np.eye(n, dtype=complex)
    u[k - 1, k - 1] = u[l - 1, l - 1] = 0.0
    if (l - k) % 2 == 1:
        u[k - 1, l - 1] = u[l - 1, k - 1] = -1j
    else:
        u[k - 1, l - 1] = -1.0
        u[l - 1, k - 1] = 1.0
    return TargetGate("physical_swap", u, "mode", (k, l), {"k": k, "l": l})


def rotation_target(kind: str, spec: ChainSpec, **params) -> TargetGate:
    """Single-qubit rotation targets in the mode picture.

    x_rotation(n, angle): exp(-i angle h_{2n-1,2n}) — the logical-X rotation
    of logical qubit n, performed in place.
    z_rotation(k, angle): exp(-i angle Z_k) up to the recorded scalar
    exp(-i angle); the mode unitary applies exp(+2i angle) on mode k.
    """
    n = spec.n_sites
    if kind == "x_rotation":
        nl = int(params["n"])
        t = float(params["angle"])
        k, l = 2 * nl - 1, 2 * nl
        if not 1 <= k < l <= n:
            raise ValueError("logical index out of range")
        u = np.eye(n, dtype=complex)
        u[k - 1, k - 1] = u[l - 1, l - 1] = np.cos(t)
        u[k - 1, l - 1] = u[l - 1, k - 1] = -1j * np.sin(t)
        return TargetGate("x_rotation", u, "mode", (k, l), {"n": nl, "angle": t})
    if kind == "z_rotation":
        k = int(params["k"])
        t = float(params["angle"])
        if not 1 <= k <= n:
            raise ValueError("site out of range")
        u = np.eye(n, dtype=complex)
        u[k - 1, k - 1] = np.exp(2j * t)
        return TargetGate("z_rotation", u, "mode", (k, k), {"k": k, "angle": t},
                          phase=np.exp(-1j * t))
    raise ValueError(f"unknown rotation kind {kind!r}")


def zx_rotation_target(angle: float, spec: ChainSpec) -> TargetGate:
    """exp(-i angle Z_1 X_2) as an orthogonal goal in the extended picture.

    Z_1 X_2 equals the single Majorana c_3 (= x-Majorana of site 2), so with
    the auxiliary mode the generator is the antisymmetric matrix coupling
    index 0 to c_3's slot.
    """
    n = spec.n_sites
    if n < 2:
        raise ValueError("need at least two sites")
    d = 2 * n + 1
    A = np.zeros((d, d))
    j = 1 + 2  # auxiliary slot 0; c_3 sits at extended index 3
    A[0, j] = -2.0 * angle
    A[j, 0] = 2.0 * angle
    return TargetGate("zx_rotation", expm(A), "majorana_ext", (1, 2), {"angle": angle})


@dataclass(frozen=True)
class FastGate:
    """Instantaneous local unitary on control sites 1-2 (4x4, site 1 first)."""

    name: str
    matrix: np.ndarray
    duration: float = 0.0


def _on_site2(u: np.ndarray) -> np.ndarray:
    return np.kron(_I2, u)


def _on_site1(u: np.ndarray) -> np.ndarray:
    return np.kron(u, _I2)


def cz_sequence() -> tuple[list, complex]:
    """Controlled-Z on the control sites from one ZX rotation plus fast gates.

    Returns (segments, global_phase) with segments ordered earliest first:

        Rz2(+pi/4), Rz1(+pi/4), H2, exp(-i pi/4 Z1 X2), H2

    whose product times the returned phase equals diag(1, 1, 1, -1) exactly.
    """
    rz = expm(1j * np.pi / 4 * _Z)
    segments = [
        FastGate("rz2_plus_quarter_pi", _on_site2(rz)),
        FastGate("rz1_plus_quarter_pi", _on_site1(rz)),
        FastGate("hadamard_2", _on_site2(_H)),
        ("zx_rotation", np.pi / 4),
        FastGate("hadamard_2", _on_site2(_H)),
    ]
    return segments, np.exp(-1j * np.pi / 4)


def logical_hadamard_fast_gate() -> FastGate:
    """Fast 4x4 gate acting as Hadamard on span{|01>, |10>} of sites 1-2."""
    m = np.eye(4, dtype=complex)
    # basis order |00>, |01>, |10>, |11>; logical |0> = |01>, |1> = |10>
    m[1, 1] = m[1, 2] = m[2, 1] = 1.0 / SQRT2
    m[2, 2] = -1.0 / SQRT2
    return FastGate("logical_hadamard", m)
