"""Chain Hamiltonian and its free-fermion generator representations.

The spin Hamiltonian is

    H = 1/2 sum_n c_n [(1+gamma) X_n X_{n+1} + (1-gamma) Y_n Y_{n+1}]
        + sum_n B_n Z_n

in units of J (hbar = 1, times in 1/J).  Two efficient representations are
supported:

* ``mode`` (gamma = 0 only): the N x N single-particle Hermitian matrix of
  ``sum c_n (a^dag_n a_{n+1} + h.c.) - 2 sum B_n a^dag_n a_n``.  The identity
  multiple ``sum B_n`` arising from ``B_n Z_n = B_n (1 - 2 a^dag_n a_n)`` is
  dropped from the matrix and tracked in ``identity_offset`` (global phase
  only).
* ``majorana``: a real antisymmetric matrix A with H = (i/4) sum A_jk c_j c_k,
  Majorana convention c_{2n-1} = a_n + a^dag_n, c_{2n} = -i(a_n - a^dag_n).
  With the transverse (Y1) control channel the representation is extended by
  one auxiliary Majorana mode (dimension 2N+1, auxiliary index first), which
  turns the linear term beta * Y_1 = beta * c_2 into a quadratic one.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "ChainSpec",
    "QuadraticGenerators",
    "build_generators",
    "mode_spectrum",
    "flip_spec",
]


@dataclass(frozen=True)
class ChainSpec:
    """Static description of the chain: length, couplings, fields, anisotropy.

    ``fields[0]`` is the static part of B_1; the control pulse adds on top of
    it.  Controllability requires all couplings nonzero; ``build_generators``
    enforces that, while the spec itself tolerates zero couplings so
    decoupled limits remain expressible for the dense oracle.
    """

    n_sites: int
    couplings: tuple[float, ...]
    fields: tuple[float, ...]
    gamma: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "couplings", tuple(float(c) for c in self.couplings))
        object.__setattr__(self, "fields", tuple(float(b) for b in self.fields))
        if self.n_sites < 2:
            raise ValueError("chain needs at least 2 sites")
        if len(self.couplings) != self.n_sites - 1:
            raise ValueError("expected N-1 couplings")
        if len(self.fields) != self.n_sites:
            raise ValueError("expected N fields")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("gamma must lie in [0, 1]")

    @classmethod
    def uniform(cls, n_sites: int, coupling: float = 1.0, gamma: float = 0.0) -> "ChainSpec":
        return cls(n_sites, (coupling,) * (n_sites - 1), (0.0,) * n_sites, gamma)

    @classmethod
    def disordered(cls, n_sites: int, strength: float, seed: int,
                   base_coupling: float = 1.0, gamma: float = 0.0) -> "ChainSpec":
        """Couplings c_n = J (1 + delta_n), delta_n i.i.d. uniform on [-s, s]."""
        if not 0.0 <= strength <= 0.5:
            raise ValueError("disorder strength must lie in [0, 0.5]")
        rng = np.random.default_rng(seed)
        delta = rng.uniform(-strength, strength, n_sites - 1)
        return cls(n_sites, tuple(base_coupling * (1.0 + delta)), (0.0,) * n_sites, gamma)

    @classmethod
    def from_dict(cls, data: dict) -> "ChainSpec":
        n = int(data["n"])
        gamma = float(data.get("gamma", 0.0))
        if "disorder" in data:
            dis = data["disorder"]
            base = data.get("couplings", [1.0] * (n - 1))
            if len(set(base)) != 1:
                raise ValueError("disorder requires a uniform base coupling")
            return cls.disordered(n, float(dis["strength"]), int(dis["seed"]),
                                  base_coupling=float(base[0]), gamma=gamma)
        couplings = data.get("couplings", [1.0] * (n - 1))
        fields = data.get("fields", [0.0] * n)
        return cls(n, tuple(couplings), tuple(fields), gamma)

    @classmethod
    def from_json(cls, path: str | Path) -> "ChainSpec":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        return {
            "n": self.n_sites,
            "couplings": list(self.couplings),
            "fields": list(self.fields),
            "gamma": self.gamma,
        }


@dataclass(frozen=True)
class QuadraticGenerators:
    """Drift and control generators in one fermionic representation.

    ``representation`` is ``"mode"`` (drift Hermitian, d = N) or ``"majorana"``
    (drift real antisymmetric, d = 2N or 2N+1 with the auxiliary mode).
    ``identity_offset`` records the identity multiple dropped from the static
    field terms; it contributes a global phase only and never enters fidelity.
    """

    representation: str
    n_sites: int
    drift: np.ndarray
    ctrl_z1: np.ndarray
    identity_offset: float
    ctrl_y1: np.ndarray | None = None

    @property
    def dim(self) -> int:
        return self.drift.shape[0]

    @property
    def has_y1(self) -> bool:
        return self.ctrl_y1 is not None

    def hermitian(self, b1: float, beta1: float | None = None) -> np.ndarray:
        """Hermitian generator of one constant segment, exp(-i G dt).

        In the Majorana picture the stored matrices are real antisymmetric A;
        the corresponding Hermitian generator is iA, whose exponential
        exp(-i (iA) dt) = exp(A dt) is the real orthogonal Heisenberg
        propagator of the Majorana vector.
        """
        if beta1 is not None and not self.has_y1:
            raise ValueError("generators carry no Y1 channel")
        total = self.drift + b1 * self.ctrl_z1
        if beta1:
            total = total + beta1 * self.ctrl_y1
        if self.representation == "majorana":
            return 1j * total
        return total


def _mode_generators(spec: ChainSpec) -> QuadraticGenerators:
    n = spec.n_sites
    drift = np.zeros((n, n))
    for i, c in enumerate(spec.couplings):
        drift[i, i + 1] = drift[i + 1, i] = c
    for i, b in enumerate(spec.fields):
        drift[i, i] = -2.0 * b
    ctrl = np.zeros((n, n))
    ctrl[0, 0] = -2.0
    return QuadraticGenerators("mode", n, drift, ctrl, float(sum(spec.fields)))


def _majorana_generators(spec: ChainSpec, y1_channel: bool) -> QuadraticGenerators:
    n = spec.n_sites
    g = spec.gamma
    d = 2 * n
    A = np.zeros((d, d))

    def add(i, j, v):
        A[i, j] += v
        A[j, i] -= v

    x = lambda site: 2 * site  # 0-based site
    y = lambda site: 2 * site + 1
    for i, c in enumerate(spec.couplings):
        add(x(i), y(i + 1), c * (1.0 - g))
        add(x(i + 1), y(i), c * (1.0 + g))
    for i, b in enumerate(spec.fields):
        add(x(i), y(i), -2.0 * b)
    Az = np.zeros((d, d))
    Az[0, 1] = -2.0
    Az[1, 0] = 2.0

    offset = float(sum(spec.fields))
    if not y1_channel:
        return QuadraticGenerators("majorana", n, A, Az, offset)

    # Extended picture: index 0 is the auxiliary mode; beta * Y_1 = beta * c_2
    # becomes the (0, y_1) block.
    de = d + 1
    Ae = np.zeros((de, de))
    Ae[1:, 1:] = A
    Aze = np.zeros((de, de))
    Aze[1:, 1:] = Az
    Ay = np.zeros((de, de))
    Ay[0, 1 + y(0)] = -2.0
    Ay[1 + y(0), 0] = 2.0
    return QuadraticGenerators("majorana", n, Ae, Aze, offset, ctrl_y1=Ay)


def build_generators(spec: ChainSpec, representation: str = "mode",
                     y1_channel: bool = False) -> QuadraticGenerators:
    """Build drift + control generators for ``spec`` in the chosen picture.

    Zero couplings are rejected: they disconnect the chain and void every
    controllability statement downstream (ChainSpec itself tolerates them so
    decoupled limits remain expressible for the dense oracle).
    """
    if any(c == 0.0 for c in spec.couplings):
        raise ValueError("zero couplings are not allowed")
    if representation == "mode":
        if spec.gamma != 0.0:
            raise ValueError("mode representation requires gamma = 0")
        if y1_channel:
            raise ValueError("Y1 channel requires the majorana representation")
        return _mode_generators(spec)
    if representation == "majorana":
        return _majorana_generators(spec, y1_channel)
    raise ValueError(f"unknown representation {representation!r}")


def mode_spectrum(gens: QuadraticGenerators, b1: float = 0.0) -> np.ndarray:
    """Eigenvalues of drift + b1 * ctrl_z1, ascending."""
    return np.linalg.eigvalsh(gens.hermitian(b1))


def flip_spec(spec: ChainSpec) -> ChainSpec:
    """Relabel sites n -> N+1-n (reverses couplings and fields)."""
    return ChainSpec(spec.n_sites, spec.couplings[::-1], spec.fields[::-1], spec.gamma)
