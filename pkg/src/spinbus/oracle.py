"""Exact dense 2^N simulation used as ground truth (N <= 12).

Basis convention, used package-wide: site 1 is the most significant qubit and
|0> is the Z = +1 state.  All comparisons against lifted mode unitaries are
phase-invariant, which absorbs both the dropped identity terms and the
principal-branch ambiguity of the matrix logarithm.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import expm, logm

from .chain import ChainSpec
from .pulses import ControlPulse

__all__ = [
    "DenseUnitary",
    "full_propagator",
    "lift_mode_unitary",
    "ideal_swap_operator",
    "compare_up_to_phase",
    "site_operator",
    "jw_annihilation",
    "majorana_operators",
    "parity_operator",
    "embed_control_gate",
    "zx_full",
]

MAX_SITES = 12

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]])
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_SP = np.array([[0, 1], [0, 0]], dtype=complex)  # |0><1|, annihilates an excitation


def _check_sites(n: int) -> None:
    if n > MAX_SITES:
        raise ValueError(f"dense oracle is capped at N = {MAX_SITES}")


@dataclass(frozen=True)
class DenseUnitary:
    matrix: np.ndarray
    n_sites: int

    def __post_init__(self):
        _check_sites(self.n_sites)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def _kron_all(ops) -> np.ndarray:
    out = np.array([[1.0 + 0j]])
    for o in ops:
        out = np.kron(out, o)
    return out


def site_operator(op: np.ndarray, site: int, n: int) -> np.ndarray:
    """Single-site operator at 1-based ``site`` in the 2^n space."""
    ops = [_I2] * n
    ops[site - 1] = op
    return _kron_all(ops)


@lru_cache(maxsize=32)
def _jw_cache(site: int, n: int) -> np.ndarray:
    ops = [_Z] * (site - 1) + [_SP] + [_I2] * (n - site)
    return _kron_all(ops)


def jw_annihilation(site: int, n: int) -> np.ndarray:
    """a_site = sigma^+_site prod_{m<site} Z_m."""
    _check_sites(n)
    return _jw_cache(site, n)


def majorana_operators(n: int) -> list[np.ndarray]:
    """[c_1 .. c_2N] with c_{2k-1} = a_k + a^dag_k, c_{2k} = -i(a_k - a^dag_k)."""
    out = []
    for site in range(1, n + 1):
        a = jw_annihilation(site, n)
        out.append(a + a.conj().T)
        out.append(-1j * (a - a.conj().T))
    return out


def parity_operator(n: int) -> np.ndarray:
    return _kron_all([_Z] * n)


def _full_hamiltonian(spec: ChainSpec, b1: float = 0.0, beta1: float = 0.0) -> np.ndarray:
    n = spec.n_sites
    H = np.zeros((2 ** n, 2 ** n), dtype=complex)
    for i, c in enumerate(spec.couplings):
        H += 0.5 * c * (
            (1 + spec.gamma) * site_operator(_X, i + 1, n) @ site_operator(_X, i + 2, n)
            + (1 - spec.gamma) * site_operator(_Y, i + 1, n) @ site_operator(_Y, i + 2, n)
        )
    for i, b in enumerate(spec.fields):
        if b != 0.0:
            H += b * site_operator(_Z, i + 1, n)
    if b1 != 0.0:
        H += b1 * site_operator(_Z, 1, n)
    if beta1 != 0.0:
        H += beta1 * site_operator(_Y, 1, n)
    return H


def full_propagator(spec: ChainSpec, pulse: ControlPulse) -> DenseUnitary:
    """Exact piecewise-constant evolution of the full spin Hamiltonian."""
    n = spec.n_sites
    _check_sites(n)
    U = np.eye(2 ** n, dtype=complex)
    for m in range(pulse.n_steps):
        beta = pulse.samples_beta1[m] if pulse.has_beta1 else 0.0
        H = _full_hamiltonian(spec, pulse.samples_b1[m], beta)
        lam, V = np.linalg.eigh(H)
        U = (V * np.exp(-1j * lam * pulse.dt)) @ V.conj().T @ U
    return DenseUnitary(U, n)


def lift_mode_unitary(u: np.ndarray, n: int) -> DenseUnitary:
    """Gaussian lift: the many-body unitary induced by a mode unitary.

    Takes h = i log u (principal branch, eigenphases in (-pi, pi]) and
    returns exp(-i sum_nm h_nm a^dag_n a_m); defined up to a global phase.
    """
    _check_sites(n)
    u = np.asarray(u, dtype=complex)
    if u.shape != (n, n):
        raise ValueError("mode unitary must be N x N")
    if np.abs(u.conj().T @ u - np.eye(n)).max() > 1e-10:
        raise ValueError("input is not unitary")
    h = 1j * logm(u)
    h = 0.5 * (h + h.conj().T)
    K = np.zeros((2 ** n, 2 ** n), dtype=complex)
    ops = [jw_annihilation(s, n) for s in range(1, n + 1)]
    for a in range(n):
        for b in range(n):
            if h[a, b] != 0.0:
                K += h[a, b] * ops[a].conj().T @ ops[b]
    lam, V = np.linalg.eigh(K)
    return DenseUnitary((V * np.exp(-1j * lam)) @ V.conj().T, n)


def ideal_swap_operator(k: int, l: int, n: int) -> DenseUnitary:
    """The exact many-body matrix of exp(-i pi h_kl / 2).

    For odd l-k this is the explicit projector expansion
    (|00><00| + |11><11|) (x) 1 - i (|01><10| + |10><01|) (x) L_kl with
    L_kl = prod_{k<j<l} Z_j.  The even case is built from its generator
    -i(a^dag_k a_l - a^dag_l a_k) by exact exponentiation.

    Relative-phase convention: with the standard string a_n = s+_n prod Z_m
    (the one that makes the mode drift real tridiagonal), h_kl restricted to
    span{|01>, |10>}_kl is the symmetric +1 block, so its pi/2 exponential
    carries -i on both off-diagonal entries.  A real antisymmetric
    (|01><10| - |10><01|) form instead is the same operator conjugated by a
    single-site Z phase (a site-local basis choice); the two are NOT equal up
    to global phase.  This module uses the exponential, which the Gaussian
    lift verifies exactly.
    """
    _check_sites(n)
    if not 1 <= k < l <= n:
        raise ValueError("need 1 <= k < l <= N")
    if (l - k) % 2 == 1:
        p00 = np.array([[1, 0], [0, 0]], dtype=complex)
        p11 = np.array([[0, 0], [0, 1]], dtype=complex)
        up = np.array([[0, 1], [0, 0]], dtype=complex)   # |0><1|
        dn = np.array([[0, 0], [1, 0]], dtype=complex)   # |1><0|

        def assemble(op_k, op_l, string: bool) -> np.ndarray:
            ops = [_I2] * n
            ops[k - 1] = op_k
            ops[l - 1] = op_l
            if string:
                for j in range(k, l - 1):
                    ops[j] = _Z
            return _kron_all(ops)

        m = (assemble(p00, p00, False) + assemble(p11, p11, False)
             - 1j * assemble(up, dn, True) - 1j * assemble(dn, up, True))
        return DenseUnitary(m, n)
    ak = jw_annihilation(k, n)
    al = jw_annihilation(l, n)
    h = -1j * (ak.conj().T @ al - al.conj().T @ ak)
    lam, V = np.linalg.eigh(h)
    return DenseUnitary((V * np.exp(-1j * lam * np.pi / 2)) @ V.conj().T, n)


def compare_up_to_phase(a: DenseUnitary | np.ndarray, b: DenseUnitary | np.ndarray) -> float:
    """Phase-invariant infidelity 1 - (|tr(a^dag b)| / dim)^2."""
    ma = a.matrix if isinstance(a, DenseUnitary) else np.asarray(a)
    mb = b.matrix if isinstance(b, DenseUnitary) else np.asarray(b)
    if ma.shape != mb.shape:
        raise ValueError("dimension mismatch")
    d = ma.shape[0]
    return float(1.0 - (abs(np.trace(ma.conj().T @ mb)) / d) ** 2)


def embed_control_gate(u: np.ndarray, n: int) -> np.ndarray:
    """Embed a 2x2 (site 1) or 4x4 (sites 1-2) gate into the 2^n space."""
    if u.shape == (2, 2):
        return np.kron(u, np.eye(2 ** (n - 1)))
    if u.shape == (4, 4):
        return np.kron(u, np.eye(2 ** (n - 2)))
    raise ValueError("fast gates act on one or two control sites")


def zx_full(angle: float, n: int) -> np.ndarray:
    """exp(-i angle Z_1 X_2) in the 2^n space."""
    zx = site_operator(_Z, 1, n) @ site_operator(_X, 2, n)
    return expm(-1j * angle * zx)
