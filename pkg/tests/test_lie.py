"""Dynamical Lie algebra closure, membership, and commutator identities."""

import numpy as np
import pytest

from spinbus import ChainSpec, build_generators, generate_algebra, membership, verify_paper_identities
from spinbus.chain import QuadraticGenerators, flip_spec
from spinbus.lie import hopping_element, z_element


def _brute_force_dimension(seeds: list[np.ndarray], max_rounds: int = 10) -> int:
    """Independent closure: stack commutators, measure real rank by SVD."""
    elems = [s.copy() for s in seeds]

    def rank(mats):
        rows = [np.concatenate([m.real.ravel(), m.imag.ravel()]) for m in mats]
        return np.linalg.matrix_rank(np.array(rows), tol=1e-10)

    for _ in range(max_rounds):
        new = [a @ b - b @ a for a in elems for b in elems]
        if rank(elems + new) == rank(elems):
            return int(rank(elems))
        elems += new
    raise RuntimeError("brute-force closure did not stabilize")


def test_n2_dimension_four_brute_force():
    g = build_generators(ChainSpec.uniform(2), "mode")
    basis = generate_algebra(g)
    assert basis.dimension == 4
    seeds = [1j * g.drift, 1j * g.ctrl_z1]
    assert _brute_force_dimension(seeds) == 4


@pytest.mark.parametrize("n", [3, 4, 5, 6])
def test_dimension_is_n_squared(n):
    g = build_generators(ChainSpec.uniform(n), "mode")
    assert generate_algebra(g).dimension == n * n


def test_n3_hopping_memberships():
    g = build_generators(ChainSpec.uniform(3), "mode")
    basis = generate_algebra(g)
    for (k, l) in [(1, 2), (1, 3), (2, 3)]:
        assert membership(hopping_element(k, l, 3), basis) < 1e-10
    for k in (1, 2, 3):
        assert membership(z_element(k, 3), basis) < 1e-10


def test_single_generator_dimension_one():
    g = QuadraticGenerators("mode", 2, np.zeros((2, 2), dtype=complex),
                            np.diag([-2.0, 0.0]).astype(complex), 0.0)
    assert generate_algebra(g).dimension == 1


def test_self_membership_zero():
    g = build_generators(ChainSpec.uniform(3), "mode")
    basis = generate_algebra(g)
    for el in basis.elements:
        assert membership(el, basis) < 1e-12


def test_identity_outside_span_residual_one():
    # drift-only algebra of a traceless generator: span excludes the identity
    g = QuadraticGenerators("mode", 2, np.array([[0, 1], [1, 0]], dtype=complex),
                            np.zeros((2, 2), dtype=complex), 0.0)
    basis = generate_algebra(g)
    assert basis.dimension == 1
    assert membership(1j * np.eye(2), basis) == pytest.approx(1.0, abs=1e-12)


def test_membership_rejects_zero():
    basis = generate_algebra(build_generators(ChainSpec.uniform(3), "mode"))
    with pytest.raises(ValueError):
        membership(np.zeros((3, 3)), basis)


def test_basis_orthonormal_and_closed():
    basis = generate_algebra(build_generators(ChainSpec.uniform(4), "mode"))
    vecs = [np.concatenate([e.real.ravel(), e.imag.ravel()]) for e in basis.elements]
    gram = np.array(vecs) @ np.array(vecs).T
    assert np.max(np.abs(gram - np.eye(len(vecs)))) < 1e-10
    for a in basis.elements:
        for b in basis.elements:
            c = a @ b - b @ a
            if np.linalg.norm(c) < 1e-12:
                continue
            assert membership(c, basis) < basis.closure_tolerance * 10


def test_identities_uniform_and_nonuniform():
    for c in [(1.0, 1.0, 1.0), (2.0, 3.0, 5.0)]:
        spec = ChainSpec(4, c, (0.0,) * 4)
        report = verify_paper_identities(spec)
        assert set(report) == {"h12", "h13", "h23", "h14", "h24"}
        assert all(v < 1e-12 for v in report.values())


def test_identity_normalization_detects_mismatch():
    # Rescaling c1 without rescaling the h12 formula must produce a residual.
    spec = ChainSpec(4, (2.0, 1.0, 1.0), (0.0,) * 4)
    g = build_generators(spec, "mode")
    ih1 = 1j * g.ctrl_z1
    ih = 1j * g.drift
    comm = lambda a, b: a @ b - b @ a
    wrong = comm(ih1, comm(ih1, ih)) / 4.0  # missing the 1/c1 factor
    right = 1j * hopping_element(1, 2, 4)
    assert np.max(np.abs(wrong - right)) > 0.5


def test_dimension_invariances():
    spec = ChainSpec(4, (1.0, 2.0, 3.0), (0.1, 0.2, 0.3, 0.4))
    dim = generate_algebra(build_generators(spec, "mode")).dimension
    scaled = ChainSpec(4, (2.0, 4.0, 6.0), (0.2, 0.4, 0.6, 0.8))
    assert generate_algebra(build_generators(scaled, "mode")).dimension == dim
    # flip maps the control site 1 -> N; close with the flipped control
    flipped = flip_spec(spec)
    gf = build_generators(flipped, "mode")
    ctrl_end = np.zeros((4, 4), dtype=complex)
    ctrl_end[3, 3] = -2.0
    gf_end = QuadraticGenerators("mode", 4, gf.drift, ctrl_end, gf.identity_offset)
    assert generate_algebra(gf_end).dimension == dim


def test_dimension_monotone_in_generators():
    g = build_generators(ChainSpec.uniform(3), "mode")
    drift_only = QuadraticGenerators("mode", 3, g.drift,
                                     np.zeros((3, 3), dtype=complex), 0.0)
    assert generate_algebra(drift_only).dimension <= generate_algebra(g).dimension


def test_tolerance_validation_and_cap():
    g = build_generators(ChainSpec.uniform(3), "mode")
    with pytest.raises(ValueError):
        generate_algebra(g, tol=1e-3)
    with pytest.raises(ValueError):
        generate_algebra(g, tol=0.0)
    with pytest.raises(RuntimeError):
        generate_algebra(g, element_cap=2)


def test_identities_require_n4():
    with pytest.raises(ValueError):
        verify_paper_identities(ChainSpec.uniform(3))
