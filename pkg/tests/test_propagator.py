"""Step propagators and pulse evolution in the fermionic representations."""

import numpy as np
import pytest
from scipy.linalg import expm

from spinbus import ChainSpec, ControlPulse, build_generators, evolve, step_propagator
from spinbus.chain import QuadraticGenerators

from conftest import random_pulse


def test_zero_generator_gives_identity():
    g = QuadraticGenerators("mode", 2, np.zeros((2, 2), dtype=complex),
                            np.zeros((2, 2), dtype=complex), 0.0)
    u = step_propagator(g, b1=0.0, dt=1.7)
    assert np.max(np.abs(u - np.eye(2))) < 1e-15


def test_n2_half_pi_step():
    g = build_generators(ChainSpec.uniform(2), "mode")
    u = step_propagator(g, b1=0.0, dt=np.pi / 2)
    want = np.array([[0, -1j], [-1j, 0]])
    assert np.max(np.abs(u - want)) < 1e-12


def test_semigroup_property(rng):
    spec = ChainSpec(4, (0.9, 1.1, 1.3), (0.2, 0.0, -0.3, 0.5))
    g = build_generators(spec, "mode")
    b1 = rng.normal()
    dt = 0.73
    half = step_propagator(g, b1, dt=dt / 2)
    whole = step_propagator(g, b1, dt=dt)
    assert np.max(np.abs(half @ half - whole)) < 1e-12


def test_constant_pulse_matches_direct_exponential():
    g = build_generators(ChainSpec.uniform(5), "mode")
    pulse = ControlPulse.constant(0.0, 0.25, 40)  # T = 10
    u = evolve(g, pulse).total
    want = expm(-1j * g.hermitian(0.0) * 10.0)
    assert np.max(np.abs(u - want)) < 1e-12


def test_composition_split(rng):
    g = build_generators(ChainSpec.uniform(4), "mode")
    samples = rng.normal(size=10)
    whole = ControlPulse(0.25, tuple(samples))
    first = ControlPulse(0.25, tuple(samples[:6]))
    second = ControlPulse(0.25, tuple(samples[6:]))
    u = evolve(g, second).total @ evolve(g, first).total
    assert np.max(np.abs(u - evolve(g, whole).total)) < 1e-12


def test_step_ordering_last_step_leftmost():
    g = build_generators(ChainSpec.uniform(3), "mode")
    pulse = ControlPulse(0.4, (0.0, 2.5))
    u = evolve(g, pulse).total
    want = step_propagator(g, 2.5, dt=0.4) @ step_propagator(g, 0.0, dt=0.4)
    assert np.max(np.abs(u - want)) < 1e-13


def test_cache_product_equals_total(rng):
    g = build_generators(ChainSpec.uniform(4), "mode")
    pulse = random_pulse(rng, n_steps=12)
    prop = evolve(g, pulse, cache=True)
    assert prop.steps is not None and len(prop.steps) == 12
    acc = np.eye(4, dtype=complex)
    for s in prop.steps:
        acc = s @ acc
    assert np.max(np.abs(acc - prop.total)) < 1e-12


def test_unitarity(rng):
    g = build_generators(ChainSpec.uniform(6), "mode")
    prop = evolve(g, random_pulse(rng, n_steps=100, scale=3.0))
    assert prop.unitarity_defect() < 1e-12


def test_majorana_propagator_real_orthogonal(rng):
    spec = ChainSpec(4, (1.0, 1.0, 1.0), (0.5,) * 4, gamma=0.7)
    g = build_generators(spec, "majorana")
    o = evolve(g, random_pulse(rng)).total
    assert np.isrealobj(o)
    assert np.max(np.abs(o @ o.T - np.eye(8))) < 1e-12


def test_extended_majorana_dimension():
    g = build_generators(ChainSpec.uniform(3), "majorana", y1_channel=True)
    assert g.dim == 7
    o = step_propagator(g, 1.0, beta1=0.5, dt=0.25)
    assert o.shape == (7, 7)
    assert np.max(np.abs(o @ o.T - np.eye(7))) < 1e-12


def test_beta1_rejected_without_channel():
    g = build_generators(ChainSpec.uniform(3), "mode")
    with pytest.raises(ValueError):
        step_propagator(g, 1.0, beta1=0.5, dt=0.25)
    with pytest.raises(ValueError):
        evolve(g, ControlPulse(0.25, (1.0,), (0.5,)))


def test_determinism(rng):
    g = build_generators(ChainSpec.uniform(5), "mode")
    pulse = random_pulse(rng, n_steps=20)
    a = evolve(g, pulse).total
    b = evolve(g, pulse).total
    assert np.array_equal(a, b)
