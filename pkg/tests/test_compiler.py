"""Logical-circuit compilation: schedules, phase cancellation, pulse library."""

import json

import numpy as np
import pytest

from spinbus import (
    ChainSpec,
    GateSchedule,
    LogicalCircuit,
    PulseLibrary,
    compile_circuit,
    logical_swap_schedule,
)
from spinbus.compiler import (
    LogicalGate,
    PulseSegment,
    encoding_isometry,
    ideal_logical_swap,
    ideal_logical_unitary,
    schedule_unitary,
)
from spinbus.oracle import compare_up_to_phase
from spinbus.targets import FastGate


def _encoded_infidelity(spec, schedule, circuit_unitary):
    """Phase-invariant infidelity on the encoded subspace."""
    V = encoding_isometry(spec.n_sites)
    U = schedule_unitary(spec, schedule).matrix
    got = V.conj().T @ U @ V * schedule.phase
    d = got.shape[0]
    return 1.0 - (abs(np.trace(got.conj().T @ circuit_unitary)) / d) ** 2


def test_empty_circuit():
    spec = ChainSpec.uniform(4)
    schedule = compile_circuit(LogicalCircuit(2, ()), spec)
    assert schedule.segments == ()


def test_single_x_rotation_in_place():
    spec = ChainSpec.uniform(4)
    circuit = LogicalCircuit(2, (LogicalGate("X_rot", (1,), 0.3),))
    schedule = compile_circuit(circuit, spec)
    assert len(schedule.segments) == 1
    seg = schedule.segments[0]
    assert isinstance(seg, PulseSegment)
    assert seg.target.kind == "x_rotation"
    assert not any(isinstance(s, FastGate) for s in schedule.segments)


@pytest.mark.parametrize("n_sites", [4, 6, 8])
def test_exact_logical_swap(n_sites):
    spec = ChainSpec.uniform(n_sites)
    nl = n_sites // 2
    schedule = logical_swap_schedule(spec, nl)
    ideal = ideal_logical_swap(nl, 1, nl)
    assert _encoded_infidelity(spec, schedule, ideal) < 1e-10


def test_logical_swap_of_qubit_one_is_empty():
    spec = ChainSpec.uniform(4)
    assert logical_swap_schedule(spec, 1).segments == ()


def test_encoded_subspace_conserved():
    spec = ChainSpec.uniform(6)
    schedule = logical_swap_schedule(spec, 3)
    V = encoding_isometry(6)
    U = schedule_unitary(spec, schedule).matrix
    img = U @ V
    # image stays inside the encoded subspace
    assert np.max(np.abs(img - V @ (V.conj().T @ img))) < 1e-10


def test_compiled_cz_exact():
    spec = ChainSpec.uniform(4)
    circuit = LogicalCircuit(2, (LogicalGate("CZ", (1, 2)),))
    schedule = compile_circuit(circuit, spec)
    assert _encoded_infidelity(spec, schedule, ideal_logical_unitary(circuit)) < 1e-10


def test_compiled_cz_on_random_states(rng):
    spec = ChainSpec.uniform(4)
    circuit = LogicalCircuit(2, (LogicalGate("CZ", (1, 2)),))
    schedule = compile_circuit(circuit, spec)
    V = encoding_isometry(4)
    U = schedule_unitary(spec, schedule).matrix
    got = schedule.phase * (V.conj().T @ U @ V)
    cz = np.diag([1, 1, 1, -1]).astype(complex)
    # strip the residual global phase once, from a reference state
    ph = got[0, 0] / abs(got[0, 0])
    for _ in range(20):
        psi = rng.normal(size=4) + 1j * rng.normal(size=4)
        psi /= np.linalg.norm(psi)
        overlap = abs(np.vdot(cz @ psi, got @ psi / ph))
        assert overlap > 1.0 - 1e-10


def test_mixed_circuit_exact():
    spec = ChainSpec.uniform(6)
    circuit = LogicalCircuit(3, (
        LogicalGate("X_rot", (2,), 0.4),
        LogicalGate("H_fast", (3,)),
        LogicalGate("CZ", (1, 3)),
        LogicalGate("Z_rot", (2,), -0.9),
        LogicalGate("CZ", (2, 3)),
    ))
    schedule = compile_circuit(circuit, spec)
    assert _encoded_infidelity(spec, schedule, ideal_logical_unitary(circuit)) < 1e-10


def test_disjoint_gates_commute():
    spec = ChainSpec.uniform(8)
    a = LogicalGate("X_rot", (2,), 0.7)
    b = LogicalGate("Z_rot", (4,), 1.1)
    u_ab = schedule_unitary(spec, compile_circuit(LogicalCircuit(4, (a, b)), spec)).matrix
    u_ba = schedule_unitary(spec, compile_circuit(LogicalCircuit(4, (b, a)), spec)).matrix
    assert compare_up_to_phase(u_ab, u_ba) < 1e-10


def test_circuit_json_round_trip(tmp_path):
    circuit = LogicalCircuit(3, (
        LogicalGate("CZ", (1, 3)),
        LogicalGate("X_rot", (2,), 0.25),
    ))
    path = tmp_path / "circuit.json"
    path.write_text(json.dumps(circuit.to_dict()))
    assert LogicalCircuit.from_json(path) == circuit


def test_circuit_validation():
    with pytest.raises(ValueError):
        LogicalGate("CZ", (1, 1))
    with pytest.raises(ValueError):
        LogicalGate("X_rot", (1, 2), 0.1)
    with pytest.raises(ValueError):
        LogicalGate("SWAP", (1,))
    with pytest.raises(ValueError):
        LogicalCircuit(2, (LogicalGate("X_rot", (3,), 0.1),))
    with pytest.raises(ValueError):
        compile_circuit(LogicalCircuit(3, ()), ChainSpec.uniform(4))
    with pytest.raises(ValueError):
        logical_swap_schedule(ChainSpec.uniform(5), 2)


def test_synthesized_swap_with_library(tmp_path):
    spec = ChainSpec.uniform(4)
    lib = PulseLibrary()
    sched = logical_swap_schedule(spec, 2, library=lib, synthesize=True, tol=1e-4)
    assert all(s.provenance == "synthesized" for s in sched.pulse_segments())
    assert len(lib) == 2
    # second compilation hits the library, no re-synthesis
    again = logical_swap_schedule(spec, 2, library=lib, synthesize=False)
    assert all(s.provenance == "library" for s in again.pulse_segments())
    # library round-trips through a directory
    lib.save_dir(tmp_path / "lib")
    reloaded = PulseLibrary.load_dir(tmp_path / "lib")
    third = logical_swap_schedule(spec, 2, library=reloaded, synthesize=False)
    assert all(s.provenance == "library" for s in third.pulse_segments())
    for s1, s3 in zip(again.pulse_segments(), third.pulse_segments()):
        assert s1.pulse == s3.pulse


def test_missing_pulse_without_synthesis_raises():
    spec = ChainSpec.uniform(4)
    with pytest.raises(KeyError):
        logical_swap_schedule(spec, 2, library=PulseLibrary(), synthesize=False)


def test_schedule_json(tmp_path):
    spec = ChainSpec.uniform(4)
    lib = PulseLibrary()
    sched = logical_swap_schedule(spec, 2, library=lib, synthesize=True, tol=1e-4)
    path = tmp_path / "schedule.json"
    sched.save_json(path, spec)
    data = json.loads(path.read_text())
    assert data["n_sites"] == 4
    assert len(data["segments"]) == 2
    refs = [s["pulse_ref"] for s in data["segments"]]
    assert all(r in data["pulses"] for r in refs)


def test_fast_gate_duration_degrades_gracefully():
    spec = ChainSpec.uniform(4)
    circuit = LogicalCircuit(2, (LogicalGate("H_fast", (1,)),))
    exact = compile_circuit(circuit, spec)
    ideal = ideal_logical_unitary(circuit)
    assert _encoded_infidelity(spec, exact, ideal) < 1e-10
    slow_err = []
    for tg in (1e-3, 1e-1):
        sched = compile_circuit(circuit, spec, fast_gate_duration=tg)
        slow_err.append(_encoded_infidelity(spec, sched, ideal))
    assert slow_err[0] < 1e-3  # t_g << 1/c_j barely perturbs the gate
    assert slow_err[0] < slow_err[1]  # error grows with gate duration
