import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rydmis.detuning import (
    dmm_parameters,
    global_detuning,
    local_detunings_mis,
)
from rydmis.errors import ConstraintViolation
from rydmis.instances import instance_from_dict, six_node_demo
from rydmis.model import ProblemGraph, Register, interaction_matrix
from rydmis.schedule import (
    PulseSequence,
    Waveform,
    build_dmm_sequence,
    build_global_sequence,
    build_local_sequence,
    sample_waveform,
    validate_sequence,
)


def six_node_parts():
    inst = instance_from_dict(six_node_demo())
    device = inst.device_for()
    V = interaction_matrix(inst.register, device)
    plan = local_detunings_mis(V, inst.graph, tau=0.9)
    return inst, device, plan


def two_atom_plan(delta=5.0):
    reg = Register(np.array([[0.0, 0.0], [5.0, 0.0]]))
    V = interaction_matrix(reg)
    g = ProblemGraph.from_adjacency([[0, 1], [1, 0]])
    plan = local_detunings_mis(V, g, tau=delta / V[0, 1])
    return reg, plan


def test_omega_ramp_peaks_at_midpoint():
    wf = Waveform.evenly_spaced(6000.0, (0.0, 12.0, 0.0))
    assert sample_waveform(wf, 3000.0) == pytest.approx(12.0)
    assert sample_waveform(wf, 0.0) == 0.0
    assert sample_waveform(wf, 6000.0) == 0.0


def test_detuning_ramp_endpoints_and_interior():
    wf = Waveform.ramp(6000.0, -5.0, 5.0)
    assert sample_waveform(wf, 0.0) == pytest.approx(-5.0)
    assert sample_waveform(wf, 1500.0) == pytest.approx(-2.5)
    assert sample_waveform(wf, 6000.0) == pytest.approx(5.0)


def test_sample_waveform_rejects_out_of_range():
    wf = Waveform.ramp(1000.0, 0.0, 1.0)
    with pytest.raises(ValueError):
        sample_waveform(wf, -1.0)
    with pytest.raises(ValueError):
        sample_waveform(wf, 1000.1)


@given(
    st.lists(st.floats(-10, 10), min_size=2, max_size=6),
    st.floats(0.0, 1.0),
)
def test_waveform_linear_between_control_points(values, frac):
    wf = Waveform.evenly_spaced(1000.0, tuple(values))
    t = 1000.0 * frac
    xs = np.linspace(0.0, 1000.0, len(values))
    assert sample_waveform(wf, t) == pytest.approx(
        float(np.interp(t, xs, values)), abs=1e-9
    )


def test_local_sequence_endpoints_match_plan():
    inst, device, plan = six_node_parts()
    seq = build_local_sequence(inst.register, plan, 12.0, 6000.0, device)
    assert seq.rabi_at(0.0) == 0.0
    assert seq.rabi_at(6000.0) == 0.0
    assert seq.rabi_at(3000.0) == pytest.approx(12.0)
    final = seq.detunings_at(6000.0)
    start = seq.detunings_at(0.0)
    for i, d in enumerate(plan.detunings):
        assert final[i] == pytest.approx(d, rel=1e-12)
        assert start[i] == pytest.approx(-d, rel=1e-12)


def test_local_sequence_six_node_validates_cleanly():
    inst, device, plan = six_node_parts()
    seq = build_local_sequence(inst.register, plan, 12.0, 6000.0, device)
    assert validate_sequence(seq, device) == []


def test_dmm_sequence_start_and_intent_endpoint():
    inst, device, plan = six_node_parts()
    dmm = dmm_parameters(plan, "intent")
    seq = build_dmm_sequence(inst.register, dmm, 12.0, 6000.0, device)
    dmax = plan.delta_max
    start = seq.detunings_at(0.0)
    final = seq.detunings_at(6000.0)
    for i in range(6):
        assert start[i] == pytest.approx(-dmax, rel=1e-12)
        assert final[i] == pytest.approx(plan.detunings[i], rel=1e-12)


def test_dmm_literal_full_modulation_ends_at_zero():
    reg, plan = two_atom_plan()
    lit = dmm_parameters(plan, "literal")
    seq = build_dmm_sequence(reg, lit, 12.0, 6000.0)
    final = seq.detunings_at(6000.0)
    # epsilon = 1 cancels the shared sweep exactly at the endpoint
    assert lit.epsilon[0] == pytest.approx(1.0)
    assert final[0] == pytest.approx(0.0, abs=1e-12)


def test_dmm_effective_detunings_monotone_in_time():
    inst, device, plan = six_node_parts()
    for policy in ("literal", "intent"):
        seq = build_dmm_sequence(
            inst.register, dmm_parameters(plan, policy), 12.0, 6000.0, device
        )
        ts = np.linspace(0.0, 6000.0, 25)
        dets = np.array([seq.detunings_at(t) for t in ts])
        assert np.all(np.diff(dets, axis=0) >= -1e-12)


def test_global_sequence_shared_detuning():
    inst, device, plan = six_node_parts()
    feas = global_detuning(plan)
    seq = build_global_sequence(inst.register, feas.delta, 12.0, 6000.0, device)
    for t in (0.0, 1700.0, 6000.0):
        dets = seq.detunings_at(t)
        assert np.allclose(dets, dets[0])
    assert seq.detunings_at(6000.0)[0] == pytest.approx(feas.delta, rel=1e-12)


def test_global_sequence_boundary_detuning():
    reg = Register(np.array([[0.0, 0.0], [20.0, 0.0]]))
    seq = build_global_sequence(reg, 48.0, 12.0, 6000.0)
    assert validate_sequence(seq) == []
    with pytest.raises(ConstraintViolation):
        build_global_sequence(reg, 49.0, 12.0, 6000.0)


@pytest.mark.parametrize("mode", ["local", "dmm", "global"])
def test_every_mode_sweeps_negative_to_positive(mode):
    inst, device, plan = six_node_parts()
    if mode == "local":
        seq = build_local_sequence(inst.register, plan, 12.0, 6000.0, device)
    elif mode == "dmm":
        seq = build_dmm_sequence(
            inst.register, dmm_parameters(plan), 12.0, 6000.0, device
        )
    else:
        seq = build_global_sequence(
            inst.register, global_detuning(plan).delta, 12.0, 6000.0, device
        )
    assert all(d <= 0.0 for d in seq.detunings_at(0.0))
    assert all(d >= 0.0 for d in seq.detunings_at(6000.0))


def test_validate_sequence_flags_duration():
    reg = Register(np.array([[0.0, 0.0], [20.0, 0.0]]))
    seq = PulseSequence(
        mode="global",
        register=reg,
        omega=Waveform.evenly_spaced(7000.0, (0.0, 12.0, 0.0)),
        delta=Waveform.ramp(7000.0, -5.0, 5.0),
    )
    rules = {v.rule for v in validate_sequence(seq)}
    assert "max_duration" in rules


def test_validate_sequence_flags_rabi_amplitude():
    reg = Register(np.array([[0.0, 0.0], [20.0, 0.0]]))
    seq = PulseSequence(
        mode="global",
        register=reg,
        omega=Waveform.evenly_spaced(6000.0, (0.0, 13.0, 0.0)),
        delta=Waveform.ramp(6000.0, -5.0, 5.0),
    )
    rules = {v.rule for v in validate_sequence(seq)}
    assert "max_rabi" in rules


def test_validate_sequence_flags_effective_detuning():
    reg = Register(np.array([[0.0, 0.0], [20.0, 0.0]]))
    seq = PulseSequence(
        mode="global",
        register=reg,
        omega=Waveform.evenly_spaced(6000.0, (0.0, 12.0, 0.0)),
        delta=Waveform.ramp(6000.0, -60.0, 60.0),
    )
    rules = {v.rule for v in validate_sequence(seq)}
    assert "max_abs_detuning" in rules


def test_builders_refuse_mismatched_register():
    inst, device, plan = six_node_parts()
    small = Register(np.array([[0.0, 0.0], [5.0, 0.0]]))
    with pytest.raises(ValueError):
        build_local_sequence(small, plan, 12.0, 6000.0, device)


def test_sequence_json_round_trip_fields():
    inst, device, plan = six_node_parts()
    seq = build_dmm_sequence(
        inst.register, dmm_parameters(plan), 12.0, 6000.0, device
    )
    data = seq.to_json_dict()
    assert data["mode"] == "dmm"
    assert data["duration_ns"] == 6000.0
    assert set(data["epsilon"]) == set(inst.register.labels)
    assert data["omega"]["points"][0] == [0.0, 0.0]
