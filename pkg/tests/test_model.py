import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rydmis.errors import ConstraintViolation, DegenerateGeometryError
from rydmis.model import (
    DEFAULT_DEVICE,
    DeviceSpec,
    InteractionMatrix,
    ProblemGraph,
    Register,
    blockade_radius,
    derive_graph,
    interaction_matrix,
    validate_register,
)


def test_default_device_constants():
    d = DEFAULT_DEVICE
    assert d.max_atoms == 80
    assert d.confinement_radius == 38.0
    assert d.min_distance == 5.0
    assert d.c6 == 865723.02
    assert d.max_duration_ns == 6000.0
    assert d.max_runs == 500
    assert d.max_abs_detuning == 48.6947
    assert d.max_rabi == 12.5664


@pytest.mark.parametrize("field", ["max_atoms", "min_distance", "c6", "max_rabi"])
def test_device_rejects_nonpositive(field):
    with pytest.raises(ValueError):
        dataclasses.replace(DEFAULT_DEVICE, **{field: 0})


def test_blockade_radius_trivial_points():
    assert blockade_radius(DEFAULT_DEVICE.c6) == pytest.approx(1.0)
    assert blockade_radius(DEFAULT_DEVICE.c6 / 64) == pytest.approx(2.0)
    assert blockade_radius(12.0) == pytest.approx(6.452078162885949, rel=1e-12)


def test_blockade_radius_rejects_nonpositive_omega():
    with pytest.raises(ValueError):
        blockade_radius(0.0)


@given(st.floats(0.1, 12.5), st.floats(0.1, 12.5))
def test_blockade_radius_decreasing_in_omega(w1, w2):
    lo, hi = sorted((w1, w2))
    if lo == hi:
        return
    assert blockade_radius(hi) < blockade_radius(lo)


def test_interaction_matrix_values(pair_register):
    V = interaction_matrix(pair_register(1.0))
    assert V[0, 1] == pytest.approx(865723.02)
    assert V[0, 0] == 0.0
    V10 = interaction_matrix(pair_register(10.0))
    assert V10[0, 1] == pytest.approx(0.86572302, rel=1e-12)
    # at the blockade radius the interaction equals the Rabi frequency
    Vb = interaction_matrix(pair_register(blockade_radius(12.0)))
    assert Vb[0, 1] == pytest.approx(12.0, rel=1e-12)


@given(st.floats(1.0, 30.0), st.floats(1.0, 30.0), st.floats(0.5, 20.0))
def test_interaction_scaling_inverse_sixth(x, y, d):
    reg = Register(np.array([[0.0, 0.0], [x, y]]))
    scaled = Register(np.array([[0.0, 0.0], [2 * x, 2 * y]]))
    v = interaction_matrix(reg)[0, 1]
    v2 = interaction_matrix(scaled)[0, 1]
    assert v2 == pytest.approx(v / 64.0, rel=1e-12)


def test_derive_graph_edges(pair_register):
    single = Register(np.array([[0.0, 0.0]]))
    assert derive_graph(single, 12.0).edges == frozenset()
    assert derive_graph(pair_register(5.0), 12.0).has_edge(0, 1)
    assert not derive_graph(pair_register(7.1), 12.0).has_edge(0, 1)


def test_derive_graph_rejects_omega_over_device_max(pair_register):
    with pytest.raises(ConstraintViolation):
        derive_graph(pair_register(5.0), 13.0)


@given(st.floats(1.0, 12.5), st.floats(1.0, 12.5), st.integers(0, 2**32 - 1))
@settings(max_examples=30)
def test_derive_graph_monotone_in_omega(w1, w2, seed):
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-15, 15, (6, 2))
    try:
        reg = Register(pts)
    except DegenerateGeometryError:
        return
    # raising omega shrinks the blockade radius, so edges can only vanish
    lo, hi = sorted((w1, w2))
    assert derive_graph(reg, hi).edges <= derive_graph(reg, lo).edges


def test_validate_register_max_atoms():
    pts = [[5.5 * i, 5.5 * j] for i in range(9) for j in range(9)]
    reg = Register(np.array(pts))  # 81 atoms
    rules = {v.rule for v in validate_register(reg, DEFAULT_DEVICE)}
    assert "max_atoms" in rules


def test_validate_register_confinement():
    reg = Register(np.array([[40.0, 0.0], [0.0, 0.0]]))
    out = validate_register(reg, DEFAULT_DEVICE)
    assert any(v.rule == "confinement_radius" and 0 in v.atoms for v in out)


def test_validate_register_min_distance(pair_register):
    out = validate_register(pair_register(4.9), DEFAULT_DEVICE)
    assert any(v.rule == "min_distance" for v in out)
    assert validate_register(pair_register(5.0), DEFAULT_DEVICE) == []


def test_validate_register_six_node_clean(six_node_instance):
    assert validate_register(six_node_instance.register, DEFAULT_DEVICE) == []


def test_register_rejects_coincident_atoms():
    with pytest.raises(DegenerateGeometryError):
        Register(np.array([[1.0, 1.0], [1.0, 1.0]]))


def test_register_labels_and_len(pair_register):
    reg = pair_register(5.0)
    assert reg.labels == ("q0", "q1")
    assert len(reg) == 2


def test_register_positions_write_protected(pair_register):
    reg = pair_register(5.0)
    with pytest.raises(ValueError):
        reg.positions[0, 0] = 99.0


def test_interaction_matrix_is_symmetric_zero_diag():
    rng = np.random.default_rng(0)
    reg = Register(rng.uniform(-10, 10, (5, 2)))
    V = interaction_matrix(reg)
    assert np.array_equal(V.values, V.values.T)
    assert np.all(np.diag(V.values) == 0.0)


def test_interaction_matrix_class_rejects_asymmetry():
    with pytest.raises(ValueError):
        InteractionMatrix(np.array([[0.0, 1.0], [2.0, 0.0]]))


def test_problem_graph_from_adjacency_and_queries():
    g = ProblemGraph.from_adjacency([[0, 1, 0], [1, 0, 1], [0, 1, 0]])
    assert g.has_edge(0, 1) and g.has_edge(1, 0)
    assert not g.has_edge(0, 2)
    assert g.neighbors(1) == {0, 2}
    assert g.degree(0) == 1
    assert not g.is_weighted


def test_problem_graph_rejects_bad_adjacency():
    with pytest.raises(ValueError):
        ProblemGraph.from_adjacency([[0, 1], [0, 0]])  # not symmetric
    with pytest.raises(ValueError):
        ProblemGraph.from_adjacency([[1, 0], [0, 0]])  # self loop
    with pytest.raises(ValueError):
        ProblemGraph.from_adjacency([[0, 2], [2, 0]])  # not 0/1


def test_problem_graph_weights_checked():
    with pytest.raises(ValueError):
        ProblemGraph(2, frozenset(), weights=(1.0,))
    g = ProblemGraph(2, frozenset(), weights=(0.5, 2.0))
    assert g.w_max == 2.0 and g.w_min == 0.5
