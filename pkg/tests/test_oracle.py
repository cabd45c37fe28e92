import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rydmis.errors import CapacityError
from rydmis.instances import instance_from_dict, six_node_demo
from rydmis.model import ProblemGraph
from rydmis.oracle import (
    is_independent_set,
    mis_exact,
    mwis_exact,
    qubo_cost,
)

from conftest import SIX_NODE_OPTIMA


def triangle():
    return ProblemGraph.from_adjacency([[0, 1, 1], [1, 0, 1], [1, 1, 0]])


def path(n, weights=None):
    edges = frozenset(frozenset((i, i + 1)) for i in range(n - 1))
    return ProblemGraph(n, edges, weights)


def random_graph(rng, n, p):
    edges = frozenset(
        frozenset((i, j))
        for i in range(n)
        for j in range(i + 1, n)
        if rng.uniform() < p
    )
    return ProblemGraph(n, edges)


def test_is_independent_set_basics():
    g = triangle()
    assert is_independent_set(g, set())
    assert is_independent_set(g, {0})
    assert not is_independent_set(g, {0, 1})
    with pytest.raises(IndexError):
        is_independent_set(g, {5})


def test_is_independent_set_six_node_subset(six_node_dict):
    graph = instance_from_dict(six_node_dict).graph
    assert six_node_dict["adjacency"][0][3] == 0
    assert is_independent_set(graph, {0, 3})


def test_mis_triangle_all_optima():
    out = mis_exact(triangle())
    assert out.optimum_value == 1
    assert set(out.optimal_sets) == {frozenset({0}), frozenset({1}), frozenset({2})}


def test_mis_path_of_three():
    out = mis_exact(path(3))
    assert out.optimum_value == 2
    assert frozenset({0, 2}) in out.optimal_sets


def test_mis_six_node_all_optima(six_node_instance):
    out = mis_exact(six_node_instance.graph)
    assert out.optimum_value == 2
    assert set(out.optimal_sets) == SIX_NODE_OPTIMA


def test_mis_branch_and_bound_long_path():
    # 25 vertices is past the exhaustive cutoff; a path's MIS is ceil(n/2)
    out = mis_exact(path(25))
    assert out.optimum_value == 13
    assert len(out.optimal_sets) == 1
    assert is_independent_set(path(25), out.optimal_sets[0])


def test_mis_all_optima_capacity_guard():
    with pytest.raises(CapacityError):
        mis_exact(path(21), all_optima=True)


def test_mwis_single_vertex_and_tie_break_path():
    out = mwis_exact(ProblemGraph(1, frozenset(), (2.5,)))
    assert out.optimum_value == pytest.approx(2.5)
    out3 = mwis_exact(path(3, (1.0, 3.0, 1.0)))
    assert out3.optimum_value == pytest.approx(3.0)
    assert out3.optimal_sets[0] == frozenset({1})


def test_mwis_requires_positive_weights():
    with pytest.raises(ValueError):
        mwis_exact(path(2, (1.0, 0.0)))
    with pytest.raises(ValueError):
        mwis_exact(path(2))


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=25, deadline=None)
def test_mwis_unit_weights_equals_mis_size(seed):
    rng = np.random.default_rng(seed)
    g = random_graph(rng, 8, rng.uniform(0.1, 0.8))
    weighted = ProblemGraph(8, g.edges, (1.0,) * 8)
    assert mwis_exact(weighted).optimum_value == pytest.approx(
        mis_exact(g).optimum_value
    )


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=15, deadline=None)
def test_mwis_branch_and_bound_matches_brute_force(seed):
    rng = np.random.default_rng(seed)
    n = 10
    g = random_graph(rng, n, 0.35)
    weights = tuple(rng.uniform(0.1, 1.0, n))
    wg = ProblemGraph(n, g.edges, weights)
    best = 0.0
    for r in range(n + 1):
        for sub in itertools.combinations(range(n), r):
            if is_independent_set(g, sub):
                best = max(best, sum(weights[i] for i in sub))
    assert mwis_exact(wg).optimum_value == pytest.approx(best, rel=1e-12)


def test_qubo_cost_reference_points():
    g = path(2)
    assert qubo_cost(g, (0, 0)) == 0.0
    assert qubo_cost(g, (1, 0)) == -1.0
    assert qubo_cost(g, (1, 1)) == pytest.approx(-2.0 + 2.0)
    g5 = ProblemGraph(5, frozenset())
    assert qubo_cost(g5, (1, 1, 1, 0, 0)) == -3.0


def test_qubo_minimizers_are_mis_optima(six_node_instance):
    graph = six_node_instance.graph
    n = graph.n
    costs = {
        bits: qubo_cost(graph, bits)
        for bits in itertools.product((0, 1), repeat=n)
    }
    best = min(costs.values())
    minimizers = {
        frozenset(i for i, b in enumerate(bits) if b)
        for bits, c in costs.items()
        if c == best
    }
    assert minimizers == set(mis_exact(graph).optimal_sets)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=25, deadline=None)
def test_adding_edge_never_helps(seed):
    rng = np.random.default_rng(seed)
    n = 9
    g = random_graph(rng, n, 0.3)
    non_edges = [
        (i, j)
        for i in range(n)
        for j in range(i + 1, n)
        if not g.has_edge(i, j)
    ]
    if not non_edges:
        return
    i, j = non_edges[rng.integers(len(non_edges))]
    denser = ProblemGraph(n, g.edges | {frozenset((i, j))})
    assert mis_exact(denser).optimum_value <= mis_exact(g).optimum_value
    w = tuple(rng.uniform(0.1, 1.0, n))
    assert mwis_exact(ProblemGraph(n, denser.edges, w)).optimum_value <= (
        mwis_exact(ProblemGraph(n, g.edges, w)).optimum_value + 1e-12
    )
