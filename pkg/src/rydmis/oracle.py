"""Exact classical solvers used to grade emulated runs.

Exhaustive enumeration lists every maximum independent set for graphs up to
20 vertices; a bitmask branch-and-bound handles larger unweighted instances
and all weighted ones, returning one witness.  Vertices are always explored
in a fixed order (descending degree, then index) so results and node counts
are deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityError
from .model import ProblemGraph

__all__ = [
    "SolveResult",
    "is_independent_set",
    "mis_exact",
    "mwis_exact",
    "qubo_cost",
    "EXHAUSTIVE_LIMIT",
    "BRANCH_AND_BOUND_LIMIT",
]

EXHAUSTIVE_LIMIT = 20
BRANCH_AND_BOUND_LIMIT = 40
MWIS_LIMIT = 30


@dataclass(frozen=True)
class SolveResult:
    """Optimum value, the optimal sets found, and search-effort diagnostics.

    Exhaustive solves list every optimal set; branch-and-bound lists one
    witness.  ``node_count_explored`` is 2^n for exhaustive solves and the
    number of visited search nodes otherwise.
    """

    optimum_value: float
    optimal_sets: tuple[frozenset[int], ...]
    node_count_explored: int

    def to_json_dict(self) -> dict:
        return {
            "optimum": self.optimum_value,
            "sets": [sorted(s) for s in self.optimal_sets],
            "nodes_explored": self.node_count_explored,
        }


def _check_subset(graph: ProblemGraph, subset: Iterable[int]) -> frozenset[int]:
    s = frozenset(int(i) for i in subset)
    for i in s:
        if not 0 <= i < graph.n:
            raise IndexError(f"vertex {i} out of range for n={graph.n}")
    return s


def is_independent_set(graph: ProblemGraph, subset: Iterable[int]) -> bool:
    """True iff no graph edge has both endpoints in ``subset``."""
    s = _check_subset(graph, subset)
    return not any(i in s and j in s for i, j in graph.edges)


def _adjacency_bitmasks(graph: ProblemGraph) -> list[int]:
    masks = [0] * graph.n
    for i, j in graph.edges:
        masks[i] |= 1 << j
        masks[j] |= 1 << i
    return masks


def _mask_to_set(mask: int, n: int) -> frozenset[int]:
    return frozenset(i for i in range(n) if (mask >> i) & 1)


def _exhaustive_mis(graph: ProblemGraph) -> SolveResult:
    n = graph.n
    size = 1 << n
    idx = np.arange(size, dtype=np.uint64)
    conflict = np.zeros(size, dtype=bool)
    for i, j in graph.edges:
        m = np.uint64((1 << i) | (1 << j))
        conflict |= (idx & m) == m
    sizes = np.bitwise_count(idx).astype(np.int64)
    sizes[conflict] = -1
    best = int(sizes.max())
    optima = np.flatnonzero(sizes == best)
    sets = tuple(_mask_to_set(int(s), n) for s in optima)
    return SolveResult(
        optimum_value=best, optimal_sets=sets, node_count_explored=size
    )


def _branch_order(graph: ProblemGraph) -> list[int]:
    return sorted(range(graph.n), key=lambda i: (-graph.degree(i), i))


def _branch_and_bound(
    graph: ProblemGraph, weights: Sequence[float]
) -> tuple[float, int, int]:
    """Max-weight independent set over bitmasks.

    Returns (best weight, best set mask, nodes explored).  Determinism: the
    branching vertex is always the first available one in the fixed order,
    the include-branch is explored first, and only strict improvements
    replace the incumbent, so the first-found optimum is retained.
    """
    n = graph.n
    adj = _adjacency_bitmasks(graph)
    order = _branch_order(graph)

    # greedy incumbent along the fixed order
    best_w, best_mask = 0.0, 0
    avail = (1 << n) - 1
    for v in order:
        if (avail >> v) & 1:
            best_mask |= 1 << v
            best_w += weights[v]
            avail &= ~((1 << v) | adj[v])

    nodes = 0

    def avail_weight(avail: int) -> float:
        w = 0.0
        while avail:
            low = avail & -avail
            w += weights[low.bit_length() - 1]
            avail ^= low
        return w

    def rec(avail: int, cur_w: float, cur_mask: int) -> None:
        nonlocal best_w, best_mask, nodes
        nodes += 1
        if avail == 0:
            if cur_w > best_w:
                best_w, best_mask = cur_w, cur_mask
            return
        if cur_w + avail_weight(avail) <= best_w:
            return
        v = next(u for u in order if (avail >> u) & 1)
        rec(avail & ~((1 << v) | adj[v]), cur_w + weights[v], cur_mask | (1 << v))
        rec(avail & ~(1 << v), cur_w, cur_mask)

    rec((1 << n) - 1, 0.0, 0)
    return best_w, best_mask, nodes


def mis_exact(
    graph: ProblemGraph,
    all_optima: bool | None = None,
    exhaustive_limit: int = EXHAUSTIVE_LIMIT,
) -> SolveResult:
    """Maximum independent set.

    Up to ``exhaustive_limit`` vertices (default 20) every optimum is
    enumerated; beyond that a branch-and-bound returns one witness.  Passing
    ``all_optima=True`` above the limit is a capacity error, as is any graph
    beyond the branch-and-bound ceiling.
    """
    n = graph.n
    want_all = all_optima if all_optima is not None else n <= exhaustive_limit
    if want_all:
        if n > exhaustive_limit:
            raise CapacityError(
                f"enumerating all optima needs n <= {exhaustive_limit}, got {n}"
            )
        return _exhaustive_mis(graph)
    if n > BRANCH_AND_BOUND_LIMIT:
        raise CapacityError(
            f"branch-and-bound handles n <= {BRANCH_AND_BOUND_LIMIT}, got {n}"
        )
    w, mask, nodes = _branch_and_bound(graph, [1.0] * n)
    return SolveResult(
        optimum_value=int(round(w)),
        optimal_sets=(_mask_to_set(mask, n),),
        node_count_explored=nodes,
    )


def mwis_exact(graph: ProblemGraph) -> SolveResult:
    """Maximum-weight independent set; one witness, weights required."""
    if graph.weights is None:
        raise ValueError("weighted solve needs vertex weights on the graph")
    if any(w <= 0 for w in graph.weights):
        raise ValueError("vertex weights must be strictly positive")
    if graph.n > MWIS_LIMIT:
        raise CapacityError(
            f"weighted branch-and-bound handles n <= {MWIS_LIMIT}, got {graph.n}"
        )
    w, mask, nodes = _branch_and_bound(graph, graph.weights)
    return SolveResult(
        optimum_value=float(w),
        optimal_sets=(_mask_to_set(mask, graph.n),),
        node_count_explored=nodes,
    )


def qubo_cost(
    graph: ProblemGraph, assignment: Sequence[int], penalty: float = 2.0
) -> float:
    """-sum_i x_i + penalty * sum_{(i,j) in E} x_i x_j for a 0/1 assignment.

    With penalty > 1 the minimisers are exactly the maximum independent sets.
    """
    if len(assignment) != graph.n:
        raise ValueError("assignment length must match vertex count")
    x = [int(v) for v in assignment]
    if any(v not in (0, 1) for v in x):
        raise ValueError("assignment entries must be 0 or 1")
    cost = -float(sum(x))
    cost += penalty * sum(1.0 for i, j in graph.edges if x[i] and x[j])
    return cost
