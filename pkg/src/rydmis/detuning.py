"""Per-atom detuning selection for independent-set annealing schedules.

Four schemes are provided, all built from the pairwise interaction matrix of a
register and the problem graph over its atoms:

* ``baseline_detunings`` -- prior-art rule: each atom gets its strongest
  interaction with a non-neighbor, times a small safety margin.  Cheap, but
  it under-budgets atoms whose many weak non-neighbor interactions add up.
* ``local_detunings_mis`` -- additive rule: the full sum of non-neighbor
  interactions plus a fraction ``tau`` of the weakest neighbor interaction,
  so the detuning strictly clears the accumulated non-neighbor burden while
  staying below the cost of violating any edge.
* ``local_detunings_mwis`` -- weighted variant: ``tau`` becomes per-atom,
  interpolated linearly between ``lo`` and ``hi`` from the vertex weights.
* ``dmm_parameters`` / ``global_detuning`` -- rewrites of a local plan for
  hardware channels that offer only a shared waveform (optionally with a
  per-atom scaling coefficient).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .errors import DegeneratePlanError
from .model import DEFAULT_DEVICE, DeviceSpec, InteractionMatrix, ProblemGraph

__all__ = [
    "METHODS",
    "DMM_POLICIES",
    "InterpolationSpec",
    "DetuningPlan",
    "GlobalFeasibility",
    "pair_interaction_terms",
    "linear_interpolate",
    "baseline_detunings",
    "local_detunings_mis",
    "local_detunings_mwis",
    "force_node",
    "unforce_node",
    "dmm_parameters",
    "dmm_parameters_mwis",
    "global_detuning",
    "clamp_to_device",
]

METHODS = ("baseline", "local", "dmm", "global")
DMM_POLICIES = ("literal", "intent")


@dataclass(frozen=True)
class InterpolationSpec:
    """Endpoints for the weight-to-tau interpolation."""

    lo: float = 0.1
    hi: float = 0.9

    def __post_init__(self) -> None:
        if not (0.0 <= self.lo < self.hi <= 1.0):
            raise ValueError("interpolation endpoints need 0 <= lo < hi <= 1")


def linear_interpolate(
    w: float, spec: InterpolationSpec, w_max: float, w_min: float
) -> float:
    """Map a weight in [w_min, w_max] linearly onto [spec.lo, spec.hi].

    A degenerate weight range (all weights equal) maps to the midpoint.
    """
    if w_max < w_min:
        raise ValueError("w_max must not be below w_min")
    if not (w_min <= w <= w_max):
        raise ValueError(f"weight {w} outside [{w_min}, {w_max}]")
    if w_max == w_min:
        return 0.5 * (spec.lo + spec.hi)
    return spec.lo + (spec.hi - spec.lo) * (w - w_min) / (w_max - w_min)


def pair_interaction_terms(values, graph: ProblemGraph):
    """Single O(n^2) pass over ordered atom pairs.

    Returns three per-atom lists: the sum of interactions with non-neighbors,
    the weakest interaction with a neighbor (0.0 for an atom with no edges)
    and the strongest interaction with a non-neighbor (0.0 for an atom
    connected to everyone).  ``values`` only needs ``values[i][j]`` indexing.
    """
    n = graph.n
    unconnected_sum = [0.0] * n
    min_connected = [0.0] * n
    max_unconnected = [0.0] * n
    for i in range(n):
        row = values[i]
        weakest = None
        for j in range(n):
            if j == i:
                continue
            v = float(row[j])
            if graph.has_edge(i, j):
                if weakest is None or v < weakest:
                    weakest = v
            else:
                unconnected_sum[i] += v
                if v > max_unconnected[i]:
                    max_unconnected[i] = v
        if weakest is not None:
            min_connected[i] = weakest
    return unconnected_sum, min_connected, max_unconnected


@dataclass(frozen=True)
class DetuningPlan:
    """Per-atom final detunings plus the bookkeeping needed to reshape them.

    ``detunings`` are the target values (rad/us) each atom's sweep ends at.
    ``tau`` is the connected-interaction fraction used to build them (scalar
    for the plain rule, per-atom for the weighted rule, None for baseline).
    ``forced`` records per-atom tau overrides from :func:`force_node` as
    ``(atom, forced_tau)`` pairs, keeping the base ``tau`` untouched so the
    override can be undone exactly.  ``unconnected_sum`` and
    ``connected_base`` are the per-atom interaction terms the local rule was
    built from; they make detunings recomputable when a tau changes.
    """

    detunings: tuple[float, ...]
    method: str
    tau: float | tuple[float, ...] | None = None
    epsilon: tuple[float, ...] | None = None
    global_delta: float | None = None
    rho: float | None = None
    dmm_policy: str | None = None
    unconnected_sum: tuple[float, ...] | None = None
    connected_base: tuple[float, ...] | None = None
    forced: tuple[tuple[int, float], ...] = ()
    warnings: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if not self.detunings:
            raise ValueError("plan needs at least one detuning")
        for i, d in enumerate(self.detunings):
            if not (math.isfinite(d) and d >= 0.0):
                raise ValueError(f"detuning for atom {i} must be finite and >= 0")
        if self.epsilon is not None:
            if len(self.epsilon) != len(self.detunings):
                raise ValueError("epsilon length must match atom count")
            for i, e in enumerate(self.epsilon):
                if not (0.0 <= e <= 1.0):
                    raise ValueError(f"epsilon for atom {i} must lie in [0, 1]")
        if self.dmm_policy is not None and self.dmm_policy not in DMM_POLICIES:
            raise ValueError(f"unknown DMM policy {self.dmm_policy!r}")

    @property
    def n(self) -> int:
        return len(self.detunings)

    @property
    def delta_max(self) -> float:
        return max(self.detunings)

    def base_tau(self, atom: int) -> float:
        if self.tau is None:
            raise ValueError("plan carries no tau")
        if isinstance(self.tau, tuple):
            return self.tau[atom]
        return float(self.tau)

    def effective_tau(self, atom: int) -> float:
        for a, t in self.forced:
            if a == atom:
                return t
        return self.base_tau(atom)

    def to_json_dict(self) -> dict:
        tau: float | list[float] | None
        if self.tau is None:
            tau = None
        elif self.forced:
            tau = [self.effective_tau(i) for i in range(self.n)]
        elif isinstance(self.tau, tuple):
            tau = list(self.tau)
        else:
            tau = self.tau
        return {
            "method": self.method,
            "tau": tau,
            "detunings": list(self.detunings),
            "epsilon": None if self.epsilon is None else list(self.epsilon),
            "delta_max": self.delta_max,
            "global_delta": self.global_delta,
            "warnings": list(self.warnings),
        }


@dataclass(frozen=True)
class GlobalFeasibility:
    """Outcome of the shared-detuning feasibility test (never an error)."""

    feasible: bool
    rho: float
    spread: float
    delta: float | None = None
    worst_pair: tuple[int, int] | None = None

    def to_json_dict(self) -> dict:
        return {
            "feasible": self.feasible,
            "rho": self.rho,
            "spread": self.spread,
            "delta": self.delta,
            "worst_pair": None if self.worst_pair is None else list(self.worst_pair),
        }


def baseline_detunings(
    V: InteractionMatrix, graph: ProblemGraph, margin: float = 0.05
) -> DetuningPlan:
    """Prior-art rule: strongest non-neighbor interaction times (1 + margin).

    Atoms whose non-neighbor interactions are all absent (fully connected
    vertices) get detuning 0.
    """
    if not margin > 0:
        raise ValueError("margin must be strictly positive")
    if V.n != graph.n:
        raise ValueError("interaction matrix and graph disagree on atom count")
    unconn, minconn, maxunc = pair_interaction_terms(V.values, graph)
    det = tuple((1.0 + margin) * m for m in maxunc)
    return DetuningPlan(detunings=det, method="baseline")


def _connected_bases(graph: ProblemGraph, minconn, maxunc) -> tuple[float, ...]:
    # For an atom with no incident edges the weakest-neighbor term does not
    # exist; fall back to its strongest non-neighbor interaction, the nearest
    # same-scale quantity.  Without that headroom the detuning would equal
    # the non-neighbor burden exactly and the sweep would end degenerate
    # between keeping and dropping the atom.
    return tuple(
        m if graph.degree(i) else x
        for i, (m, x) in enumerate(zip(minconn, maxunc))
    )


def local_detunings_mis(
    V: InteractionMatrix, graph: ProblemGraph, tau: float = 0.9
) -> DetuningPlan:
    """Additive rule: sum of non-neighbor interactions plus ``tau`` times the
    weakest neighbor interaction.

    With 0 < tau < 1 the result strictly clears every accumulation of
    non-neighbor interactions while staying below the cheapest edge cost.
    An atom connected to everyone has no non-neighbor sum and gets ``tau``
    times its weakest edge; an atom with no edges at all substitutes its
    strongest non-neighbor interaction for the missing weakest-edge term
    (see ``_connected_bases``).
    """
    if not 0.0 < tau < 1.0:
        raise ValueError("tau must lie strictly between 0 and 1")
    if V.n != graph.n:
        raise ValueError("interaction matrix and graph disagree on atom count")
    unconn, minconn, maxunc = pair_interaction_terms(V.values, graph)
    base = _connected_bases(graph, minconn, maxunc)
    det = tuple(u + b * tau for u, b in zip(unconn, base))
    return DetuningPlan(
        detunings=det,
        method="local",
        tau=float(tau),
        unconnected_sum=tuple(unconn),
        connected_base=base,
    )


def local_detunings_mwis(
    V: InteractionMatrix,
    graph: ProblemGraph,
    spec: InterpolationSpec = InterpolationSpec(),
) -> DetuningPlan:
    """Weighted additive rule: per-atom tau interpolated from vertex weights.

    Heavier vertices get a tau closer to ``spec.hi`` and are therefore more
    likely to stay excited when an edge must be broken.
    """
    if graph.weights is None:
        raise ValueError("weighted rule needs vertex weights on the graph")
    if V.n != graph.n:
        raise ValueError("interaction matrix and graph disagree on atom count")
    w_max, w_min = graph.w_max, graph.w_min
    taus = tuple(
        linear_interpolate(w, spec, w_max, w_min) for w in graph.weights
    )
    unconn, minconn, maxunc = pair_interaction_terms(V.values, graph)
    base = _connected_bases(graph, minconn, maxunc)
    det = tuple(u + b * t for u, b, t in zip(unconn, base, taus))
    return DetuningPlan(
        detunings=det,
        method="local",
        tau=taus,
        unconnected_sum=tuple(unconn),
        connected_base=base,
    )


def _recompute_atom(plan: DetuningPlan, atom: int, tau: float) -> float:
    assert plan.unconnected_sum is not None and plan.connected_base is not None
    return plan.unconnected_sum[atom] + plan.connected_base[atom] * tau


def force_node(plan: DetuningPlan, atom: int, mode: str) -> DetuningPlan:
    """Pin an atom's fate: ``activate`` sets its tau to 1, ``deactivate`` to 0.

    The atom's detuning is recomputed from the stored interaction terms; the
    base tau is kept so :func:`unforce_node` restores the original plan.
    """
    if mode not in ("activate", "deactivate"):
        raise ValueError("mode must be 'activate' or 'deactivate'")
    if not 0 <= atom < plan.n:
        raise IndexError(f"atom {atom} out of range")
    if plan.method != "local" or plan.unconnected_sum is None:
        raise ValueError("only local plans with interaction terms can be forced")
    forced_tau = 1.0 if mode == "activate" else 0.0
    forced = tuple(
        sorted([(a, t) for a, t in plan.forced if a != atom] + [(atom, forced_tau)])
    )
    det = list(plan.detunings)
    det[atom] = _recompute_atom(plan, atom, forced_tau)
    return replace(plan, detunings=tuple(det), forced=forced)


def unforce_node(plan: DetuningPlan, atom: int) -> DetuningPlan:
    """Undo :func:`force_node`, restoring the atom's base-tau detuning."""
    if not 0 <= atom < plan.n:
        raise IndexError(f"atom {atom} out of range")
    if not any(a == atom for a, _ in plan.forced):
        raise ValueError(f"atom {atom} is not forced")
    forced = tuple((a, t) for a, t in plan.forced if a != atom)
    det = list(plan.detunings)
    det[atom] = _recompute_atom(plan, atom, plan.base_tau(atom))
    return replace(plan, detunings=tuple(det), forced=forced)


def _clip_unit(values) -> tuple[float, ...]:
    return tuple(min(1.0, max(0.0, v)) for v in values)


def dmm_parameters(plan: DetuningPlan, policy: str = "intent") -> DetuningPlan:
    """Per-atom scaling coefficients for a shared-plus-modulated channel pair.

    The shared detuning sweeps -delta_max -> +delta_max while the modulator
    sweeps 0 -> -delta_max; atom i feels their sum weighted by epsilon_i.
    Under the ``literal`` policy epsilon_i = delta_i / delta_max; under
    ``intent`` the complement is used, so the effective final detuning of
    every atom equals its planned delta_i.  Both are clamped to [0, 1].
    """
    if policy not in DMM_POLICIES:
        raise ValueError(f"unknown DMM policy {policy!r}")
    dmax = plan.delta_max
    if dmax <= 0.0:
        raise DegeneratePlanError("all detunings are zero; nothing to modulate")
    ratio = [d / dmax for d in plan.detunings]
    eps = ratio if policy == "literal" else [1.0 - r for r in ratio]
    return replace(
        plan, method="dmm", epsilon=_clip_unit(eps), dmm_policy=policy
    )


def dmm_parameters_mwis(
    plan: DetuningPlan,
    weights: Sequence[float],
    spec: InterpolationSpec = InterpolationSpec(),
    policy: str = "intent",
) -> DetuningPlan:
    """Weighted scaling coefficients: the detuning ratio times the weight's
    interpolated factor; under ``intent`` the complement of that product."""
    if policy not in DMM_POLICIES:
        raise ValueError(f"unknown DMM policy {policy!r}")
    if weights is None or len(weights) != plan.n:
        raise ValueError("need one weight per atom")
    dmax = plan.delta_max
    if dmax <= 0.0:
        raise DegeneratePlanError("all detunings are zero; nothing to modulate")
    w = [float(x) for x in weights]
    w_max, w_min = max(w), min(w)
    factors = [linear_interpolate(x, spec, w_max, w_min) for x in w]
    prod = [d / dmax * f for d, f in zip(plan.detunings, factors)]
    eps = prod if policy == "literal" else [1.0 - p for p in prod]
    return replace(
        plan, method="dmm", epsilon=_clip_unit(eps), dmm_policy=policy
    )


def global_detuning(plan: DetuningPlan, rho: float = 0.2) -> GlobalFeasibility:
    """Test whether one shared detuning can stand in for the per-atom plan.

    Feasible iff every pairwise gap |delta_i - delta_j| stays below
    ``rho * delta_max``; the shared value is then the mean of the plan.
    Infeasibility is data, not an error: the result carries the worst pair
    and the observed spread.
    """
    if not rho > 0:
        raise ValueError("rho must be strictly positive")
    det = plan.detunings
    dmax = plan.delta_max
    if dmax == 0.0:
        return GlobalFeasibility(
            feasible=True, rho=rho, spread=0.0, delta=0.0, worst_pair=None
        )
    lo = min(range(plan.n), key=lambda i: det[i])
    hi = max(range(plan.n), key=lambda i: det[i])
    spread = (det[hi] - det[lo]) / dmax
    if spread < rho:
        return GlobalFeasibility(
            feasible=True,
            rho=rho,
            spread=spread,
            delta=float(np.mean(det)),
            worst_pair=None,
        )
    return GlobalFeasibility(
        feasible=False, rho=rho, spread=spread, delta=None, worst_pair=(lo, hi)
    )


def clamp_to_device(
    plan: DetuningPlan, device: DeviceSpec = DEFAULT_DEVICE
) -> tuple[DetuningPlan, list[str]]:
    """Clamp detunings beyond the device bound, warning per clamped atom."""
    bound = device.max_abs_detuning
    det = []
    warns = []
    for i, d in enumerate(plan.detunings):
        if d > bound:
            warns.append(
                f"atom {i}: detuning {d:.6g} rad/us exceeds device bound "
                f"{bound} rad/us; clamped"
            )
            det.append(bound)
        else:
            det.append(d)
    if not warns:
        return plan, []
    clamped = replace(
        plan, detunings=tuple(det), warnings=plan.warnings + tuple(warns)
    )
    return clamped, warns
