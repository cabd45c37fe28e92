"""Problem-instance files: schema, bundled examples and a random generator.

An instance is a JSON object::

    {
      "positions": [[x, y], ...],      # um, required
      "adjacency": [[0/1, ...], ...],  # optional; authoritative when present
      "weights": [w, ...],             # optional; makes the instance weighted
      "omega": 12.0,                   # optional Rabi amplitude, rad/us
      "duration_ns": 6000,             # optional sweep duration
      "c6": 5420158.53                 # optional interaction coefficient
    }

Without ``adjacency`` the graph is derived from geometry (edge iff distance
is strictly below the blockade radius at ``omega``).  A declared adjacency
wins over geometry: it states the problem actually being solved.  ``c6``
overrides the device interaction coefficient -- it records which Rydberg
level the geometry was laid out for, so an instance keeps meaning the same
physical problem on a device with a different default.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import CapacityError
from .model import (
    DEFAULT_DEVICE,
    DeviceSpec,
    ProblemGraph,
    Register,
    blockade_radius,
    derive_graph,
    validate_register,
)

__all__ = [
    "Instance",
    "instance_from_dict",
    "instance_to_dict",
    "load_instance",
    "save_instance",
    "six_node_demo",
    "unconnected_star",
    "uneven_pairs",
    "generate_instance",
]


@dataclass(frozen=True, eq=False)
class Instance:
    """A register, the graph over it, and optional drive defaults."""

    register: Register
    graph: ProblemGraph
    omega: float | None = None
    duration_ns: float | None = None
    c6: float | None = None
    adjacency_declared: bool = False

    @property
    def is_weighted(self) -> bool:
        return self.graph.weights is not None

    def device_for(self, device: DeviceSpec = DEFAULT_DEVICE) -> DeviceSpec:
        """The device with this instance's interaction coefficient applied."""
        if self.c6 is None:
            return device
        return replace(device, c6=self.c6)


def instance_from_dict(
    data: dict,
    device: DeviceSpec = DEFAULT_DEVICE,
    default_omega: float = 12.0,
) -> Instance:
    if "positions" not in data:
        raise ValueError("instance needs a 'positions' field")
    register = Register(np.asarray(data["positions"], dtype=float))
    weights = data.get("weights")
    if weights is not None and len(weights) != register.n:
        raise ValueError("weights length must match atom count")
    omega = data.get("omega")
    duration = data.get("duration_ns")
    c6 = data.get("c6")
    if omega is not None and not omega > 0:
        raise ValueError("omega must be strictly positive")
    if duration is not None and not duration > 0:
        raise ValueError("duration_ns must be strictly positive")
    if c6 is not None:
        if not c6 > 0:
            raise ValueError("c6 must be strictly positive")
        device = replace(device, c6=float(c6))
    if "adjacency" in data and data["adjacency"] is not None:
        graph = ProblemGraph.from_adjacency(data["adjacency"], weights)
        if graph.n != register.n:
            raise ValueError("adjacency size must match atom count")
        declared = True
    else:
        graph = derive_graph(
            register, omega if omega is not None else default_omega, device
        )
        if weights is not None:
            graph = ProblemGraph(graph.n, graph.edges, tuple(weights))
        declared = False
    return Instance(
        register=register,
        graph=graph,
        omega=omega,
        duration_ns=duration,
        c6=None if c6 is None else float(c6),
        adjacency_declared=declared,
    )


def instance_to_dict(inst: Instance) -> dict:
    out: dict = {"positions": [[float(x), float(y)] for x, y in inst.register.positions]}
    if inst.adjacency_declared:
        out["adjacency"] = inst.graph.adjacency().tolist()
    if inst.graph.weights is not None:
        out["weights"] = list(inst.graph.weights)
    if inst.omega is not None:
        out["omega"] = inst.omega
    if inst.duration_ns is not None:
        out["duration_ns"] = inst.duration_ns
    if inst.c6 is not None:
        out["c6"] = inst.c6
    return out


def load_instance(
    path: str | Path,
    device: DeviceSpec = DEFAULT_DEVICE,
    default_omega: float = 12.0,
) -> Instance:
    with open(path) as fh:
        data = json.load(fh)
    return instance_from_dict(data, device, default_omega)


def save_instance(data: dict, path: str | Path) -> None:
    with open(path, "w") as fh:
        json.dump(data, fh, indent=2)
        fh.write("\n")


def six_node_demo() -> dict:
    """Bundled six-atom demonstration instance.

    Two interaction triangles bridged by one edge; its eight maximum
    independent sets all have size two, which makes it a good end-to-end
    smoke test for every solving method.  The geometry was laid out for a
    high Rydberg level, so the instance pins its own interaction
    coefficient; at that c6 the declared adjacency coincides with the
    blockade-disk derivation at omega = 12 (blockade radius 8.76 um falls
    between the longest edge, 8.36 um, and the shortest non-edge, 16.3 um).
    """
    return {
        "positions": [
            [-8.14402479, -9.56823364],
            [-1.74386237, -12.41500245],
            [-1.87085513, -4.08263706],
            [1.52776929, 3.55825435],
            [7.80092456, 9.04386765],
            [1.40075438, 11.89061848],
        ],
        "adjacency": [
            [0, 1, 1, 0, 0, 0],
            [1, 0, 1, 0, 0, 0],
            [1, 1, 0, 1, 0, 0],
            [0, 0, 1, 0, 1, 1],
            [0, 0, 0, 1, 0, 1],
            [0, 0, 0, 1, 1, 0],
        ],
        "omega": 12.0,
        "duration_ns": 6000,
        "c6": 5420158.53,
    }


def unconnected_star(
    n_satellites: int = 3,
    spacing: float = 1.05,
    omega: float = 12.0,
    device: DeviceSpec = DEFAULT_DEVICE,
) -> dict:
    """A center atom with satellites just outside its blockade disk.

    With ``spacing`` > 1 no pair is connected, yet the center accumulates
    ``n_satellites`` near-blockade interactions -- the configuration where
    picking detunings from the single strongest interaction misjudges the
    center's total burden.
    """
    if not spacing > 1.0:
        raise ValueError("spacing must exceed 1 to keep the star edgeless")
    d = spacing * blockade_radius(omega, device)
    pts = [[0.0, 0.0]]
    for k in range(n_satellites):
        a = 2.0 * math.pi * k / n_satellites
        pts.append([d * math.cos(a), d * math.sin(a)])
    return {"positions": pts, "omega": omega, "duration_ns": 6000}


def uneven_pairs(gaps: tuple[float, float] = (5.2, 6.2)) -> dict:
    """Two blockaded pairs with different gaps, far away from each other.

    The tight pair needs a much larger detuning than the loose one, so no
    shared detuning can serve both: a compact witness for global-method
    infeasibility.
    """
    g0, g1 = gaps
    pts = [
        [-14.0, 0.0],
        [-14.0 + g0, 0.0],
        [10.0, 0.0],
        [10.0 + g1, 0.0],
    ]
    return {"positions": pts, "omega": 12.0, "duration_ns": 6000}


def generate_instance(
    n: int,
    density: float = 0.5,
    weighted: bool = False,
    seed: int = 0,
    device: DeviceSpec = DEFAULT_DEVICE,
    omega: float = 12.0,
    duration_ns: float = 6000.0,
) -> dict:
    """Random geometric instance: positions rejection-sampled in the trap.

    ``density`` in [0, 1] squeezes the sampling disk from the full trap
    radius down to a snug packing, which raises the blockade-graph edge
    density.  Weighted instances draw weights uniformly from [0.1, 1].
    Deterministic for a given seed; placement failure after bounded retries
    is a capacity error.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if n > device.max_atoms:
        raise ValueError(f"n exceeds the device limit of {device.max_atoms}")
    if not 0.0 <= density <= 1.0:
        raise ValueError("density must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    snug = min(
        device.confinement_radius,
        0.53 * device.min_distance * math.sqrt(n) + 0.5 * device.min_distance,
    )
    radius = snug + (1.0 - density) * (device.confinement_radius - snug)

    for _ in range(60):
        pts: list[np.ndarray] = []
        for _ in range(n):
            for _ in range(400):
                r = radius * math.sqrt(rng.uniform())
                a = rng.uniform(0.0, 2.0 * math.pi)
                cand = np.array([r * math.cos(a), r * math.sin(a)])
                if all(
                    np.linalg.norm(cand - p) >= device.min_distance for p in pts
                ):
                    pts.append(cand)
                    break
            else:
                break
        if len(pts) == n:
            break
        radius = min(radius * 1.15, device.confinement_radius)
    else:
        raise CapacityError(
            f"could not place {n} atoms with {device.min_distance} um spacing "
            f"inside a {device.confinement_radius} um trap"
        )

    out: dict = {
        "positions": [[float(x), float(y)] for x, y in pts],
        "omega": omega,
        "duration_ns": duration_ns,
    }
    if weighted:
        out["weights"] = [float(w) for w in rng.uniform(0.1, 1.0, n)]
    register = Register(np.asarray(out["positions"]))
    problems = validate_register(register, device)
    if problems:  # pragma: no cover - sampling enforces the constraints
        raise CapacityError(
            "generated register failed validation: "
            + "; ".join(v.detail for v in problems)
        )
    return out
