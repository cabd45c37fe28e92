"""Atom registers, device limits, interactions and geometry-derived graphs.

Units everywhere: lengths in micrometers, angular frequencies (Rabi, detuning,
interaction strengths) in rad/us, durations in nanoseconds at API boundaries.
hbar = 1, so interaction energies are quoted as angular frequencies too.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import ConstraintViolation, DegenerateGeometryError

__all__ = [
    "DeviceSpec",
    "DEFAULT_DEVICE",
    "Register",
    "InteractionMatrix",
    "ProblemGraph",
    "Violation",
    "blockade_radius",
    "interaction_matrix",
    "derive_graph",
    "validate_register",
    "pairwise_distances",
]


@dataclass(frozen=True)
class DeviceSpec:
    """Physical limits of a neutral-atom machine.

    Defaults match the published constraints of a current-generation QPU:
    at most 80 atoms inside a 38 um trap radius, 5 um minimal spacing,
    a C6/hbar interaction coefficient of 865723.02 rad/us * um^6, 6 us
    maximal sequence duration, 500 runs per submission, detuning within
    +-48.6947 rad/us and Rabi frequency up to 12.5664 rad/us.
    """

    max_atoms: int = 80
    confinement_radius: float = 38.0
    min_distance: float = 5.0
    c6: float = 865723.02
    max_duration_ns: float = 6000.0
    max_runs: int = 500
    max_abs_detuning: float = 48.6947
    max_rabi: float = 12.5664

    def __post_init__(self) -> None:
        for name in (
            "max_atoms",
            "confinement_radius",
            "min_distance",
            "c6",
            "max_duration_ns",
            "max_runs",
            "max_abs_detuning",
            "max_rabi",
        ):
            if not getattr(self, name) > 0:
                raise ValueError(f"DeviceSpec.{name} must be strictly positive")


DEFAULT_DEVICE = DeviceSpec()


def pairwise_distances(positions: np.ndarray) -> np.ndarray:
    """Symmetric matrix of Euclidean distances between planar points."""
    pos = np.asarray(positions, dtype=float)
    diff = pos[:, None, :] - pos[None, :, :]
    return np.sqrt((diff ** 2).sum(axis=-1))


@dataclass(frozen=True, eq=False)
class Register:
    """Planar arrangement of atoms; coordinates in micrometers."""

    positions: np.ndarray
    labels: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        pos = np.array(self.positions, dtype=float)
        if pos.ndim != 2 or pos.shape[1] != 2:
            raise ValueError("positions must be an (n, 2) array of planar coordinates")
        if pos.shape[0] < 1:
            raise ValueError("a register needs at least one atom")
        if not np.all(np.isfinite(pos)):
            raise ValueError("positions must be finite")
        if pos.shape[0] > 1:
            d = pairwise_distances(pos)
            np.fill_diagonal(d, np.inf)
            hits = np.argwhere(d == 0.0)
            if hits.size:
                i, j = hits[0]
                raise DegenerateGeometryError(f"atoms {i} and {j} share a position")
        pos.setflags(write=False)
        object.__setattr__(self, "positions", pos)
        if not self.labels:
            object.__setattr__(
                self, "labels", tuple(f"q{i}" for i in range(pos.shape[0]))
            )
        elif len(self.labels) != pos.shape[0]:
            raise ValueError("label count must match atom count")

    def __len__(self) -> int:
        return self.positions.shape[0]

    @property
    def n(self) -> int:
        return self.positions.shape[0]

    def distances(self) -> np.ndarray:
        return pairwise_distances(self.positions)


@dataclass(frozen=True, eq=False)
class InteractionMatrix:
    """Pairwise van der Waals interaction strengths V_ij = C6 / d_ij^6."""

    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.array(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] != v.shape[1]:
            raise ValueError("interaction matrix must be square")
        if not np.array_equal(v, v.T):
            raise ValueError("interaction matrix must be symmetric")
        if np.any(np.diag(v) != 0.0):
            raise ValueError("interaction matrix diagonal must be zero")
        off = v[~np.eye(v.shape[0], dtype=bool)]
        if off.size and (not np.all(np.isfinite(off)) or np.any(off <= 0.0)):
            raise ValueError("off-diagonal interactions must be finite and positive")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    def __getitem__(self, key):
        return self.values[key]


@dataclass(frozen=True)
class ProblemGraph:
    """Undirected graph over atom indices, optionally vertex-weighted."""

    n: int
    edges: frozenset[tuple[int, int]]
    weights: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("graph needs at least one vertex")
        norm = set()
        for e in self.edges:
            i, j = e
            if i == j:
                raise ValueError(f"self-loop on vertex {i}")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ValueError(f"edge {e} out of range for n={self.n}")
            norm.add((min(i, j), max(i, j)))
        object.__setattr__(self, "edges", frozenset(norm))
        if self.weights is not None:
            w = tuple(float(x) for x in self.weights)
            if len(w) != self.n:
                raise ValueError("weight count must match vertex count")
            if not all(np.isfinite(x) for x in w):
                raise ValueError("weights must be finite")
            object.__setattr__(self, "weights", w)

    @classmethod
    def from_adjacency(
        cls, matrix: Sequence[Sequence[int]], weights: Iterable[float] | None = None
    ) -> "ProblemGraph":
        m = np.asarray(matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError("adjacency matrix must be square")
        if not np.array_equal(m, m.T):
            raise ValueError("adjacency matrix must be symmetric")
        if not np.all((m == 0) | (m == 1)):
            raise ValueError("adjacency entries must be 0 or 1")
        if np.any(np.diag(m) != 0):
            raise ValueError("adjacency diagonal must be zero")
        n = m.shape[0]
        edges = frozenset(
            (i, j) for i in range(n) for j in range(i + 1, n) if m[i, j]
        )
        return cls(n, edges, None if weights is None else tuple(weights))

    def has_edge(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self.edges

    def neighbors(self, i: int) -> frozenset[int]:
        return frozenset(b if a == i else a for a, b in self.edges if i in (a, b))

    def degree(self, i: int) -> int:
        return len(self.neighbors(i))

    def adjacency(self) -> np.ndarray:
        m = np.zeros((self.n, self.n), dtype=int)
        for i, j in self.edges:
            m[i, j] = m[j, i] = 1
        return m

    @property
    def is_weighted(self) -> bool:
        return self.weights is not None

    @property
    def w_max(self) -> float:
        if self.weights is None:
            raise ValueError("graph carries no weights")
        return max(self.weights)

    @property
    def w_min(self) -> float:
        if self.weights is None:
            raise ValueError("graph carries no weights")
        return min(self.weights)


@dataclass(frozen=True)
class Violation:
    """One broken validation rule, with the offending atom indices."""

    rule: str
    atoms: tuple[int, ...]
    detail: str

    def to_json_dict(self) -> dict:
        return {"rule": self.rule, "atoms": list(self.atoms), "detail": self.detail}


def blockade_radius(omega: float, device: DeviceSpec = DEFAULT_DEVICE) -> float:
    """Distance below which two driven atoms cannot both be excited.

    R_b = (C6 / omega)^(1/6) for a Rabi amplitude ``omega`` in rad/us.
    """
    if not omega > 0:
        raise ValueError("omega must be strictly positive")
    return float((device.c6 / omega) ** (1.0 / 6.0))


def interaction_matrix(
    register: Register, device: DeviceSpec = DEFAULT_DEVICE
) -> InteractionMatrix:
    """V_ij = C6 / d_ij^6 for every atom pair, zero on the diagonal."""
    d = register.distances()
    np.fill_diagonal(d, np.inf)
    hits = np.argwhere(d == 0.0)
    if hits.size:
        i, j = hits[0]
        raise DegenerateGeometryError(f"atoms {i} and {j} share a position")
    v = device.c6 / d ** 6
    np.fill_diagonal(v, 0.0)
    return InteractionMatrix(v)


def derive_graph(
    register: Register, omega: float, device: DeviceSpec = DEFAULT_DEVICE
) -> ProblemGraph:
    """Unit-disk graph: edge iff atom distance is strictly below R_b(omega)."""
    if omega > device.max_rabi:
        raise ConstraintViolation(
            f"omega {omega} rad/us exceeds device maximum {device.max_rabi}"
        )
    rb = blockade_radius(omega, device)
    d = register.distances()
    n = register.n
    edges = frozenset(
        (i, j) for i in range(n) for j in range(i + 1, n) if d[i, j] < rb
    )
    return ProblemGraph(n, edges)


def validate_register(
    register: Register, device: DeviceSpec = DEFAULT_DEVICE
) -> list[Violation]:
    """Check a register against device limits; empty list means valid.

    Boundary semantics: values exactly at a limit pass, beyond it fail.
    """
    out: list[Violation] = []
    n = register.n
    if n > device.max_atoms:
        out.append(
            Violation(
                "max_atoms", (), f"{n} atoms exceed the device limit of {device.max_atoms}"
            )
        )
    radii = np.sqrt((register.positions ** 2).sum(axis=1))
    for i in np.flatnonzero(radii > device.confinement_radius):
        out.append(
            Violation(
                "confinement_radius",
                (int(i),),
                f"atom {i} at radius {radii[i]:.4f} um lies outside "
                f"{device.confinement_radius} um",
            )
        )
    if n > 1:
        d = register.distances()
        for i in range(n):
            for j in range(i + 1, n):
                if d[i, j] < device.min_distance:
                    out.append(
                        Violation(
                            "min_distance",
                            (i, j),
                            f"atoms {i} and {j} are {d[i, j]:.4f} um apart, "
                            f"below {device.min_distance} um",
                        )
                    )
    return out
