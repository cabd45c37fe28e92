"""Piecewise-linear waveforms and pulse sequences for annealing sweeps.

A sequence couples one shared Rabi waveform with one of three detuning
layouts: per-atom waveforms (``local``), a shared waveform plus a negative
modulator scaled per atom (``dmm``), or a single shared waveform
(``global``).  Times at the API are nanoseconds, values rad/us.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ConstraintViolation
from .detuning import DetuningPlan
from .model import DEFAULT_DEVICE, DeviceSpec, Register, Violation

__all__ = [
    "Waveform",
    "PulseSequence",
    "sample_waveform",
    "build_local_sequence",
    "build_dmm_sequence",
    "build_global_sequence",
    "validate_sequence",
]

MODES = ("local", "dmm", "global")


@dataclass(frozen=True)
class Waveform:
    """Piecewise-linear waveform over [0, duration_ns].

    ``points`` are (time fraction, value) control points; fractions must be
    strictly increasing from 0.0 to 1.0.
    """

    duration_ns: float
    points: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        if not self.duration_ns > 0:
            raise ValueError("duration must be strictly positive")
        pts = tuple((float(f), float(v)) for f, v in self.points)
        if len(pts) < 2:
            raise ValueError("a waveform needs at least two control points")
        fracs = [f for f, _ in pts]
        if fracs[0] != 0.0 or fracs[-1] != 1.0:
            raise ValueError("control points must start at fraction 0 and end at 1")
        if any(b <= a for a, b in zip(fracs, fracs[1:])):
            raise ValueError("control-point fractions must be strictly increasing")
        if not all(math.isfinite(v) for _, v in pts):
            raise ValueError("waveform values must be finite")
        object.__setattr__(self, "points", pts)

    @classmethod
    def ramp(cls, duration_ns: float, start: float, end: float) -> "Waveform":
        return cls(duration_ns, ((0.0, start), (1.0, end)))

    @classmethod
    def evenly_spaced(cls, duration_ns: float, values: Sequence[float]) -> "Waveform":
        """Control values at evenly spaced fractions, first at 0, last at 1."""
        if len(values) < 2:
            raise ValueError("need at least two values")
        m = len(values) - 1
        return cls(
            duration_ns, tuple((i / m, float(v)) for i, v in enumerate(values))
        )

    @property
    def fractions(self) -> tuple[float, ...]:
        return tuple(f for f, _ in self.points)

    @property
    def values(self) -> tuple[float, ...]:
        return tuple(v for _, v in self.points)

    def sample(self, t_ns: float) -> float:
        return sample_waveform(self, t_ns)

    def max_abs(self) -> float:
        """Largest |value|; piecewise-linear extremes sit on control points."""
        return max(abs(v) for v in self.values)


def sample_waveform(waveform: Waveform, t_ns: float) -> float:
    """Linearly interpolated value at time ``t_ns`` (rad/us).

    Exact at control points; times outside [0, duration] are an error.
    """
    if not 0.0 <= t_ns <= waveform.duration_ns:
        raise ValueError(
            f"time {t_ns} ns outside [0, {waveform.duration_ns}] ns"
        )
    f = t_ns / waveform.duration_ns
    return float(np.interp(f, waveform.fractions, waveform.values))


@dataclass(frozen=True, eq=False)
class PulseSequence:
    """One shared Rabi waveform plus a mode-specific detuning layout.

    Every atom is covered by exactly one detuning assignment: its own
    waveform (``local``), the shared pair weighted by its epsilon (``dmm``)
    or the single shared waveform (``global``).  All waveforms share one
    duration.
    """

    mode: str
    register: Register
    omega: Waveform
    detuning_waveforms: tuple[Waveform, ...] | None = None
    delta: Waveform | None = None
    delta_dmm: Waveform | None = None
    epsilon: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"unknown sequence mode {self.mode!r}")
        n = self.register.n
        waveforms: list[Waveform] = [self.omega]
        if self.mode == "local":
            if self.detuning_waveforms is None or len(self.detuning_waveforms) != n:
                raise ValueError("local mode needs one detuning waveform per atom")
            if self.delta is not None or self.delta_dmm is not None:
                raise ValueError("local mode takes no shared detuning waveforms")
            waveforms += list(self.detuning_waveforms)
        elif self.mode == "dmm":
            if self.delta is None or self.delta_dmm is None:
                raise ValueError("dmm mode needs shared and modulator waveforms")
            if self.epsilon is None or len(self.epsilon) != n:
                raise ValueError("dmm mode needs one epsilon per atom")
            if self.detuning_waveforms is not None:
                raise ValueError("dmm mode takes no per-atom waveforms")
            if any(not 0.0 <= e <= 1.0 for e in self.epsilon):
                raise ValueError("epsilon values must lie in [0, 1]")
            waveforms += [self.delta, self.delta_dmm]
        else:  # global
            if self.delta is None:
                raise ValueError("global mode needs a shared detuning waveform")
            if self.detuning_waveforms is not None or self.delta_dmm is not None:
                raise ValueError("global mode takes only the shared waveform")
            waveforms.append(self.delta)
        durations = {w.duration_ns for w in waveforms}
        if len(durations) != 1:
            raise ValueError("all waveforms must share one duration")

    @property
    def duration_ns(self) -> float:
        return self.omega.duration_ns

    def rabi_at(self, t_ns: float) -> float:
        return sample_waveform(self.omega, t_ns)

    def detunings_at(self, t_ns: float) -> np.ndarray:
        """Effective detuning of every atom at time ``t_ns`` (rad/us)."""
        n = self.register.n
        if self.mode == "local":
            assert self.detuning_waveforms is not None
            return np.array(
                [sample_waveform(w, t_ns) for w in self.detuning_waveforms]
            )
        if self.mode == "dmm":
            assert self.delta is not None and self.delta_dmm is not None
            base = sample_waveform(self.delta, t_ns)
            mod = sample_waveform(self.delta_dmm, t_ns)
            eps = np.asarray(self.epsilon, dtype=float)
            return base + eps * mod
        assert self.delta is not None
        return np.full(n, sample_waveform(self.delta, t_ns))

    def breakpoints_ns(self) -> tuple[float, ...]:
        """Sorted union of all control-point times, in ns."""
        fracs: set[float] = set(self.omega.fractions)
        if self.detuning_waveforms is not None:
            for w in self.detuning_waveforms:
                fracs.update(w.fractions)
        for w in (self.delta, self.delta_dmm):
            if w is not None:
                fracs.update(w.fractions)
        return tuple(f * self.duration_ns for f in sorted(fracs))

    def to_json_dict(self) -> dict:
        def wf(w: Waveform) -> dict:
            return {"points": [[f, v] for f, v in w.points]}

        out: dict = {
            "mode": self.mode,
            "duration_ns": self.duration_ns,
            "omega": wf(self.omega),
        }
        if self.mode == "local":
            assert self.detuning_waveforms is not None
            out["detunings"] = [wf(w) for w in self.detuning_waveforms]
        elif self.mode == "dmm":
            assert self.delta is not None and self.delta_dmm is not None
            assert self.epsilon is not None
            out["delta"] = wf(self.delta)
            out["delta_dmm"] = wf(self.delta_dmm)
            out["epsilon"] = {
                label: e for label, e in zip(self.register.labels, self.epsilon)
            }
        else:
            assert self.delta is not None
            out["delta"] = wf(self.delta)
        return out


def _standard_omega(duration_ns: float, omega_max: float) -> Waveform:
    """Rabi ramp 0 -> omega_max -> 0 peaking at the sweep midpoint."""
    if not omega_max > 0:
        raise ValueError("omega_max must be strictly positive")
    return Waveform.evenly_spaced(duration_ns, (0.0, omega_max, 0.0))


def _raise_on_violations(seq: PulseSequence, device: DeviceSpec) -> PulseSequence:
    violations = validate_sequence(seq, device)
    if violations:
        raise ConstraintViolation(
            "; ".join(v.detail for v in violations)
        )
    return seq


def build_local_sequence(
    register: Register,
    plan: DetuningPlan,
    omega_max: float,
    duration_ns: float,
    device: DeviceSpec = DEFAULT_DEVICE,
) -> PulseSequence:
    """Per-atom sweeps -delta_i -> +delta_i under the shared Rabi ramp."""
    if plan.method not in ("baseline", "local"):
        raise ValueError("local sequences are built from baseline or local plans")
    if plan.n != register.n:
        raise ValueError("plan and register disagree on atom count")
    seq = PulseSequence(
        mode="local",
        register=register,
        omega=_standard_omega(duration_ns, omega_max),
        detuning_waveforms=tuple(
            Waveform.ramp(duration_ns, -d, d) for d in plan.detunings
        ),
    )
    return _raise_on_violations(seq, device)


def build_dmm_sequence(
    register: Register,
    plan: DetuningPlan,
    omega_max: float,
    duration_ns: float,
    device: DeviceSpec = DEFAULT_DEVICE,
) -> PulseSequence:
    """Shared sweep -delta_max -> +delta_max plus a 0 -> -delta_max modulator
    weighted per atom by the plan's epsilon."""
    if plan.epsilon is None:
        raise ValueError("dmm sequences need a plan with epsilon coefficients")
    if plan.n != register.n:
        raise ValueError("plan and register disagree on atom count")
    dmax = plan.delta_max
    if dmax <= 0.0:
        raise ValueError("dmm sequences need a strictly positive delta_max")
    delta = Waveform.ramp(duration_ns, -dmax, dmax)
    delta_dmm = Waveform.ramp(duration_ns, 0.0, -dmax)
    if max(delta_dmm.values) > 0.0:
        raise ConstraintViolation("the modulator waveform must stay <= 0")
    seq = PulseSequence(
        mode="dmm",
        register=register,
        omega=_standard_omega(duration_ns, omega_max),
        delta=delta,
        delta_dmm=delta_dmm,
        epsilon=plan.epsilon,
    )
    return _raise_on_violations(seq, device)


def build_global_sequence(
    register: Register,
    global_delta: float,
    omega_max: float,
    duration_ns: float,
    device: DeviceSpec = DEFAULT_DEVICE,
) -> PulseSequence:
    """One shared sweep -global_delta -> +global_delta for every atom."""
    if not global_delta > 0:
        raise ValueError("global_delta must be strictly positive")
    seq = PulseSequence(
        mode="global",
        register=register,
        omega=_standard_omega(duration_ns, omega_max),
        delta=Waveform.ramp(duration_ns, -global_delta, global_delta),
    )
    return _raise_on_violations(seq, device)


def validate_sequence(
    seq: PulseSequence, device: DeviceSpec = DEFAULT_DEVICE
) -> list[Violation]:
    """Check duration, Rabi and effective detuning extremes against limits.

    Effective per-atom detunings are piecewise-linear, so their extremes are
    evaluated exactly on the union of all control-point times.  Values
    exactly at a limit pass.
    """
    out: list[Violation] = []
    if seq.duration_ns > device.max_duration_ns:
        out.append(
            Violation(
                "max_duration",
                (),
                f"duration {seq.duration_ns} ns exceeds "
                f"{device.max_duration_ns} ns",
            )
        )
    peak = seq.omega.max_abs()
    if peak > device.max_rabi:
        out.append(
            Violation(
                "max_rabi",
                (),
                f"Rabi amplitude {peak:.6g} rad/us exceeds "
                f"{device.max_rabi} rad/us",
            )
        )
    times = seq.breakpoints_ns()
    eff = np.array([seq.detunings_at(t) for t in times])
    worst = np.abs(eff).max(axis=0)
    for i in np.flatnonzero(worst > device.max_abs_detuning):
        out.append(
            Violation(
                "max_abs_detuning",
                (int(i),),
                f"atom {i}: |detuning| reaches {worst[i]:.6g} rad/us, above "
                f"{device.max_abs_detuning} rad/us",
            )
        )
    return out
