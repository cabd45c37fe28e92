"""Experiment pipeline: instance -> plan -> sweep -> samples -> metrics."""

from __future__ import annotations

import dataclasses
import time
import warnings as _warnings
from dataclasses import dataclass, field

from .detuning import (
    DMM_POLICIES,
    METHODS,
    DetuningPlan,
    GlobalFeasibility,
    InterpolationSpec,
    baseline_detunings,
    clamp_to_device,
    dmm_parameters,
    dmm_parameters_mwis,
    global_detuning,
    local_detunings_mis,
    local_detunings_mwis,
)
from .errors import PipelineError
from .instances import Instance, load_instance
from .model import (
    DEFAULT_DEVICE,
    DeviceSpec,
    ProblemGraph,
    Violation,
    interaction_matrix,
    validate_register,
)
from .oracle import SolveResult, is_independent_set, mis_exact, mwis_exact
from .schedule import (
    PulseSequence,
    build_dmm_sequence,
    build_global_sequence,
    build_local_sequence,
    validate_sequence,
)
from .simulate import OutcomeHistogram, StepPolicy, evolve, sample

__all__ = [
    "ExperimentConfig",
    "ExperimentReport",
    "ComparisonRow",
    "ComparisonTable",
    "active_set",
    "set_weight",
    "success_probability_mis",
    "success_probability_mwis",
    "optimality_ratio",
    "optimality_ratio_distinct",
    "run_experiment",
    "compare_methods",
]


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one solving run needs beyond the instance file itself.

    ``omega_max`` and ``duration_ns`` are fallbacks: values embedded in the
    instance file win, since they are part of the problem statement.  With
    ``hardware_fidelity`` set, sampling is capped at the 500-run submission
    limit.
    """

    instance: str
    method: str = "local"
    dmm_policy: str = "intent"
    tau: float = 0.9
    rho: float = 0.2
    omega_max: float = 12.0
    duration_ns: float = 6000.0
    shots: int = 1000
    seed: int = 0
    lo: float = 0.1
    hi: float = 0.9
    margin: float = 0.05
    dt_ns: float = 0.5
    hardware_fidelity: bool = False
    allow_invalid_register: bool = False

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.dmm_policy not in DMM_POLICIES:
            raise ValueError(f"unknown DMM policy {self.dmm_policy!r}")
        if self.shots < 1:
            raise ValueError("shots must be at least 1")

    def interpolation(self) -> InterpolationSpec:
        return InterpolationSpec(self.lo, self.hi)

    def to_json_dict(self) -> dict:
        return dataclasses.asdict(self)


def active_set(bitstring: str) -> frozenset[int]:
    """Atom indices measured in the Rydberg state (character '1')."""
    return frozenset(i for i, c in enumerate(bitstring) if c == "1")


def set_weight(graph: ProblemGraph, subset: frozenset[int]) -> float:
    if graph.weights is None:
        return float(len(subset))
    return float(sum(graph.weights[i] for i in subset))


def success_probability_mis(hist: OutcomeHistogram, oracle: SolveResult) -> float:
    """Fraction of shots landing on any maximum independent set.

    The oracle must have enumerated every optimum.
    """
    optima = set(oracle.optimal_sets)
    hit = sum(c for b, c in hist.counts.items() if active_set(b) in optima)
    return hit / hist.shots


def success_probability_mwis(
    hist: OutcomeHistogram, graph: ProblemGraph, oracle: SolveResult
) -> float:
    """Fraction of shots forming an independent set of exactly optimal weight
    (1e-9 relative tolerance)."""
    opt = oracle.optimum_value
    hit = 0
    for b, c in hist.counts.items():
        s = active_set(b)
        if not is_independent_set(graph, s):
            continue
        if abs(set_weight(graph, s) - opt) <= 1e-9 * max(1.0, abs(opt)):
            hit += c
    return hit / hist.shots


def _ratio_terms(
    hist: OutcomeHistogram, graph: ProblemGraph, oracle: SolveResult
) -> list[tuple[int, float]]:
    opt = oracle.optimum_value
    out = []
    for b, c in hist.counts.items():
        s = active_set(b)
        if is_independent_set(graph, s):
            out.append((c, set_weight(graph, s) / opt))
    return out


def optimality_ratio(
    hist: OutcomeHistogram, graph: ProblemGraph, oracle: SolveResult
) -> float | None:
    """Frequency-weighted mean of weight/optimum over valid-set shots.

    Shots that violate an edge are excluded entirely; with no valid shot at
    all the ratio is undefined (None).
    """
    terms = _ratio_terms(hist, graph, oracle)
    total = sum(c for c, _ in terms)
    if total == 0:
        return None
    return sum(c * r for c, r in terms) / total


def optimality_ratio_distinct(
    hist: OutcomeHistogram, graph: ProblemGraph, oracle: SolveResult
) -> float | None:
    """Unweighted mean of weight/optimum over distinct valid bitstrings."""
    terms = _ratio_terms(hist, graph, oracle)
    if not terms:
        return None
    return sum(r for _, r in terms) / len(terms)


@dataclass
class ExperimentReport:
    """Everything one run produced; see ``to_json_dict`` for the file form."""

    config: ExperimentConfig
    effective_omega: float
    effective_duration_ns: float
    plan: DetuningPlan
    validation: list[Violation]
    oracle: SolveResult
    weighted: bool
    feasibility: GlobalFeasibility | None = None
    histogram: OutcomeHistogram | None = None
    success_probability: float | None = None
    opt_ratio: float | None = None
    opt_ratio_distinct: float | None = None
    top_outcomes: list[dict] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    timing: dict = field(default_factory=dict)

    def to_json_dict(self, histogram_file: str | None = None) -> dict:
        cfg = self.config.to_json_dict()
        cfg["effective_omega"] = self.effective_omega
        cfg["effective_duration_ns"] = self.effective_duration_ns
        metrics: dict = {
            "success_probability": self.success_probability,
            "optimality_ratio": self.opt_ratio,
            "optimality_ratio_distinct": self.opt_ratio_distinct,
        }
        out = {
            "config": cfg,
            "plan": self.plan.to_json_dict(),
            "validation": [v.to_json_dict() for v in self.validation],
            "histogram_file": histogram_file,
            "oracle": self.oracle.to_json_dict(),
            "metrics": metrics,
            "top_outcomes": self.top_outcomes,
            "warnings": list(self.warnings),
            "timing": self.timing,
        }
        if self.feasibility is not None:
            out["feasibility"] = self.feasibility.to_json_dict()
        return out


def _top_outcomes(
    hist: OutcomeHistogram,
    graph: ProblemGraph,
    oracle: SolveResult,
    weighted: bool,
    k: int = 10,
) -> list[dict]:
    optima = set(oracle.optimal_sets)
    rows = []
    for b, c, p in hist.top(k):
        s = active_set(b)
        indep = is_independent_set(graph, s)
        w = set_weight(graph, s)
        if weighted:
            optimal = indep and abs(w - oracle.optimum_value) <= 1e-9 * max(
                1.0, abs(oracle.optimum_value)
            )
        else:
            optimal = s in optima
        rows.append(
            {
                "bitstring": b,
                "count": c,
                "frequency": p,
                "independent": indep,
                "weight": w,
                "optimal": optimal,
            }
        )
    return rows


def _build_plan(
    config: ExperimentConfig,
    inst: Instance,
    V,
    device: DeviceSpec,
) -> tuple[DetuningPlan, list[str]]:
    graph = inst.graph
    weighted = graph.weights is not None
    if config.method == "baseline":
        if weighted:
            raise ValueError(
                "the baseline method has no weighted variant; use local or dmm"
            )
        plan = baseline_detunings(V, graph, config.margin)
    elif weighted:
        plan = local_detunings_mwis(V, graph, config.interpolation())
    else:
        plan = local_detunings_mis(V, graph, config.tau)
    plan, warns = clamp_to_device(plan, device)
    if config.method == "dmm":
        if weighted:
            plan = dmm_parameters_mwis(
                plan, graph.weights, config.interpolation(), config.dmm_policy
            )
        else:
            plan = dmm_parameters(plan, config.dmm_policy)
    return plan, warns


def run_experiment(
    config: ExperimentConfig, device: DeviceSpec = DEFAULT_DEVICE
) -> ExperimentReport:
    """Run the full pipeline for one method on one instance.

    Deterministic for a fixed config and seed (timing fields aside).  A
    global-method run whose plan spread exceeds rho stops before simulating:
    the report carries the feasibility verdict instead of a histogram.
    Errors from any stage are re-raised as PipelineError naming the stage.
    """
    t_start = time.perf_counter()
    timing: dict = {}

    def stage(name: str):
        class _Ctx:
            def __enter__(self):
                self.t0 = time.perf_counter()

            def __exit__(self, exc_type, exc, tb):
                timing[name] = time.perf_counter() - self.t0
                if exc is not None and not isinstance(exc, PipelineError):
                    raise PipelineError(name, exc) from exc

        return _Ctx()

    with stage("load"):
        inst = load_instance(config.instance, device, config.omega_max)
        device = inst.device_for(device)
        graph = inst.graph
        weighted = graph.weights is not None
        omega_max = inst.omega if inst.omega is not None else config.omega_max
        duration = (
            inst.duration_ns if inst.duration_ns is not None else config.duration_ns
        )

    with stage("validate-register"):
        violations = validate_register(inst.register, device)
        if violations and not config.allow_invalid_register:
            raise ValueError(
                "register violates device constraints: "
                + "; ".join(v.detail for v in violations)
            )

    with stage("oracle"):
        oracle = mwis_exact(graph) if weighted else mis_exact(graph)

    with stage("detuning"):
        if config.method == "global" and weighted:
            raise ValueError(
                "the global method has no weighted variant; use local or dmm"
            )
        V = interaction_matrix(inst.register, device)
        plan, clamp_warns = _build_plan(config, inst, V, device)

    report = ExperimentReport(
        config=config,
        effective_omega=omega_max,
        effective_duration_ns=duration,
        plan=plan,
        validation=violations,
        oracle=oracle,
        weighted=weighted,
        warnings=list(clamp_warns),
        timing=timing,
    )

    feas: GlobalFeasibility | None = None
    if config.method == "global":
        with stage("global-feasibility"):
            feas = global_detuning(plan, config.rho)
            report.plan = dataclasses.replace(
                plan, method="global", global_delta=feas.delta, rho=config.rho
            )
            report.feasibility = feas
        if not feas.feasible:
            timing["total"] = time.perf_counter() - t_start
            return report

    with stage("schedule"):
        if config.method == "global":
            assert feas is not None and feas.delta is not None
            seq = build_global_sequence(
                inst.register, feas.delta, omega_max, duration, device
            )
        elif config.method == "dmm":
            seq = build_dmm_sequence(inst.register, plan, omega_max, duration, device)
        else:
            seq = build_local_sequence(
                inst.register, plan, omega_max, duration, device
            )
        report.validation = report.validation + validate_sequence(seq, device)

    with stage("evolve"):
        policy = StepPolicy(dt_ns=config.dt_ns)
        psi = evolve(seq, V, policy=policy)

    with stage("sample"):
        shots = config.shots
        if config.hardware_fidelity and shots > device.max_runs:
            report.warnings.append(
                f"hardware fidelity: shots capped at {device.max_runs}"
            )
            shots = device.max_runs
        with _warnings.catch_warnings(record=True) as caught:
            _warnings.simplefilter("always")
            hist = sample(psi, shots, config.seed)
        report.warnings += [str(w.message) for w in caught]
        report.histogram = hist

    with stage("metrics"):
        if weighted:
            report.success_probability = success_probability_mwis(
                hist, graph, oracle
            )
        else:
            report.success_probability = success_probability_mis(hist, oracle)
        report.opt_ratio = optimality_ratio(hist, graph, oracle)
        report.opt_ratio_distinct = optimality_ratio_distinct(hist, graph, oracle)
        report.top_outcomes = _top_outcomes(hist, graph, oracle, weighted)

    timing["total"] = time.perf_counter() - t_start
    return report


@dataclass
class ComparisonRow:
    method: str
    status: str  # ok | infeasible | error
    success_probability: float | None = None
    opt_ratio: float | None = None
    detail: str = ""
    report: ExperimentReport | None = None

    def to_json_dict(self) -> dict:
        return {
            "method": self.method,
            "status": self.status,
            "success_probability": self.success_probability,
            "optimality_ratio": self.opt_ratio,
            "detail": self.detail,
        }


@dataclass
class ComparisonTable:
    instance: str
    rows: list[ComparisonRow]

    def to_json_dict(self) -> dict:
        return {
            "instance": self.instance,
            "rows": [r.to_json_dict() for r in self.rows],
        }

    def to_text(self) -> str:
        lines = [f"instance: {self.instance}"]
        lines.append(f"{'method':10} {'status':12} {'success':>8} {'ratio':>8}")
        for r in self.rows:
            sp = "-" if r.success_probability is None else f"{r.success_probability:.3f}"
            orat = "-" if r.opt_ratio is None else f"{r.opt_ratio:.3f}"
            lines.append(f"{r.method:10} {r.status:12} {sp:>8} {orat:>8}")
        return "\n".join(lines)


def compare_methods(
    config: ExperimentConfig,
    methods: tuple[str, ...] | None = None,
    device: DeviceSpec = DEFAULT_DEVICE,
) -> ComparisonTable:
    """Run several methods on one instance with a shared seed.

    Weighted instances default to the two methods that support weights.
    Per-method failures and global-method infeasibility land in their row
    instead of aborting the table; rows keep the requested order.
    """
    inst = load_instance(config.instance, device, config.omega_max)
    if methods is None:
        methods = (
            ("local", "dmm") if inst.is_weighted
            else ("local", "dmm", "global", "baseline")
        )
    rows: list[ComparisonRow] = []
    for m in methods:
        cfg = dataclasses.replace(config, method=m)
        try:
            rep = run_experiment(cfg, device)
        except PipelineError as exc:
            rows.append(
                ComparisonRow(method=m, status="error", detail=str(exc))
            )
            continue
        if rep.feasibility is not None and not rep.feasibility.feasible:
            assert rep.feasibility.worst_pair is not None
            i, j = rep.feasibility.worst_pair
            rows.append(
                ComparisonRow(
                    method=m,
                    status="infeasible",
                    detail=(
                        f"detuning spread {rep.feasibility.spread:.4f} exceeds "
                        f"rho={rep.feasibility.rho} (worst pair: atoms {i}, {j})"
                    ),
                    report=rep,
                )
            )
            continue
        rows.append(
            ComparisonRow(
                method=m,
                status="ok",
                success_probability=rep.success_probability,
                opt_ratio=rep.opt_ratio,
                report=rep,
            )
        )
    return ComparisonTable(instance=str(config.instance), rows=rows)
