"""Emulator and schedule compiler for solving maximum (weighted) independent
set problems on neutral-atom Rydberg arrays.

The pipeline: a problem instance (atom positions, optionally an explicit
graph and vertex weights) is turned into per-atom detuning targets, compiled
into adiabatic pulse sequences, evolved under the full interacting
Hamiltonian, sampled, and scored against exact classical oracles.
"""

from .analysis import (
    ComparisonRow,
    ComparisonTable,
    ExperimentConfig,
    ExperimentReport,
    compare_methods,
    optimality_ratio,
    optimality_ratio_distinct,
    run_experiment,
    success_probability_mis,
    success_probability_mwis,
)
from .detuning import (
    DetuningPlan,
    GlobalFeasibility,
    InterpolationSpec,
    baseline_detunings,
    clamp_to_device,
    dmm_parameters,
    dmm_parameters_mwis,
    force_node,
    global_detuning,
    linear_interpolate,
    local_detunings_mis,
    local_detunings_mwis,
    unforce_node,
)
from .errors import (
    CapacityError,
    ConstraintViolation,
    DegenerateGeometryError,
    DegeneratePlanError,
    HardwareFidelityWarning,
    PipelineError,
)
from .instances import (
    Instance,
    generate_instance,
    instance_from_dict,
    instance_to_dict,
    load_instance,
    save_instance,
    six_node_demo,
    unconnected_star,
    uneven_pairs,
)
from .model import (
    DEFAULT_DEVICE,
    DeviceSpec,
    InteractionMatrix,
    ProblemGraph,
    Register,
    Violation,
    blockade_radius,
    derive_graph,
    interaction_matrix,
    validate_register,
)
from .oracle import (
    SolveResult,
    is_independent_set,
    mis_exact,
    mwis_exact,
    qubo_cost,
)
from .schedule import (
    PulseSequence,
    Waveform,
    build_dmm_sequence,
    build_global_sequence,
    build_local_sequence,
    sample_waveform,
    validate_sequence,
)
from .simulate import (
    OutcomeHistogram,
    StateVector,
    StepPolicy,
    evolve,
    exact_distribution,
    hamiltonian_action,
    sample,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # model
    "DEFAULT_DEVICE",
    "DeviceSpec",
    "Register",
    "InteractionMatrix",
    "ProblemGraph",
    "Violation",
    "blockade_radius",
    "interaction_matrix",
    "derive_graph",
    "validate_register",
    # detuning
    "DetuningPlan",
    "GlobalFeasibility",
    "InterpolationSpec",
    "baseline_detunings",
    "local_detunings_mis",
    "local_detunings_mwis",
    "linear_interpolate",
    "force_node",
    "unforce_node",
    "dmm_parameters",
    "dmm_parameters_mwis",
    "global_detuning",
    "clamp_to_device",
    # schedule
    "Waveform",
    "PulseSequence",
    "sample_waveform",
    "build_local_sequence",
    "build_dmm_sequence",
    "build_global_sequence",
    "validate_sequence",
    # simulate
    "StepPolicy",
    "StateVector",
    "OutcomeHistogram",
    "hamiltonian_action",
    "evolve",
    "exact_distribution",
    "sample",
    # oracle
    "SolveResult",
    "is_independent_set",
    "mis_exact",
    "mwis_exact",
    "qubo_cost",
    # instances
    "Instance",
    "instance_from_dict",
    "instance_to_dict",
    "load_instance",
    "save_instance",
    "six_node_demo",
    "unconnected_star",
    "uneven_pairs",
    "generate_instance",
    # analysis
    "ExperimentConfig",
    "ExperimentReport",
    "ComparisonRow",
    "ComparisonTable",
    "run_experiment",
    "compare_methods",
    "success_probability_mis",
    "success_probability_mwis",
    "optimality_ratio",
    "optimality_ratio_distinct",
    # errors
    "CapacityError",
    "ConstraintViolation",
    "DegenerateGeometryError",
    "DegeneratePlanError",
    "PipelineError",
    "HardwareFidelityWarning",
]
