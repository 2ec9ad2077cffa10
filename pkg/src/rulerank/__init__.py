"""Compare, rank, and select treatment rules under bounded unmeasured confounding."""

__version__ = "0.1.0"

from .core import (
    ComparisonFrame,
    PairedSample,
    SensitivityParams,
    build_comparison_frame,
    gamma_to_kappa,
    kappa_to_gamma,
)
from .dominance import TestResult, adjusted_differences, studentized_statistic, test_dominance
from .order import HasseDiagram, OrderSet, hasse_edges, leaves, to_dot, transitive_closure
from .selection import (
    Hypothesis,
    SelectionPlan,
    SelectionResult,
    bonferroni_test,
    control_family,
    fixed_sequence_test,
    order_hypotheses,
    pairwise_family,
    prune_for_max,
    run_selection,
    select_maximal,
    select_positive,
    split_sample,
)
from .sensitivity import (
    AsymptoticParams,
    MomentSummary,
    SensitivityValue,
    amplify,
    approx_power,
    asymptotic_params,
    moment_summary,
    sensitivity_value,
)
from .simulate import (
    MetricsCell,
    MetricsTable,
    SimulationScenario,
    generate_replicate,
    load_scenario,
    run_scenario,
)

__all__ = [
    "__version__",
    "ComparisonFrame",
    "PairedSample",
    "SensitivityParams",
    "build_comparison_frame",
    "gamma_to_kappa",
    "kappa_to_gamma",
    "TestResult",
    "adjusted_differences",
    "studentized_statistic",
    "test_dominance",
    "HasseDiagram",
    "OrderSet",
    "hasse_edges",
    "leaves",
    "to_dot",
    "transitive_closure",
    "Hypothesis",
    "SelectionPlan",
    "SelectionResult",
    "bonferroni_test",
    "control_family",
    "fixed_sequence_test",
    "order_hypotheses",
    "pairwise_family",
    "prune_for_max",
    "run_selection",
    "select_maximal",
    "select_positive",
    "split_sample",
    "AsymptoticParams",
    "MomentSummary",
    "SensitivityValue",
    "amplify",
    "approx_power",
    "asymptotic_params",
    "moment_summary",
    "sensitivity_value",
    "MetricsCell",
    "MetricsTable",
    "SimulationScenario",
    "generate_replicate",
    "load_scenario",
    "run_scenario",
]
