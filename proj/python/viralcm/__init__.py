"""Influence propagation on the enhanced configuration model.

Thin wrapper around the compiled extension; the main operations live in
``viralcm._core`` and are re-exported here.
"""

from viralcm._core import (
    BigWindow,
    ComponentReport,
    ConfigError,
    Criticality,
    CriticalityReport,
    DegreeSequence,
    DeviationPair,
    Digraph,
    Direction,
    DualityReport,
    EnhancedMultigraph,
    ExactSummary,
    ExplorationTrace,
    FluidDeviation,
    JointDegreeDistribution,
    MomentSummary,
    MultigraphStats,
    NoSignChange,
    NotSupercritical,
    TheoryPrediction,
    TooLarge,
    backward_set,
    big_window,
    branching_extinction,
    classify,
    duality_stats,
    enumerate_matchings,
    fluid_deviation,
    forward_set,
    gw_survival,
    predict,
    run_experiment,
    run_forward,
    run_reverse,
    sample_degree_sequence,
    solve_xi,
    solve_xi_bar,
    tautology_check,
    uniform_matching,
    uniqueness_probe,
)

__all__ = [
    "BigWindow",
    "ComponentReport",
    "ConfigError",
    "Criticality",
    "CriticalityReport",
    "DegreeSequence",
    "DeviationPair",
    "Digraph",
    "Direction",
    "DualityReport",
    "EnhancedMultigraph",
    "ExactSummary",
    "ExplorationTrace",
    "FluidDeviation",
    "JointDegreeDistribution",
    "MomentSummary",
    "MultigraphStats",
    "NoSignChange",
    "NotSupercritical",
    "TheoryPrediction",
    "TooLarge",
    "backward_set",
    "big_window",
    "branching_extinction",
    "classify",
    "duality_stats",
    "enumerate_matchings",
    "fluid_deviation",
    "forward_set",
    "gw_survival",
    "predict",
    "run_experiment",
    "run_forward",
    "run_reverse",
    "sample_degree_sequence",
    "solve_xi",
    "solve_xi_bar",
    "tautology_check",
    "uniform_matching",
    "uniqueness_probe",
]
