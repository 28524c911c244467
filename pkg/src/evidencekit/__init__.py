"""Frequentist, likelihood and relative belief measures of statistical evidence
for the normal location model, with prior-predictive bias diagnostics."""

from .freq import LocationNormalData, confidence_interval, pvalue_location_normal, two_stage_rejection_prob
from .eprocess import EProcessState, e_value_power, simulate_sequential_type1
from .intervals import IntervalSet
from .kernel import MonteCarloEstimate, NormalParams
from .likelihood import integrated_likelihood_abs, profile_likelihood_abs
from .relbelief import (
    BayesInferenceBase,
    EvidenceGrid,
    EvidenceReport,
    Target,
    bayes_factor,
    build_grid,
    evidence_report,
    jeffreys_label,
    urn_evidence,
)
from .bias import BiasReport, bias_against_H, bias_E, bias_in_favor_H, bias_report, lindley_sweep

__version__ = "0.1.0"

__all__ = [
    "BayesInferenceBase",
    "BiasReport",
    "EProcessState",
    "EvidenceGrid",
    "EvidenceReport",
    "IntervalSet",
    "LocationNormalData",
    "MonteCarloEstimate",
    "NormalParams",
    "Target",
    "bayes_factor",
    "bias_E",
    "bias_against_H",
    "bias_in_favor_H",
    "bias_report",
    "build_grid",
    "confidence_interval",
    "e_value_power",
    "evidence_report",
    "integrated_likelihood_abs",
    "jeffreys_label",
    "lindley_sweep",
    "profile_likelihood_abs",
    "pvalue_location_normal",
    "simulate_sequential_type1",
    "two_stage_rejection_prob",
    "urn_evidence",
]
