"""Sampling oracles: distances, MSCQ probing, witness sequences, penalties."""
from .distance import FloatDistance, distance_to_gamma, gamma_distance_function
from .probe import (BOUNDED, DIVERGENCE_SUSPECTED, INCONCLUSIVE, PenaltyReport, ProbeConfig,
                    ProbeResult, feasible_distance_estimate, mpcc_penalty_closed_form, mscq_probe,
                    penalty_probe)
from .witness import SearchConfig, WitnessSequence, reverify, witness_search

__all__ = [
    "FloatDistance", "distance_to_gamma", "gamma_distance_function",
    "BOUNDED", "DIVERGENCE_SUSPECTED", "INCONCLUSIVE", "PenaltyReport", "ProbeConfig", "ProbeResult",
    "feasible_distance_estimate", "mpcc_penalty_closed_form", "mscq_probe", "penalty_probe",
    "SearchConfig", "WitnessSequence", "reverify", "witness_search",
]
