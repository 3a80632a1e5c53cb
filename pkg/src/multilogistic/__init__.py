"""Decompose S-shaped time series into sums of logistic waves.

The pipeline takes central second differences of a series, builds a
scalogram against second-order logistic wavelets, reads logistic waves off
its extrema, and optionally refines the resulting multilogistic model under
a minimax objective.
"""

from multilogistic.scurve import (
    GompertzParams,
    LogisticWave,
    MultilogisticModel,
    SampledSeries,
    gompertz_eval,
    logistic_eval,
    multilogistic_eval,
    sample_curve,
)
from multilogistic.logwavelet import ChildWaveletParams, child_psi2, mother_psi2
from multilogistic.diffcwt import DiffSeries, Scalogram, central_diff, cwt_index, scalogram
from multilogistic.extract import DecompositionConfig, decompose
from multilogistic.refine import FitReport, RefineConfig, fit_metrics, refine

__version__ = "0.1.0"

__all__ = [
    "GompertzParams",
    "LogisticWave",
    "MultilogisticModel",
    "SampledSeries",
    "gompertz_eval",
    "logistic_eval",
    "multilogistic_eval",
    "sample_curve",
    "ChildWaveletParams",
    "child_psi2",
    "mother_psi2",
    "DiffSeries",
    "Scalogram",
    "central_diff",
    "cwt_index",
    "scalogram",
    "DecompositionConfig",
    "decompose",
    "FitReport",
    "RefineConfig",
    "fit_metrics",
    "refine",
]
