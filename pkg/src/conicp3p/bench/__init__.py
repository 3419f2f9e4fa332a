"""Synthetic accuracy and timing benchmarks."""

from .metrics import COUNTER_NAMES, ErrorPair, TrialReport, classify_trial, error_metrics
from .runner import BenchConfig, run_benchmark, run_timing

__all__ = [
    "COUNTER_NAMES",
    "BenchConfig",
    "ErrorPair",
    "TrialReport",
    "classify_trial",
    "error_metrics",
    "run_benchmark",
    "run_timing",
]
