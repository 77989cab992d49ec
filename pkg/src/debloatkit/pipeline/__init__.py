"""Batch experiments: config loading, the per-sample pipeline and reports."""

from .config import ExperimentConfig, Options, OutputSpec, SampleSpec
from .report import COLUMNS, aggregate, emit_report, read_csv_report
from .runner import SampleResult, describe_plans, make_scanner, process_sample, run_experiment, run_samples

__all__ = [
    "COLUMNS", "ExperimentConfig", "Options", "OutputSpec", "SampleResult", "SampleSpec",
    "aggregate", "describe_plans", "emit_report", "make_scanner", "process_sample",
    "read_csv_report", "run_experiment", "run_samples",
]
