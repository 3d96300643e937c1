"""Pipeline orchestration for scenario runs."""

from .run_workflow import RunWorkflow
from .run_pipeline import RunPipeline, RunResult, SweepResult

__all__ = ["RunWorkflow", "RunPipeline", "RunResult", "SweepResult"]
