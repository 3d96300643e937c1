"""Orchestrator for scenario runs and penetration sweeps."""

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from .run_workflow import RunWorkflow
from ..errors import ValidationError
from ..models.margin import Envelope, FlexIndices
from ..models.profiles import Profiles
from ..models.run_report import RunReport
from ..models.scenario_spec import ScenarioSpec
from ..models.trace import DispatchTrace
from ..services import plot_service
from ..services.flexibility import (
    build_envelope,
    compute_indices,
    summarize_envelope,
    write_envelope_csv,
)
from ..services.mpc_service import BlockDispatcher
from ..services.profile_service import PENETRATION_SOURCES
from ..services.qp_solver import QpSolver
from ..services.scenario_service import build_block, build_mpc_config, resolve_profiles, unit_models
from ..services.units import validate_unit

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = ["ratio", "e_ir", "e_io", "e_ic", "abandonment", "status"]


@dataclass
class RunResult:
    """Complete result of one scenario run."""

    name: str
    status: str = "new"
    spec: Optional[ScenarioSpec] = None
    profiles: Optional[Profiles] = None
    trace: Optional[DispatchTrace] = None
    envelope: Optional[Envelope] = None
    indices: Optional[FlexIndices] = None
    report: Optional[RunReport] = None
    error: Optional[BaseException] = None
    errors: List[str] = field(default_factory=list)
    started_at: datetime = field(default_factory=datetime.now)
    completed_at: Optional[datetime] = None

    @property
    def is_successful(self) -> bool:
        return self.status == "completed"

    @property
    def is_failed(self) -> bool:
        return self.status == "failed"

    def to_dict(self) -> dict:
        """Convert run result to dictionary."""
        return {
            "name": self.name,
            "status": self.status,
            "is_successful": self.is_successful,
            "report": self.report.to_dict() if self.report else None,
            "errors": self.errors,
            "started_at": self.started_at.isoformat(),
            "completed_at": self.completed_at.isoformat() if self.completed_at else None,
        }


@dataclass
class SweepResult:
    """Per-ratio runs of a penetration sweep."""

    ratios: List[float]
    runs: List[RunResult]
    table: pd.DataFrame
    artifacts: Dict[str, Path] = field(default_factory=dict)

    @property
    def failed(self) -> List[RunResult]:
        return [run for run in self.runs if run.is_failed]


class RunPipeline:
    """
    Orchestrates scenario runs.

    Each run goes through four stages:
    1. Load: validate units, build the block and controller, resolve profiles
    2. Dispatch: receding-horizon MPC over the run length
    3. Evaluate: flexibility envelope and insufficiency indices
    4. Report: trace.csv, envelope.csv, indices.json, report.json, SVGs

    The workflow state machine tracks progress; a failing stage moves it
    to `failed` and the exception is re-raised to the caller.
    """

    def __init__(self, solver: Optional[QpSolver] = None):
        """
        Initialize the pipeline.

        Args:
            solver: QP back end shared by all runs (default: active set per run)
        """
        self.solver = solver

    def process_scenario(
        self,
        spec: ScenarioSpec,
        out_dir: str | Path,
        plots: bool = True,
        forecast: Optional[str] = None,
    ) -> RunResult:
        """
        Run one scenario end to end.

        Args:
            spec: Scenario to run
            out_dir: Directory receiving the artifacts
            plots: Whether to write the SVG charts
            forecast: Override of the scenario's forecast mode

        Returns:
            RunResult in state `completed`

        Raises:
            Whatever the failing stage raised, after the run is marked failed
        """
        if forecast:
            spec = spec.with_forecast(forecast)
        out_dir = Path(out_dir)
        result = RunResult(name=spec.name, spec=spec)
        workflow = RunWorkflow(model=result)

        try:
            block, cfg = self._stage_load(result, workflow)
            self._stage_dispatch(result, workflow, block, cfg)
            self._stage_evaluate(result, workflow)
            self._stage_report(result, workflow, out_dir, plots)
            workflow.finalize()
        except Exception as e:
            error_msg = f"{type(e).__name__}: {e}"
            result.errors.append(error_msg)
            result.error = e
            workflow.mark_failed(error=error_msg)
            logger.error(f"Run failed for {spec.name}: {error_msg}")
            logger.debug("Run failure traceback", exc_info=True)
            raise
        finally:
            result.completed_at = datetime.now()

        return result

    def _stage_load(self, result: RunResult, workflow: RunWorkflow):
        workflow.start_load()
        spec = result.spec
        violations = [message for model in unit_models(spec) for message in validate_unit(model)]
        if violations:
            raise ValidationError("unit_model", "; ".join(violations))
        block = build_block(spec)
        cfg = build_mpc_config(spec)
        result.profiles = resolve_profiles(spec)
        workflow.complete_load()
        return block, cfg

    def _stage_dispatch(self, result: RunResult, workflow: RunWorkflow, block, cfg) -> None:
        workflow.start_dispatch()
        dispatcher = BlockDispatcher(block, cfg, solver=self.solver)
        result.trace = dispatcher.run(result.profiles, n_steps=result.spec.n_steps)
        workflow.complete_dispatch()

    def _stage_evaluate(self, result: RunResult, workflow: RunWorkflow) -> None:
        workflow.start_evaluate()
        trace = result.trace
        result.envelope = build_envelope(trace, trace.net_load_mw, trace.dt_h)
        result.indices = compute_indices(trace, trace.net_load_mw, trace.dt_h)
        workflow.complete_evaluate()

    def _stage_report(self, result: RunResult, workflow: RunWorkflow, out_dir: Path, plots: bool) -> None:
        workflow.start_report()
        out_dir.mkdir(parents=True, exist_ok=True)
        trace = result.trace

        artifacts = {
            "trace": trace.write_csv(out_dir / "trace.csv"),
            "envelope": write_envelope_csv(result.envelope, out_dir / "envelope.csv"),
        }
        indices_path = out_dir / "indices.json"
        indices_path.write_text(json.dumps(result.indices.to_dict(), indent=2) + "\n", encoding="utf-8")
        artifacts["indices"] = indices_path

        if plots:
            artifacts["dispatch_plot"] = plot_service.plot_dispatch(trace, out_dir / "dispatch.svg")
            artifacts["envelope_plot"] = plot_service.plot_envelope(result.envelope, out_dir / "envelope.svg")

        report = RunReport(
            scenario=result.spec.name,
            indices=result.indices,
            max_shortfalls=summarize_envelope(result.envelope),
            curtailed_mwh=float(trace.spill_mwh.sum()),
            shed_mwh=float(trace.shed_mw.sum() * trace.dt_h),
            dumped_mwh=float(trace.dump_mw.sum() * trace.dt_h),
            h2_unserved_mwh=float(trace.h2_unserved_mwh.sum()),
            flagged_steps=int(trace.flagged.sum()),
            artifacts=artifacts,
        )
        report_path = out_dir / "report.json"
        report.artifacts["report"] = report_path
        report_path.write_text(json.dumps(report.to_dict(), indent=2) + "\n", encoding="utf-8")
        result.report = report

    def sweep(
        self,
        spec: ScenarioSpec,
        ratios: Sequence[float],
        out_dir: str | Path,
        jobs: int = 1,
        sources: Sequence[str] = PENETRATION_SOURCES,
        plots: bool = True,
    ) -> SweepResult:
        """
        Run one scenario per penetration ratio.

        Runs are independent and execute on up to `jobs` threads, each in
        its own `ratio_<r>` subdirectory. A failed ratio keeps its row in
        sweep.csv with NaN indices and the error as status.

        Args:
            spec: Base scenario
            ratios: Added renewable access per run, each >= 0
            out_dir: Sweep directory
            jobs: Concurrent runs
            sources: Renewable sources the ratio applies to
            plots: Whether to write abandonment.svg

        Returns:
            SweepResult with the per-ratio table
        """
        ratios = [float(r) for r in ratios]
        if not ratios:
            raise ValidationError("ratios", "at least one ratio is required")
        if any(r < 0 for r in ratios):
            raise ValidationError("ratios", "ratios must be >= 0")

        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        logger.info(f"Sweeping {spec.name} over {len(ratios)} ratios with {jobs} job(s)")

        def run_one(ratio: float) -> RunResult:
            scaled = spec.with_penetration(ratio, tuple(sources))
            try:
                return self.process_scenario(scaled, out_dir / f"ratio_{ratio:g}", plots=False)
            except Exception as e:
                logger.warning(f"Ratio {ratio:g} failed: {e}")
                return RunResult(name=scaled.name, status="failed", spec=scaled, error=e, errors=[str(e)])

        with ThreadPoolExecutor(max_workers=max(1, jobs)) as pool:
            runs = list(pool.map(run_one, ratios))

        rows = []
        for ratio, run in zip(ratios, runs):
            if run.is_successful:
                idx = run.indices
                rows.append([ratio, idx.e_ir, idx.e_io, idx.e_ic, idx.abandonment, "ok"])
            else:
                rows.append([ratio, np.nan, np.nan, np.nan, np.nan, f"failed: {run.errors[-1]}"])
        table = pd.DataFrame(rows, columns=SWEEP_COLUMNS)

        sweep_path = out_dir / "sweep.csv"
        table.to_csv(sweep_path, index=False, lineterminator="\n")
        artifacts = {"sweep": sweep_path}
        if plots:
            artifacts["abandonment_plot"] = plot_service.plot_abandonment(
                table["ratio"], table["abandonment"], out_dir / "abandonment.svg"
            )

        failed = sum(not run.is_successful for run in runs)
        logger.info(f"Sweep finished: {len(runs) - failed} ok, {failed} failed")
        return SweepResult(ratios=ratios, runs=runs, table=table, artifacts=artifacts)
