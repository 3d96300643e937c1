"""State machine for a scenario run."""

import logging
from typing import Optional

from statemachine import State, StateMachine

logger = logging.getLogger(__name__)


class RunWorkflow(StateMachine):
    """
    Lifecycle of one scenario run.

    load → dispatch → evaluate → report. A run that raises in any stage
    ends in `failed`; the model's `status` field mirrors the current state.
    """

    new = State(initial=True, value="new")
    loading = State(value="loading")
    loaded = State(value="loaded")
    dispatching = State(value="dispatching")
    dispatched = State(value="dispatched")
    evaluating = State(value="evaluating")
    evaluated = State(value="evaluated")
    reporting = State(value="reporting")
    completed = State(final=True, value="completed")
    failed = State(final=True, value="failed")

    start_load = new.to(loading)
    complete_load = loading.to(loaded)

    start_dispatch = loaded.to(dispatching)
    complete_dispatch = dispatching.to(dispatched)

    start_evaluate = dispatched.to(evaluating)
    complete_evaluate = evaluating.to(evaluated)

    start_report = evaluated.to(reporting)
    finalize = reporting.to(completed)

    mark_failed = (
        new.to(failed)
        | loading.to(failed)
        | loaded.to(failed)
        | dispatching.to(failed)
        | dispatched.to(failed)
        | evaluating.to(failed)
        | evaluated.to(failed)
        | reporting.to(failed)
    )

    def __init__(self, model=None, state_field="status", start_value=None):
        """
        Initialize the workflow.

        Args:
            model: Object whose `state_field` tracks the run state (optional)
            state_field: Field name on model to sync state to
            start_value: Initial state value (optional)
        """
        self.model = model
        super().__init__(model=model, state_field=state_field, start_value=start_value)

    def on_enter_loading(self):
        logger.info(f"Loading scenario {self._run_name()}")

    def on_enter_loaded(self):
        logger.info(f"Scenario {self._run_name()} loaded")

    def on_enter_dispatching(self):
        logger.info(f"Dispatching {self._run_name()}")

    def on_enter_dispatched(self):
        logger.info(f"Dispatch finished for {self._run_name()}")

    def on_enter_evaluating(self):
        logger.info(f"Evaluating flexibility of {self._run_name()}")

    def on_enter_evaluated(self):
        logger.info(f"Flexibility evaluated for {self._run_name()}")

    def on_enter_reporting(self):
        logger.info(f"Writing artifacts of {self._run_name()}")

    def on_enter_completed(self):
        logger.info(f"Run completed: {self._run_name()}")

    def on_enter_failed(self, error: Optional[str] = None):
        """
        Called when the run fails.

        Args:
            error: Optional error message
        """
        if error:
            logger.error(f"Run failed for {self._run_name()}: {error}")
        else:
            logger.error(f"Run failed for {self._run_name()}")

    def _run_name(self) -> str:
        if self.model is not None and getattr(self.model, "name", None):
            return self.model.name
        return "unknown"

    def is_terminal(self) -> bool:
        """Check if in a terminal state (completed or failed)."""
        return self.current_state in [self.completed, self.failed]
