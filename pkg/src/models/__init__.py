"""Data models for the energy block simulator."""

from .unit import (
    ControlBounds,
    EnergyBlock,
    UnitControl,
    UnitDisturbance,
    UnitKind,
    UnitModel,
    UnitState,
)
from .margin import MARGIN_FIELDS, BalanceResult, Envelope, FlexIndices, MarginPoint
from .control import MpcConfig, PredictionMatrices, QpProblem, StateSpace
from .qp_solution import QpSolution, QpStatus
from .profiles import Profiles, SynthesisSpec
from .trace import DispatchTrace
from .scenario_spec import ScenarioSpec
from .run_report import RunReport

__all__ = [
    "ControlBounds",
    "EnergyBlock",
    "UnitControl",
    "UnitDisturbance",
    "UnitKind",
    "UnitModel",
    "UnitState",
    "MARGIN_FIELDS",
    "BalanceResult",
    "Envelope",
    "FlexIndices",
    "MarginPoint",
    "MpcConfig",
    "PredictionMatrices",
    "QpProblem",
    "StateSpace",
    "QpSolution",
    "QpStatus",
    "Profiles",
    "SynthesisSpec",
    "DispatchTrace",
    "ScenarioSpec",
    "RunReport",
]
